"""Dense 2x2 / 3x3 matrix kernels.

Symmetric matrices are plain ``(p, p)`` float arrays, rotations are ``(p, p)``
arrays in SO(p), antisymmetric matrices are ``(p, p)`` arrays (see :func:`hat`
and :func:`vee` for the axis form) and diagonal matrices are 1-D arrays of
their diagonal entries.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InvalidInput

TOL_PD = 1e-12
TOL_ORTH = 1e-9
TOL_RECON = 1e-11
# Angular distance to pi below which a rotation is treated as an involution.
TOL_INVOLUTION = 1e-9

_JACOBI_PAIRS = ((0, 1), (0, 2), (1, 2))
_JACOBI_MAX_SWEEPS = 50


# --------------------------------------------------------------------------- #
# validation and storage helpers
# --------------------------------------------------------------------------- #


def as_square(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite float ``(p, p)`` array with p in {2, 3}."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] not in (2, 3):
        raise InvalidInput(f"{name} must be a 2x2 or 3x3 matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def as_symmetric(M, name: str = "matrix", tol: float = 1e-12) -> np.ndarray:
    A = as_square(M, name)
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > tol * scale:
        raise InvalidInput(f"{name} is not symmetric")
    return 0.5 * (A + A.T)


def as_spd(M, name: str = "matrix", tol_pd: float = TOL_PD) -> np.ndarray:
    """Validate a symmetric positive-definite matrix.

    All eigenvalues must exceed ``tol_pd`` times the largest one.
    """
    A = as_symmetric(M, name)
    w = np.linalg.eigvalsh(A)
    if w[-1] <= 0 or w[0] <= tol_pd * w[-1]:
        raise DomainError(f"{name} is not positive definite (eigenvalues {w})")
    return A


def as_rotation(R, name: str = "rotation", tol: float = TOL_ORTH) -> np.ndarray:
    A = as_square(R, name)
    p = A.shape[0]
    if np.max(np.abs(A.T @ A - np.eye(p))) > tol or abs(np.linalg.det(A) - 1.0) > tol:
        raise InvalidInput(f"{name} is not in SO({p})")
    return A


def sym_from_upper(upper) -> np.ndarray:
    """Build a symmetric matrix from its row-major upper triangle (3 or 6 values)."""
    u = np.asarray(upper, dtype=float).ravel()
    if u.size == 3:
        p = 2
    elif u.size == 6:
        p = 3
    else:
        raise InvalidInput(f"upper triangle needs 3 or 6 values, got {u.size}")
    M = np.zeros((p, p))
    M[np.triu_indices(p)] = u
    return M + np.triu(M, 1).T


def upper_of(M) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    return A[np.triu_indices(A.shape[0])].copy()


def compose(U, d) -> np.ndarray:
    """Eigen-composition ``U diag(d) U'`` (symmetrized)."""
    M = (U * d) @ U.T
    return 0.5 * (M + M.T)


# --------------------------------------------------------------------------- #
# symmetric eigen-decomposition
# --------------------------------------------------------------------------- #


def _eig2(A):
    a, b, c = A[0, 0], A[0, 1], A[1, 1]
    if b == 0.0:
        return np.eye(2), np.array([a, c])
    phi = 0.5 * math.atan2(2.0 * b, a - c)
    cs, sn = math.cos(phi), math.sin(phi)
    U = np.array([[cs, -sn], [sn, cs]])
    d = np.array(
        [
            a * cs * cs + 2.0 * b * cs * sn + c * sn * sn,
            a * sn * sn - 2.0 * b * cs * sn + c * cs * cs,
        ]
    )
    return U, d


def _eig3_jacobi(A):
    A = A.copy()
    V = np.eye(3)
    eps = np.finfo(float).eps
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = A[0, 1] ** 2 + A[0, 2] ** 2 + A[1, 2] ** 2
        diag = A[0, 0] ** 2 + A[1, 1] ** 2 + A[2, 2] ** 2
        if off <= (eps * eps) * 1e-4 * diag or off == 0.0:
            break
        for p, q in _JACOBI_PAIRS:
            apq = A[p, q]
            if apq == 0.0:
                continue
            h = A[q, q] - A[p, p]
            if abs(h) + 100.0 * abs(apq) == abs(h):
                t = apq / h  # tiny rotation; avoids overflow in theta
            else:
                theta = h / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
            c = 1.0 / math.hypot(t, 1.0)
            s = t * c
            J = np.eye(3)
            J[p, p] = J[q, q] = c
            J[p, q] = s
            J[q, p] = -s
            A = J.T @ A @ J
            A[p, q] = A[q, p] = 0.0
            V = V @ J
    return V, np.diag(A).copy()


def sym_eig(M):
    """Eigen-decomposition ``M = U diag(d) U'`` with ``det(U) = +1``.

    The eigenvalue order is whatever the solver produces; callers pick their
    own pairing. 2x2 uses the closed form, 3x3 uses cyclic Jacobi sweeps.

    Returns
    -------
    U : ndarray, shape (p, p)
        Rotation whose columns are eigenvectors.
    d : ndarray, shape (p,)
        Eigenvalues matching the columns of ``U``.
    """
    A = as_symmetric(M)
    if A.shape[0] == 2:
        U, d = _eig2(A)
    else:
        U, d = _eig3_jacobi(A)
    if np.linalg.det(U) < 0:
        U[:, -1] = -U[:, -1]
    return U, d


# --------------------------------------------------------------------------- #
# so(p) / SO(p)
# --------------------------------------------------------------------------- #


def hat(a) -> np.ndarray:
    """Antisymmetric matrix from a scalar angle (p=2) or an axis vector (p=3)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0 or a.size == 1:
        w = float(a.ravel()[0]) if a.ndim else float(a)
        return np.array([[0.0, -w], [w, 0.0]])
    if a.shape != (3,):
        raise InvalidInput(f"axis vector must have 3 entries, got shape {a.shape}")
    return np.array(
        [
            [0.0, -a[2], a[1]],
            [a[2], 0.0, -a[0]],
            [-a[1], a[0], 0.0],
        ]
    )


def vee(A):
    """Inverse of :func:`hat`: scalar for p=2, axis vector for p=3."""
    A = np.asarray(A, dtype=float)
    if A.shape == (2, 2):
        return float(A[1, 0])
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def _as_antisym(A) -> np.ndarray:
    A = as_square(A, "antisymmetric matrix")
    if np.max(np.abs(A + A.T)) > 1e-12 * max(1.0, float(np.max(np.abs(A)))):
        raise InvalidInput("matrix is not antisymmetric")
    return 0.5 * (A - A.T)


def so_exp(A) -> np.ndarray:
    """Matrix exponential of an antisymmetric matrix (Rodrigues for p=3)."""
    A = _as_antisym(A)
    if A.shape[0] == 2:
        w = A[1, 0]
        c, s = math.cos(w), math.sin(w)
        return np.array([[c, -s], [s, c]])
    a = vee(A)
    theta = float(np.linalg.norm(a))
    if theta == 0.0:
        return np.eye(3)
    K = hat(a / theta)
    return np.eye(3) + math.sin(theta) * K + (1.0 - math.cos(theta)) * (K @ K)


def rotation_angle(R) -> float:
    """Angle of a rotation, in [0, pi]; equals ``||log R||_F / sqrt(2)``."""
    R = np.asarray(R, dtype=float)
    if R.shape == (2, 2):
        return abs(math.atan2(R[1, 0] - R[0, 1], R[0, 0] + R[1, 1]))
    s = 0.5 * float(np.linalg.norm(vee(R - R.T)))
    c = 0.5 * (float(np.trace(R)) - 1.0)
    return math.atan2(s, min(1.0, max(-1.0, c)))


def so_log(R):
    """Minimal-norm logarithm of a rotation.

    Returns ``(A, involution)``. When ``R`` is a rotation by pi the logarithm
    is not unique; the returned axis has its first nonzero component positive
    and the flag is set, so ``-A`` is the other minimal solution.
    """
    R = as_rotation(R)
    if R.shape[0] == 2:
        w = math.atan2(R[1, 0] - R[0, 1], R[0, 0] + R[1, 1])
        flag = math.pi - abs(w) <= TOL_INVOLUTION
        if flag:
            w = math.pi
        return hat(w), flag

    w = 0.5 * vee(R - R.T)  # sin(theta) * axis
    s = float(np.linalg.norm(w))
    c = min(1.0, max(-1.0, 0.5 * (float(np.trace(R)) - 1.0)))
    theta = math.atan2(s, c)
    if theta == 0.0:
        return np.zeros((3, 3)), False
    flag = math.pi - theta <= TOL_INVOLUTION
    if c > 0.0:
        # theta / sin(theta) is well conditioned away from pi
        scale = theta / s if s > 0 else 1.0
        return hat(scale * w), False
    # near pi: axis from the symmetric part, (R + R')/2 - c I = (1 - c) n n'
    B = 0.5 * (R + R.T) - c * np.eye(3)
    i = int(np.argmax(np.diag(B)))
    n = B[:, i] / math.sqrt(B[i, i] * (1.0 - c)) if B[i, i] > 0 else np.eye(3)[i]
    n = n / np.linalg.norm(n)
    if flag:
        theta = math.pi
        k = int(np.flatnonzero(np.abs(n) > 1e-12)[0])
        if n[k] < 0:
            n = -n
    elif float(n @ w) < 0:
        n = -n
    return hat(theta * n), flag


# --------------------------------------------------------------------------- #
# diagonal and SPD functions
# --------------------------------------------------------------------------- #


def diag_exp(l) -> np.ndarray:
    return np.exp(np.asarray(l, dtype=float))


def diag_log(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        raise DomainError(f"diagonal logarithm needs positive entries, got {d}")
    return np.log(d)


def _spd_apply(M, fn, name):
    A = as_spd(M, name)
    U, d = sym_eig(A)
    return compose(U, fn(d))


def spd_log(M) -> np.ndarray:
    return _spd_apply(M, np.log, "spd_log argument")


def spd_exp(S) -> np.ndarray:
    A = as_symmetric(S, "spd_exp argument")
    U, d = sym_eig(A)
    return compose(U, np.exp(d))


def spd_power(M, alpha: float) -> np.ndarray:
    """``M**alpha`` for SPD ``M`` via its eigenvalues."""
    return _spd_apply(M, lambda d: d**alpha, "spd_power argument")


# --------------------------------------------------------------------------- #
# semi-singular-value decomposition and inner products
# --------------------------------------------------------------------------- #


def _rot2(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s], [s, c]])


def semi_svd2(G):
    """Semi-singular-value decomposition ``G = E1 diag(lam) E2'`` of a 2x2 matrix.

    ``E1`` and ``E2`` are proper rotations and ``lam[0] >= |lam[1]|``; a
    negative determinant shows up as ``lam[1] < 0``. Splits ``G`` into its
    conformal part ``q R(alpha)`` and anti-conformal part ``r F(beta)``, which
    gives ``lam = (q + r, q - r)`` in closed form.
    """
    G = np.asarray(G, dtype=float)
    if G.shape != (2, 2):
        raise InvalidInput(f"semi_svd2 needs a 2x2 matrix, got {G.shape}")
    e = 0.5 * (G[0, 0] + G[1, 1])
    f = 0.5 * (G[0, 0] - G[1, 1])
    g = 0.5 * (G[1, 0] + G[0, 1])
    h = 0.5 * (G[1, 0] - G[0, 1])
    q = math.hypot(e, h)
    r = math.hypot(f, g)
    alpha = math.atan2(h, e)
    beta = math.atan2(g, f)
    left = 0.5 * (alpha + beta)
    right = 0.5 * (alpha - beta)
    E1 = _rot2(left)
    E2 = _rot2(-right)
    # E1 -> -E1, E2 -> -E2 leaves the product unchanged; pin the sign.
    if E1[0, 0] < 0 or (E1[0, 0] == 0 and E1[1, 0] < 0):
        E1, E2 = -E1, -E2
    return E1, np.array([q + r, q - r]), E2


def frob_inner(X, Y) -> float:
    """Frobenius inner product ``trace(X Y')``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise InvalidInput(f"shape mismatch {X.shape} vs {Y.shape}")
    return float(np.sum(X * Y))


def frob_norm(X) -> float:
    return math.sqrt(frob_inner(X, X))
