"""Scaling-rotation distance and minimal pairs for 2x2 and 3x3 SPD matrices.

The distance is the shortest geodesic distance in SO(p) x Diag+(p) between
the eigen-decomposition fibers of ``X`` and ``Y``. With one version of ``Y``
held fixed, the search runs over versions of ``X``:

* distinct eigenvalues: the ``p! 2^(p-1)`` permuted / sign-changed versions;
* one repeated pair (p=3): six candidates, each minimally rotated inside the
  repeated eigenspace (closed form via the 2x2 semi-SVD, or an alternating
  ascent when ``Y`` also has a repeated pair);
* isotropic ``X``: the eigenvectors of ``Y`` are shared, leaving pure scaling.

Mixed cases are handled by swapping arguments, since the distance is symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, InvalidInput
from .frames import CurveParams, Frame
from .group import partition_of, perm_matrix, permute_diag, sign_matrix, versions_of_frame
from .manifold import DEFAULT_CONFIG, MetricConfig, geo_dist
from .matcore import as_spd, semi_svd2, so_log, sym_eig

# Sign changes and permutations giving the six minimally rotated versions
# when the repeated eigenvalue block sits in coordinates {0, 1}. The three
# permutations send the single eigenvalue to positions 2, 0 and 1.
PAIR_SIGNS = ((1, 1, 1), (-1, 1, -1))
PAIR_PERMS = ((0, 1, 2), (1, 2, 0), (0, 2, 1))

G_STARTS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
NEAR_FACTOR = 10.0


# --------------------------------------------------------------------------- #
# result types
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class MultiplicityClass:
    """Eigenvalue multiplicity pattern of one matrix.

    ``kind`` is ``"distinct"``, ``"pair"`` (two equal eigenvalues) or
    ``"triple"`` (p=3 isotropic). A 2x2 isotropic matrix is a ``"pair"``
    whose block covers every index. ``near`` marks distinct eigenvalues that
    are closer than ``NEAR_FACTOR * tol_eq``.
    """

    kind: str
    blocks: Tuple[Tuple[int, ...], ...]
    near: bool = False

    @property
    def isotropic(self) -> bool:
        return len(self.blocks) == 1

    @property
    def repeated(self) -> Optional[Tuple[int, ...]]:
        for b in self.blocks:
            if len(b) > 1:
                return b
        return None


@dataclass(frozen=True)
class MinimalPairResult:
    distance: float
    pair: Tuple[Frame, Frame]
    curve: CurveParams
    ties: Tuple[Tuple[Frame, Frame], ...] = ()
    involution_flag: bool = False
    class_x: Optional[MultiplicityClass] = None
    class_y: Optional[MultiplicityClass] = None
    near_multiplicity: bool = False

    @property
    def n_minimal(self) -> int:
        return 1 + len(self.ties)

    def alternatives(self) -> List[CurveParams]:
        """Other minimal curves: tied pairs, plus the mirrored log at an involution."""
        out = []
        if self.involution_flag:
            c = self.curve
            out.append(CurveParams(c.U, c.d, -c.A, c.l))
        for fx, fy in self.ties:
            out.append(curve_from_pair(fx, fy))
        return out


@dataclass
class GMaximum:
    theta: float
    phi: float
    value: float
    history: List[float] = field(default_factory=list)
    converged: bool = True


def curve_from_pair(fx: Frame, fy: Frame) -> CurveParams:
    """``A = log(V U')``, ``L = log(D^-1 Lambda)`` for a pair of frames."""
    A, _ = so_log(fy.U @ fx.U.T)
    return CurveParams(fx.U, fx.d, A, np.log(fy.d / fx.d))


# --------------------------------------------------------------------------- #
# classification
# --------------------------------------------------------------------------- #


def classify_values(d, tol_eq: float) -> MultiplicityClass:
    d = np.asarray(d, dtype=float)
    blocks = partition_of(d, tol_eq)
    p = d.size
    if len(blocks) == p:
        near = len(partition_of(d, NEAR_FACTOR * tol_eq)) < p
        return MultiplicityClass("distinct", blocks, near)
    if len(blocks) == 1 and p == 3:
        return MultiplicityClass("triple", blocks)
    return MultiplicityClass("pair", blocks)


def classify(X, tol_eq: float = DEFAULT_CONFIG.tol_eq) -> MultiplicityClass:
    _, d = sym_eig(as_spd(X, "X"))
    return classify_values(d, tol_eq)


# --------------------------------------------------------------------------- #
# building blocks
# --------------------------------------------------------------------------- #


def _plane_align(Gamma) -> np.ndarray:
    """Rotation ``blockdiag(R11, 1)`` maximizing ``trace(Gamma R)``."""
    E1, _, E2 = semi_svd2(np.asarray(Gamma)[:2, :2])
    R = np.eye(3)
    R[:2, :2] = E2 @ E1.T
    return R


def _plane_angle(R) -> float:
    return math.atan2(R[1, 0], R[0, 0])


def plane_rotation(theta: float) -> np.ndarray:
    """Rotation by ``theta`` about the third axis."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def minimal_rotation(U, V, signs: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Rotation ``R`` in the {0,1} plane bringing ``U R I_s P'`` closest to ``V``.

    Maximizes ``trace(Gamma R)`` with ``Gamma = I_s P' V' U``; the optimum
    is ``blockdiag(E2 E1', 1)`` from the semi-SVD ``Gamma_11 = E1 L E2'``.
    """
    Gamma = sign_matrix(signs) @ perm_matrix(perm).T @ np.asarray(V).T @ np.asarray(U)
    return _plane_align(Gamma)


def _g_value(W, theta, M, phi) -> float:
    return float(np.trace(plane_rotation(phi).T @ W @ plane_rotation(theta) @ M))


def _ascend(W, M, phi0, tol_g, max_iter) -> GMaximum:
    phi = phi0
    theta = 0.0
    g = -math.inf
    history = []
    for _ in range(max_iter):
        # theta-step: maximize trace((M R_phi' W) R_theta)
        theta = _plane_angle(_plane_align(M @ plane_rotation(phi).T @ W))
        history.append(_g_value(W, theta, M, phi))
        # phi-step: maximize trace(R_phi' (W R_theta M))
        phi = _plane_angle(_plane_align((W @ plane_rotation(theta) @ M).T))
        g_new = _g_value(W, theta, M, phi)
        history.append(g_new)
        if abs(g_new - g) < tol_g:
            return GMaximum(theta, phi, g_new, history, True)
        g = g_new
    return GMaximum(theta, phi, g, history, False)


def maximize_G(
    U,
    V,
    signs: Sequence[int],
    perm: Sequence[int],
    cfg: MetricConfig = DEFAULT_CONFIG,
    starts: Sequence[float] = G_STARTS,
) -> GMaximum:
    """Maximize ``G(theta, phi) = trace(U R_theta I_s P' R_phi' V')``.

    Alternates exact maximizations over ``theta`` and ``phi`` (each one a
    minimal-rotation problem) from several starting ``phi`` and keeps the
    best stationary value. ``history`` records G after every half step of
    the winning run.
    """
    W = np.asarray(V).T @ np.asarray(U)
    M = sign_matrix(signs) @ perm_matrix(perm).T
    best = None
    for phi0 in starts:
        run = _ascend(W, M, phi0, cfg.tol_g, cfg.max_iter)
        if best is None or run.value > best.value + cfg.tol_g:
            best = run
    if not best.converged:
        raise ConvergenceError(
            f"alternating ascent did not converge in {cfg.max_iter} iterations",
            last=best,
        )
    return best


def _canonical_pair(U, d, blocks):
    """Reorder a version so the repeated eigenvalue block is in coordinates {0, 1}."""
    rep = next(b for b in blocks if len(b) == 2)
    single = next(i for i in range(3) if i not in rep)
    order = [rep[0], rep[1], single]
    Uc = U[:, order].copy()
    dc = d[order].copy()
    if np.linalg.det(Uc) < 0:
        Uc[:, 2] = -Uc[:, 2]
    dc[0] = dc[1] = 0.5 * (dc[0] + dc[1])
    return Uc, dc


def _select(cands, cfg: MetricConfig):
    """Lowest-index candidate within ``tol_tie`` of the minimum, plus the ties."""
    dists = [c[0] for c in cands]
    dmin = min(dists)
    within = [i for i, dist in enumerate(dists) if dist <= dmin + cfg.tol_tie]
    best = within[0]
    ties = tuple((cands[i][1], cands[i][2]) for i in within[1:])
    return cands[best], ties


def _result(best, ties, cx, cy) -> MinimalPairResult:
    dist, fx, fy = best
    curve = curve_from_pair(fx, fy)
    _, flag = so_log(fy.U @ fx.U.T)
    return MinimalPairResult(
        distance=dist,
        pair=(fx, fy),
        curve=curve,
        ties=ties,
        involution_flag=flag,
        class_x=cx,
        class_y=cy,
        near_multiplicity=cx.near or cy.near,
    )


def _swapped(r: MinimalPairResult) -> MinimalPairResult:
    fy, fx = r.pair
    return _result(
        (r.distance, fx, fy),
        tuple((b, a) for a, b in r.ties),
        r.class_y,
        r.class_x,
    )


def _isotropic_result(dx, V, lam, cx, cy, cfg) -> MinimalPairResult:
    fx = Frame(V, np.full(lam.size, float(np.mean(dx))))
    fy = Frame(V, lam)
    return _result((geo_dist(fx, fy, cfg), fx, fy), (), cx, cy)


def _distinct_result(U, d, V, lam, cx, cy, cfg) -> MinimalPairResult:
    fy = Frame(V, lam)
    cands = [(geo_dist(fx, fy, cfg), fx, fy) for fx in versions_of_frame(U, d)]
    best, ties = _select(cands, cfg)
    return _result(best, ties, cx, cy)


def _prepare(X, Y, p):
    X = as_spd(X, "X")
    Y = as_spd(Y, "Y")
    if X.shape != (p, p) or Y.shape != (p, p):
        raise InvalidInput(f"expected two {p}x{p} matrices, got {X.shape} and {Y.shape}")
    return X, Y


# --------------------------------------------------------------------------- #
# public distances
# --------------------------------------------------------------------------- #


def sr_distance_2(X, Y, cfg: MetricConfig = DEFAULT_CONFIG) -> MinimalPairResult:
    """Minimal pair and distance for 2x2 SPD matrices."""
    X, Y = _prepare(X, Y, 2)
    U, d = sym_eig(X)
    V, lam = sym_eig(Y)
    cx = classify_values(d, cfg.tol_eq)
    cy = classify_values(lam, cfg.tol_eq)
    if cx.isotropic:
        return _isotropic_result(d, V, lam, cx, cy, cfg)
    if cy.isotropic:
        return _swapped(_isotropic_result(lam, U, d, cy, cx, cfg))
    return _distinct_result(U, d, V, lam, cx, cy, cfg)


def _pair_distinct(U, d, V, lam, cx, cy, cfg) -> MinimalPairResult:
    Uc, dc = _canonical_pair(U, d, cx.blocks)
    fy = Frame(V, lam)
    cands = []
    for s in PAIR_SIGNS:
        Is = np.asarray(s, dtype=float)
        for perm in PAIR_PERMS:
            R = minimal_rotation(Uc, V, s, perm)
            fx = Frame((Uc @ R * Is) @ perm_matrix(perm).T, permute_diag(dc, perm))
            cands.append((geo_dist(fx, fy, cfg), fx, fy))
    best, ties = _select(cands, cfg)
    return _result(best, ties, cx, cy)


def _pair_pair(U, d, V, lam, cx, cy, cfg) -> MinimalPairResult:
    Uc, dc = _canonical_pair(U, d, cx.blocks)
    Vc, lc = _canonical_pair(V, lam, cy.blocks)
    cands = []
    for s in PAIR_SIGNS:
        Is = np.asarray(s, dtype=float)
        for perm in PAIR_PERMS:
            g = maximize_G(Uc, Vc, s, perm, cfg)
            fx = Frame(
                (Uc @ plane_rotation(g.theta) * Is) @ perm_matrix(perm).T,
                permute_diag(dc, perm),
            )
            fy = Frame(Vc @ plane_rotation(g.phi), lc)
            cands.append((geo_dist(fx, fy, cfg), fx, fy))
    best, ties = _select(cands, cfg)
    return _result(best, ties, cx, cy)


def sr_distance_3(X, Y, cfg: MetricConfig = DEFAULT_CONFIG) -> MinimalPairResult:
    """Minimal pair and distance for 3x3 SPD matrices, all multiplicity cases."""
    X, Y = _prepare(X, Y, 3)
    U, d = sym_eig(X)
    V, lam = sym_eig(Y)
    cx = classify_values(d, cfg.tol_eq)
    cy = classify_values(lam, cfg.tol_eq)
    if cx.kind == "triple":
        return _isotropic_result(d, V, lam, cx, cy, cfg)
    if cy.kind == "triple":
        return _swapped(_isotropic_result(lam, U, d, cy, cx, cfg))
    if cx.kind == "distinct" and cy.kind == "distinct":
        return _distinct_result(U, d, V, lam, cx, cy, cfg)
    if cx.kind == "pair" and cy.kind == "distinct":
        return _pair_distinct(U, d, V, lam, cx, cy, cfg)
    if cx.kind == "distinct":
        return _swapped(_pair_distinct(V, lam, U, d, cy, cx, cfg))
    return _pair_pair(U, d, V, lam, cx, cy, cfg)


def sr_distance(X, Y, cfg: MetricConfig = DEFAULT_CONFIG) -> MinimalPairResult:
    """Scaling-rotation distance between two SPD matrices of size 2 or 3.

    Examples
    --------
    >>> import numpy as np
    >>> round(sr_distance(np.diag([2.0, 1.0]), np.diag([2.0, 1.0])).distance, 12)
    0.0
    """
    p = np.asarray(X).shape[0] if np.ndim(X) == 2 else None
    if p == 2:
        return sr_distance_2(X, Y, cfg)
    if p == 3:
        return sr_distance_3(X, Y, cfg)
    raise InvalidInput(f"X must be 2x2 or 3x3, got shape {np.shape(X)}")


def sr_dist(X, Y, k: float = 1.0) -> float:
    """Shortcut returning only the distance."""
    return sr_distance(X, Y, MetricConfig(k=k)).distance


# --------------------------------------------------------------------------- #
# k sweeps
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SweepRow:
    k: float
    distance: float
    rotation: float
    scaling: float
    character: str


def curve_character(curve: CurveParams, tol: float = 1e-9) -> str:
    rot = float(np.linalg.norm(curve.A)) > tol
    sc = curve.scaling_norm > tol
    if rot and sc:
        return "mixed"
    if rot:
        return "pure-rotation"
    if sc:
        return "pure-scaling"
    return "constant"


def k_sweep(X, Y, ks: Sequence[float], cfg: MetricConfig = DEFAULT_CONFIG) -> List[SweepRow]:
    """Distance and minimal-curve character for each weight in ``ks``."""
    ks = [float(k) for k in ks]
    if any(k <= 0 or not math.isfinite(k) for k in ks):
        raise InvalidInput("k values must be positive")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise InvalidInput("k values must be strictly increasing")
    rows = []
    for k in ks:
        c = MetricConfig(k=k, tol_eq=cfg.tol_eq, tol_tie=cfg.tol_tie,
                         tol_g=cfg.tol_g, max_iter=cfg.max_iter)
        r = sr_distance(X, Y, c)
        rows.append(
            SweepRow(k, r.distance, r.curve.rotation_angle, r.curve.scaling_norm,
                     curve_character(r.curve))
        )
    return rows


def slope_breaks(ks, dists, count: int = 2, min_separation: int = 3) -> List[float]:
    """Locations of the ``count`` largest second-difference spikes of ``dists(ks)``."""
    ks = np.asarray(ks, dtype=float)
    d2 = np.abs(np.diff(np.asarray(dists, dtype=float), 2))
    order = np.argsort(-d2, kind="stable")
    picked: List[int] = []
    for i in order:
        if all(abs(int(i) - j) >= min_separation for j in picked):
            picked.append(int(i))
        if len(picked) == count:
            break
    return sorted(float(ks[i + 1]) for i in picked)
