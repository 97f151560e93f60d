"""Interpolation of SPD matrices and tensor statistics along the paths.

Four schemes are available: ``"SR"`` (minimal scaling-rotation curve),
``"E"`` (Euclidean), ``"LE"`` (log-Euclidean) and ``"AI"`` (affine-invariant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import AmbiguousAxis, InvalidInput
from .frames import CurveParams
from .manifold import DEFAULT_CONFIG, MetricConfig
from .matcore import (
    TOL_RECON,
    as_spd,
    compose,
    rotation_angle as _so_angle,
    so_exp,
    spd_exp,
    spd_log,
    spd_power,
    sym_eig,
)
from .srdist import sr_distance

SCHEMES = ("SR", "E", "LE", "AI")

__all__ = [
    "CurveParams",
    "Trajectory",
    "Effects",
    "SCHEMES",
    "sr_curve_eval",
    "sr_interpolate",
    "sr_interpolants",
    "euclid_interp",
    "logeuclid_interp",
    "affineinv_interp",
    "stats",
    "fractional_anisotropy",
    "frame_angle",
    "principal_axis_angle",
    "make_trajectory",
    "effect_report",
]


def sr_curve_eval(c: CurveParams, t: float) -> np.ndarray:
    """``exp(A t) U D exp(L t) U' exp(A' t)``."""
    Ut = so_exp(c.A * t) @ c.U
    return compose(Ut, c.d * np.exp(c.l * t))


def sr_frame_at(c: CurveParams, t: float) -> np.ndarray:
    """Eigenvector frame ``exp(A t) U`` carried by the curve at time ``t``."""
    return so_exp(c.A * t) @ c.U


def sr_interpolate(X, Y, cfg: MetricConfig = DEFAULT_CONFIG) -> CurveParams:
    """Minimal scaling-rotation curve from ``X`` (t=0) to ``Y`` (t=1).

    When the minimal curve is not unique the first minimal pair in candidate
    order is used; :func:`sr_interpolants` returns all of them.
    """
    return sr_distance(X, Y, cfg).curve


def sr_interpolants(X, Y, cfg: MetricConfig = DEFAULT_CONFIG) -> List[CurveParams]:
    r = sr_distance(X, Y, cfg)
    return [r.curve, *r.alternatives()]


def euclid_interp(X, Y, t: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return (1.0 - t) * X + t * Y


def logeuclid_interp(X, Y, t: float) -> np.ndarray:
    return spd_exp((1.0 - t) * spd_log(X) + t * spd_log(Y))


def affineinv_interp(X, Y, t: float) -> np.ndarray:
    """``X^(1/2) exp(t log(X^(-1/2) Y X^(-1/2))) X^(1/2)``."""
    Xh = spd_power(X, 0.5)
    Xih = spd_power(X, -0.5)
    inner = Xih @ as_spd(Y, "Y") @ Xih
    inner = 0.5 * (inner + inner.T)
    M = Xh @ spd_exp(t * spd_log(inner)) @ Xh
    return 0.5 * (M + M.T)


# --------------------------------------------------------------------------- #
# statistics
# --------------------------------------------------------------------------- #


def fractional_anisotropy(lam) -> float:
    """``sqrt(p/(p-1)) * ||lam - mean|| / ||lam||``.

    For p=3 this is the usual DTI fractional anisotropy; the p=2 form (factor
    sqrt(2)) is an extension with the same [0, 1] range.
    """
    lam = np.asarray(lam, dtype=float)
    p = lam.size
    dev = lam - lam.mean()
    return math.sqrt(p / (p - 1)) * float(np.linalg.norm(dev)) / float(np.linalg.norm(lam))


def stats(M) -> Tuple[float, float, float]:
    """Determinant, fractional anisotropy and mean diffusivity of an SPD matrix."""
    M = as_spd(M, "M")
    _, lam = sym_eig(M)
    return float(np.prod(lam)), fractional_anisotropy(lam), float(lam.mean())


def frame_angle(U_t, U_0) -> float:
    """Rotation angle between two eigenvector frames, in [0, pi]."""
    return _so_angle(np.asarray(U_t) @ np.asarray(U_0).T)


def _principal_axis(M, tol_eq: float) -> np.ndarray:
    w, vecs = np.linalg.eigh(np.asarray(M, dtype=float))
    if w[-1] - w[-2] <= tol_eq * max(1.0, abs(w[-1])):
        raise AmbiguousAxis(f"largest eigenvalue is not simple: {w}")
    return vecs[:, -1]


def principal_axis_angle(M_t, M_0, tol_eq: float = DEFAULT_CONFIG.tol_eq) -> float:
    """Angle between major eigenvectors, ``arccos(|u1(t)' u1(0)|)`` in [0, pi/2]."""
    u_t = _principal_axis(M_t, tol_eq)
    u_0 = _principal_axis(M_0, tol_eq)
    # atan2 form stays accurate for tiny angles
    c = abs(float(u_t @ u_0))
    s = float(np.linalg.norm(u_t - (u_t @ u_0) * u_0))
    return math.atan2(s, c)


# --------------------------------------------------------------------------- #
# trajectories
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class Trajectory:
    """Sampled interpolation path; per-sample columns share the index of ``t``.

    ``angle`` is NaN where the principal axis is undefined.
    """

    scheme: str
    t: np.ndarray
    matrices: np.ndarray
    det: np.ndarray
    fa: np.ndarray
    md: np.ndarray
    angle: np.ndarray
    curve: Optional[CurveParams] = None

    @property
    def p(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return self.t.size


def make_trajectory(
    X,
    Y,
    scheme: str = "SR",
    n_samples: int = 101,
    cfg: MetricConfig = DEFAULT_CONFIG,
) -> Trajectory:
    """Sample ``scheme`` on a uniform grid of ``n_samples`` points in [0, 1]."""
    if scheme not in SCHEMES:
        raise InvalidInput(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if int(n_samples) < 2:
        raise InvalidInput("n_samples must be at least 2")
    X = as_spd(X, "X")
    Y = as_spd(Y, "Y")
    ts = np.linspace(0.0, 1.0, int(n_samples))
    curve = None
    if scheme == "SR":
        curve = sr_interpolate(X, Y, cfg)
        mats = [sr_curve_eval(curve, t) for t in ts]
        angles = [frame_angle(sr_frame_at(curve, t), curve.U) for t in ts]
    else:
        fn = {"E": euclid_interp, "LE": logeuclid_interp, "AI": affineinv_interp}[scheme]
        mats = [fn(X, Y, t) for t in ts]
        # the endpoints are taken as given, not recomputed
        mats[0], mats[-1] = X.copy(), Y.copy()
        angles = []
        for M in mats:
            try:
                angles.append(principal_axis_angle(M, mats[0], cfg.tol_eq))
            except AmbiguousAxis:
                angles.append(math.nan)
    mats = np.array(mats)
    _check_endpoint(mats[0], X, "X")
    _check_endpoint(mats[-1], Y, "Y")
    st = np.array([stats(M) for M in mats])
    return Trajectory(
        scheme=scheme,
        t=ts,
        matrices=mats,
        det=st[:, 0],
        fa=st[:, 1],
        md=st[:, 2],
        angle=np.array(angles),
        curve=curve,
    )


def _check_endpoint(M, target, name):
    # repeated eigenvalues are averaged during the search; allow for that
    tol = max(TOL_RECON, 10 * DEFAULT_CONFIG.tol_eq) * (1.0 + np.linalg.norm(target))
    if np.linalg.norm(M - target) > tol:
        raise RuntimeError(f"trajectory endpoint does not reproduce {name}")


class Effects(NamedTuple):
    swelling: bool
    fattening: bool
    shrinking: bool


def effect_report(traj: Trajectory, rel: float = 1e-9, tol: float = 1e-9) -> Effects:
    """Swelling / fattening / shrinking flags from the interior samples.

    swelling: interior det above ``max(endpoint dets) * (1 + rel)``;
    fattening: interior FA below ``min(endpoint FAs) - tol``;
    shrinking: interior MD below ``min(endpoint MDs) - tol``.
    """
    if len(traj) < 3:
        return Effects(False, False, False)
    inner = slice(1, -1)
    ends = [0, -1]
    swelling = traj.det[inner].max() > traj.det[ends].max() * (1.0 + rel)
    fattening = traj.fa[inner].min() < traj.fa[ends].min() - tol
    shrinking = traj.md[inner].min() < traj.md[ends].min() - tol
    return Effects(bool(swelling), bool(fattening), bool(shrinking))
