"""Riemannian geometry of SO(p) x Diag+(p).

The metric at ``(U, D)`` is ``k/2 trace(A1 A2') + trace(L1 L2)`` for tangent
vectors ``(A_i U, L_i D)``, so the squared geodesic distance is
``k * angle(V U')**2 + ||log(Lambda / D)||**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidInput, MultiplicityError
from .frames import Frame, Tangent
from .group import (
    TOL_EQ,
    even_signs,
    partition_of,
    perm_matrix,
    permutations,
    permute_diag,
)
from .matcore import compose, rotation_angle, so_exp, so_log

__all__ = [
    "Frame",
    "Tangent",
    "MetricConfig",
    "exp_map",
    "log_map",
    "geo_dist",
    "frame_distance",
    "geodesic_eval",
    "verify_invariance",
    "equivalent_geodesics",
]


@dataclass(frozen=True)
class MetricConfig:
    """Metric weight and numerical tolerances used by the distance search.

    k : weight on the rotational term (k > 0).
    tol_eq : relative tolerance for calling two eigenvalues equal.
    tol_tie : absolute distance gap under which two minimal pairs tie.
    tol_g : stopping tolerance on the trace objective in the alternating ascent.
    max_iter : iteration cap of the alternating ascent.
    """

    k: float = 1.0
    tol_eq: float = TOL_EQ
    tol_tie: float = 1e-9
    tol_g: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        for name in ("k", "tol_eq", "tol_tie", "tol_g"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidInput(f"{name} must be a positive number, got {v!r}")
        if int(self.max_iter) < 1:
            raise InvalidInput(f"max_iter must be >= 1, got {self.max_iter!r}")


DEFAULT_CONFIG = MetricConfig()


def exp_map(base: Frame, v: Tangent, t: float = 1.0) -> Frame:
    """``(exp(A t) U, exp(L t) D)``."""
    return Frame(so_exp(v.A * t) @ base.U, base.d * np.exp(v.l * t))


geodesic_eval = exp_map


def log_map(base: Frame, target: Frame) -> Tuple[Tangent, bool]:
    """Tangent ``(log(V U'), log(Lambda / D))`` and the involution flag.

    When the flag is set, ``(-A, L)`` is an equally short second solution.
    """
    if base.p != target.p:
        raise InvalidInput("frames have different dimensions")
    A, flag = so_log(target.U @ base.U.T)
    return Tangent(A, np.log(target.d / base.d)), flag


def frame_distance(U, d, V, lam, k: float = 1.0) -> float:
    """Geodesic distance between ``(U, diag d)`` and ``(V, diag lam)``."""
    theta = rotation_angle(V @ U.T)
    s = np.log(np.asarray(lam) / np.asarray(d))
    return math.sqrt(k * theta * theta + float(s @ s))


def geo_dist(a: Frame, b: Frame, cfg: MetricConfig = DEFAULT_CONFIG) -> float:
    if a.p != b.p:
        raise InvalidInput("frames have different dimensions")
    return frame_distance(a.U, a.d, b.U, b.d, cfg.k)


def verify_invariance(
    a: Frame,
    b: Frame,
    cfg: MetricConfig,
    R1,
    R2,
    perm: Sequence[int],
    S,
) -> Tuple[float, float]:
    """Distance before and after ``(U, D) -> (R1 U R2, S D_pi)`` on both frames.

    ``R1`` and ``R2`` may be any orthogonal matrices; the transformed pair is
    measured directly since it can leave SO(p).
    """
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    S = np.asarray(S, dtype=float).ravel()
    before = geo_dist(a, b, cfg)
    Ua, Ub = R1 @ a.U @ R2, R1 @ b.U @ R2
    after = frame_distance(
        Ua, S * permute_diag(a.d, perm), Ub, S * permute_diag(b.d, perm), cfg.k
    )
    return before, after


def equivalent_geodesics(
    base: Frame,
    v: Tangent,
    ts: Sequence[float] = (0.0,),
    tol_eq: float = TOL_EQ,
) -> List[Tuple[Frame, Tangent]]:
    """All geodesics whose eigen-composition traces the same curve.

    Valid when the curve passes through a matrix with distinct eigenvalues at
    one of the sample times ``ts``; then there are exactly ``p! 2^(p-1)`` of
    them, obtained by permuting and sign-changing the base frame.
    """
    p = base.p
    if not any(
        len(partition_of(base.d * np.exp(v.l * t), tol_eq)) == p for t in ts
    ):
        raise MultiplicityError(
            "curve has repeated eigenvalues at every sampled time",
            partition=partition_of(base.d, tol_eq),
        )
    out = []
    for s in even_signs(p):
        Us = base.U * np.asarray(s, dtype=float)
        for perm in permutations(p):
            P = perm_matrix(perm)
            out.append(
                (
                    Frame(Us @ P.T, permute_diag(base.d, perm)),
                    Tangent(v.A, permute_diag(v.l, perm)),
                )
            )
    return out


def curve_point(frame: Frame, v: Tangent, t: float) -> np.ndarray:
    """Eigen-composition of the geodesic at time ``t``."""
    g = exp_map(frame, v, t)
    return compose(g.U, g.d)
