"""Value types shared by the geometry modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .matcore import TOL_ORTH, compose


@dataclass(frozen=True)
class Frame:
    """A point ``(U, D)`` of SO(p) x Diag+(p); ``d`` holds the diagonal of D."""

    U: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        d = np.asarray(self.d, dtype=float).ravel()
        p = d.size
        if U.shape != (p, p) or p not in (2, 3):
            raise InvalidInput(f"frame shapes do not match: U {U.shape}, d {d.shape}")
        if np.any(d <= 0) or not np.all(np.isfinite(d)):
            raise InvalidInput(f"frame eigenvalues must be positive, got {d}")
        if (
            np.max(np.abs(U.T @ U - np.eye(p))) > TOL_ORTH
            or abs(np.linalg.det(U) - 1.0) > TOL_ORTH
        ):
            raise InvalidInput("frame rotation is not in SO(p)")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "d", d)

    @property
    def p(self) -> int:
        return self.d.size

    def compose(self) -> np.ndarray:
        """The SPD matrix ``U diag(d) U'`` this frame represents."""
        return compose(self.U, self.d)


@dataclass(frozen=True)
class Tangent:
    """Tangent vector ``(A, L)``: angular velocity A and log-scaling velocity L."""

    A: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        l = np.asarray(self.l, dtype=float).ravel()
        if A.shape != (l.size, l.size):
            raise InvalidInput(f"tangent shapes do not match: A {A.shape}, l {l.shape}")
        object.__setattr__(self, "A", 0.5 * (A - A.T))
        object.__setattr__(self, "l", l)

    @classmethod
    def zero(cls, p: int) -> "Tangent":
        return cls(np.zeros((p, p)), np.zeros(p))


@dataclass(frozen=True)
class CurveParams:
    """Parameters ``(U, D, A, L)`` of the scaling-rotation curve

    ``chi(t) = exp(A t) U D exp(L t) U' exp(A' t)``.
    """

    U: np.ndarray
    d: np.ndarray
    A: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        for name in ("U", "d", "A", "l"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def p(self) -> int:
        return self.d.size

    @property
    def rotation_angle(self) -> float:
        """Total rotation ``||A||_F / sqrt(2)``."""
        return float(np.linalg.norm(self.A)) / np.sqrt(2.0)

    @property
    def scaling_norm(self) -> float:
        return float(np.linalg.norm(self.l))

    def __call__(self, t: float) -> np.ndarray:
        from .interp import sr_curve_eval

        return sr_curve_eval(self, t)
