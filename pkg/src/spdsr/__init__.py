"""Scaling-rotation distance and interpolation for 2x2 and 3x3 SPD matrices."""

from .errors import (
    AmbiguousAxis,
    ConvergenceError,
    DomainError,
    InvalidInput,
    MultiplicityError,
    SpdsrError,
)
from .frames import CurveParams, Frame, Tangent
from .group import enumerate_versions, partition_of
from .interp import (
    affineinv_interp,
    effect_report,
    euclid_interp,
    logeuclid_interp,
    make_trajectory,
    sr_curve_eval,
    sr_interpolate,
    stats,
)
from .manifold import MetricConfig, exp_map, geo_dist, log_map
from .srdist import MinimalPairResult, classify, k_sweep, sr_dist, sr_distance

__version__ = "0.1.0"

__all__ = [
    "AmbiguousAxis",
    "ConvergenceError",
    "CurveParams",
    "DomainError",
    "Frame",
    "InvalidInput",
    "MetricConfig",
    "MinimalPairResult",
    "MultiplicityError",
    "SpdsrError",
    "Tangent",
    "affineinv_interp",
    "classify",
    "effect_report",
    "enumerate_versions",
    "euclid_interp",
    "exp_map",
    "geo_dist",
    "k_sweep",
    "log_map",
    "logeuclid_interp",
    "make_trajectory",
    "partition_of",
    "sr_curve_eval",
    "sr_dist",
    "sr_distance",
    "sr_interpolate",
    "stats",
]
