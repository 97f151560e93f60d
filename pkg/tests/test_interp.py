import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm, fractional_matrix_power, logm

from conftest import pure_rotation_pair, pure_scaling_pair
from oracles import random_rotation, random_spd, spd_matrices
from spdsr.errors import AmbiguousAxis, DomainError, InvalidInput
from spdsr.frames import CurveParams
from spdsr.interp import (
    affineinv_interp,
    effect_report,
    euclid_interp,
    fractional_anisotropy,
    frame_angle,
    logeuclid_interp,
    make_trajectory,
    principal_axis_angle,
    sr_curve_eval,
    sr_interpolants,
    sr_interpolate,
    stats,
)
from spdsr.matcore import hat


def fa_oracle(lam):
    lam = np.asarray(lam, float)
    m = lam.mean()
    return math.sqrt(1.5) * math.sqrt(np.sum((lam - m) ** 2)) / math.sqrt(np.sum(lam**2))


# --------------------------------------------------------------------------- #
# curves
# --------------------------------------------------------------------------- #


def test_curve_constant(rng):
    U = random_rotation(rng, 3)
    c = CurveParams(U, [1.0, 2.0, 3.0], np.zeros((3, 3)), np.zeros(3))
    for t in (0.0, 0.3, 2.0):
        np.testing.assert_allclose(sr_curve_eval(c, t), (U * [1, 2, 3]) @ U.T, atol=1e-14)


def test_curve_pure_scaling():
    c = CurveParams(np.eye(2), [1.0, 1.0], np.zeros((2, 2)), [1.0, -1.0])
    np.testing.assert_allclose(sr_curve_eval(c, 1.0), np.diag([math.e, 1 / math.e]), atol=1e-15)


def test_curve_matches_expm(rng):
    U = random_rotation(rng, 3)
    a = rng.standard_normal(3)
    l = rng.standard_normal(3)
    c = CurveParams(U, [1.0, 2.0, 3.0], hat(a), l)
    t = 0.37
    ref = expm(hat(a) * t) @ U @ np.diag(np.array([1.0, 2.0, 3.0]) * np.exp(l * t)) @ U.T @ expm(hat(a) * t).T
    np.testing.assert_allclose(sr_curve_eval(c, t), ref, atol=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.floats(-2.0, 2.0))
def test_curve_log_det_affine(seed, t):
    rng = np.random.default_rng(seed)
    d = np.exp(rng.uniform(-1, 1, 3))
    l = rng.standard_normal(3)
    c = CurveParams(random_rotation(rng, 3), d, hat(rng.standard_normal(3)), l)
    _, logdet = np.linalg.slogdet(sr_curve_eval(c, t))
    assert abs(logdet - (np.sum(np.log(d)) + l.sum() * t)) < 1e-10


def test_sr_interpolate_identity():
    X = np.diag([3.0, 2.0, 1.0])
    c = sr_interpolate(X, X)
    assert np.abs(c.A).max() == 0 and np.abs(c.l).max() == 0


def test_sr_interpolate_pure_rotation():
    X, Y = pure_rotation_pair()
    c = sr_interpolate(X, Y)
    assert np.abs(c.l).max() < 1e-10
    assert abs(c.rotation_angle - math.pi / 3) < 1e-10
    np.testing.assert_allclose(c(0.0), X, atol=1e-11 * 15)
    np.testing.assert_allclose(c(1.0), Y, atol=1e-11 * 15)


def test_sr_interpolate_pure_scaling():
    X, Y = pure_scaling_pair()
    c = sr_interpolate(X, Y)
    assert np.abs(c.A).max() < 1e-10


def test_sr_interpolants_tie():
    eps, theta = 0.3, math.pi / 4 + 2 * 0.3**2 / math.pi
    X = np.diag([math.exp(eps / 2), math.exp(-eps / 2)])
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    Y = R @ X @ R.T
    curves = sr_interpolants(X, Y)
    assert len(curves) == 2
    for c in curves:
        np.testing.assert_allclose(c(1.0), Y, atol=1e-10)
    assert not np.allclose(curves[0](0.5), curves[1](0.5))


# --------------------------------------------------------------------------- #
# comparison interpolants
# --------------------------------------------------------------------------- #


def test_euclid():
    X, Y = np.eye(2), 3 * np.eye(2)
    np.testing.assert_array_equal(euclid_interp(X, Y, 0.5), 2 * np.eye(2))
    X, Y = pure_rotation_pair()
    assert np.linalg.det(euclid_interp(X, Y, 0.5)) > np.linalg.det(X)


def test_logeuclid_examples(rng):
    X, Y = np.diag([1.0, 4.0]), np.diag([9.0, 1.0])
    np.testing.assert_allclose(logeuclid_interp(X, Y, 0.5), np.diag([3.0, 2.0]), atol=1e-14)
    X, Y = random_spd(rng, 3), random_spd(rng, 3)
    np.testing.assert_allclose(logeuclid_interp(X, Y, 0.0), X, atol=1e-12)
    ref = expm(0.3 * np.real(logm(X)) + 0.7 * np.real(logm(Y)))
    np.testing.assert_allclose(logeuclid_interp(X, Y, 0.7), ref, atol=1e-9)
    with pytest.raises(DomainError):
        logeuclid_interp(np.diag([1.0, -1.0]), np.eye(2), 0.5)


def test_affineinv_examples(rng):
    X, Y = random_spd(rng, 3), random_spd(rng, 3)
    np.testing.assert_allclose(affineinv_interp(X, Y, 0.0), X, atol=1e-10)
    np.testing.assert_allclose(affineinv_interp(X, Y, 1.0), Y, atol=1e-10)
    np.testing.assert_allclose(
        affineinv_interp(np.eye(3), Y, 0.4), np.real(fractional_matrix_power(Y, 0.4)), atol=1e-10
    )
    with pytest.raises(DomainError):
        affineinv_interp(np.eye(2), np.diag([1.0, 0.0]), 0.5)


@settings(max_examples=30)
@given(spd_matrices(p=3), spd_matrices(p=3), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_affineinv_congruence(X, Y, t, seed):
    G = random_rotation(np.random.default_rng(seed), 3)
    lhs = affineinv_interp(G @ X @ G.T, G @ Y @ G.T, t)
    rhs = G @ affineinv_interp(X, Y, t) @ G.T
    assert np.abs(lhs - rhs).max() < 1e-8 * (1 + np.abs(rhs).max())


@settings(max_examples=30)
@given(spd_matrices(), spd_matrices(), st.floats(0.0, 1.0))
def test_log_det_linear_le_ai(X, Y, t):
    if X.shape != Y.shape:
        return
    chord = (1 - t) * np.linalg.slogdet(X)[1] + t * np.linalg.slogdet(Y)[1]
    for f in (logeuclid_interp, affineinv_interp):
        assert abs(np.linalg.slogdet(f(X, Y, t))[1] - chord) < 1e-9


# --------------------------------------------------------------------------- #
# statistics and angles
# --------------------------------------------------------------------------- #


def test_stats_examples():
    assert stats(np.eye(3)) == (1.0, 0.0, 1.0)
    det, fa, md = stats(np.diag([15.0, 5.0, 1.0]))
    assert abs(det - 75) < 1e-12 and abs(md - 7) < 1e-14
    assert abs(fa - fa_oracle([15, 5, 1])) < 1e-15


def test_fa_2x2_extension():
    assert fractional_anisotropy([1.0, 1.0]) == 0
    assert abs(fractional_anisotropy([1.0, 0.0 + 1e-300]) - 1.0) < 1e-12


@given(spd_matrices(), st.floats(0.01, 100.0))
def test_fa_scale_invariant(M, s):
    assert abs(stats(s * M)[1] - stats(M)[1]) < 1e-12


@given(spd_matrices(p=3))
def test_fa_matches_formula(M):
    assert abs(stats(M)[1] - fa_oracle(np.linalg.eigvalsh(M))) < 1e-12


def test_frame_angle(rng):
    U = random_rotation(rng, 3)
    assert frame_angle(U, U) < 1e-15
    R = expm(hat([0.0, 0.0, 0.4]))
    assert abs(frame_angle(R @ U, U) - 0.4) < 1e-14


def test_principal_axis_angle():
    M0 = np.diag([3.0, 1.0])
    assert principal_axis_angle(M0, M0) == 0
    c, s = math.cos(0.3), math.sin(0.3)
    R = np.array([[c, -s], [s, c]])
    assert abs(principal_axis_angle(R @ M0 @ R.T, M0) - 0.3) < 1e-14
    # axis angle is folded into [0, pi/2]
    c, s = math.cos(2.5), math.sin(2.5)
    R = np.array([[c, -s], [s, c]])
    assert abs(principal_axis_angle(R @ M0 @ R.T, M0) - (math.pi - 2.5)) < 1e-14
    with pytest.raises(AmbiguousAxis):
        principal_axis_angle(np.eye(3), np.eye(3))


# --------------------------------------------------------------------------- #
# trajectories and effects
# --------------------------------------------------------------------------- #


def test_trajectory_two_samples():
    X, Y = pure_scaling_pair()
    for scheme in ("SR", "E", "LE", "AI"):
        tr = make_trajectory(X, Y, scheme, 2)
        assert len(tr) == 2
        np.testing.assert_allclose(tr.matrices[0], X, atol=1e-10)
        np.testing.assert_allclose(tr.matrices[1], Y, atol=1e-10)


def test_trajectory_validation():
    with pytest.raises(InvalidInput):
        make_trajectory(np.eye(2), np.eye(2), "XX")
    with pytest.raises(InvalidInput):
        make_trajectory(np.eye(2), np.eye(2), "SR", 1)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_trajectory_endpoints_and_sr_regularity(seed, p):
    rng = np.random.default_rng(seed)
    X, Y = random_spd(rng, p), random_spd(rng, p)
    for scheme in ("SR", "E", "LE", "AI"):
        tr = make_trajectory(X, Y, scheme, 11)
        assert np.abs(np.diff(tr.t)).min() > 0
        assert np.abs(tr.matrices[0] - X).max() < 1e-10 * (1 + np.abs(X).max())
        assert np.abs(tr.matrices[-1] - Y).max() < 1e-10 * (1 + np.abs(Y).max())
    tr = make_trajectory(X, Y, "SR", 11)
    np.testing.assert_allclose(tr.angle, tr.t * tr.angle[-1], atol=1e-9)
    logdet = np.log(tr.det)
    np.testing.assert_allclose(logdet, (1 - tr.t) * logdet[0] + tr.t * logdet[-1], atol=1e-9)


def test_isotropic_angle_is_nan():
    tr = make_trajectory(np.eye(3), np.diag([3.0, 2.0, 1.0]), "E", 5)
    assert math.isnan(tr.angle[0])


def test_effects_constant():
    X = np.diag([3.0, 2.0, 1.0])
    assert effect_report(make_trajectory(X, X, "E")) == (False, False, False)


def test_effects_pure_rotation():
    X, Y = pure_rotation_pair()
    assert effect_report(make_trajectory(X, Y, "SR")) == (False, False, False)
    assert effect_report(make_trajectory(X, Y, "E")).swelling
    for scheme in ("LE", "AI"):
        assert not effect_report(make_trajectory(X, Y, scheme)).swelling
