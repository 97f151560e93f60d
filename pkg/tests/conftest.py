import math
import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from oracles import rotation_about  # noqa: E402

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow],
)
settings.load_profile("default")


CASE_AXIS = np.array([-0.5272, -0.6871, 0.5])


def pure_rotation_pair():
    X = np.diag([15.0, 5.0, 1.0])
    R = rotation_about(CASE_AXIS, math.pi / 3)
    return X, R @ X @ R.T


def pure_scaling_pair():
    return np.diag([15.0, 5.0, 1.0]), np.diag([7.0, 12.0, 8.0])


def continuity_pair(eps):
    X = np.diag([10 + eps, 10 - eps, 1.0])
    R = rotation_about([1.0, 0.0, 0.0], eps * math.pi / 4)
    Y = R @ np.diag([10 - eps, 10 + eps, 1.0]) @ R.T
    return X, Y


def rotated_pair_2x2(eps, theta):
    X = np.diag([math.exp(eps / 2), math.exp(-eps / 2)])
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    return X, R @ X @ R.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --------------------------------------------------------------------------- #
# acceptance summary: one PASS/FAIL line per criterion
# --------------------------------------------------------------------------- #

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(number, title, ok, detail=""):
        _ACCEPTANCE.append((number, title, bool(ok), detail))
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
        print(line + (f" [{detail}]" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))
