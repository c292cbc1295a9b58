import os
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

warnings.filterwarnings("ignore", message=".*TBB.*")

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from stablelat import GaussBump, IndicatorBox, LinearCombination  # noqa: E402

THETAS = np.round(np.arange(-30, 31) / 10.0, 10)

# criterion lines reported at the end of the run
ACCEPTANCE_LINES: list[str] = []


def ecf_distance(x, alpha, sigma=1.0, thetas=THETAS):
    """Sup over the theta grid of |ECF - exp(-|sigma theta|^alpha)|, written out directly."""
    x = np.asarray(x, dtype=float)
    ecf = np.array([np.mean(np.exp(1j * t * x)) for t in thetas])
    return float(np.max(np.abs(ecf - np.exp(-np.abs(sigma * thetas) ** alpha))))


@pytest.fixture
def unit_box():
    return IndicatorBox((0.0,), (1.0,))


@pytest.fixture
def gauss():
    return GaussBump((0.0,), 1.0)


@pytest.fixture
def two_box():
    return LinearCombination(((2.0, IndicatorBox((0.0,), (1.0,))),
                              (-1.0, IndicatorBox((0.5,), (1.5,)))))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
