import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from quadrature import circle_jacobi_rule, circle_rule, half_line_rule  # noqa: E402


@pytest.fixture(scope="session")
def half_line():
    return half_line_rule(801)


@pytest.fixture(scope="session")
def coarse_half_line():
    return half_line_rule(401)


@pytest.fixture(scope="session")
def transform_rule():
    return half_line_rule(801, scale=np.sqrt(2.0))


@pytest.fixture(scope="session")
def trapezoid():
    return circle_rule(1024)


@pytest.fixture
def jacobi_rule():
    return lambda gamma, n=256: circle_jacobi_rule(n, gamma)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
