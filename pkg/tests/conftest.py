import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from schattenmult.harness.generate import Dims, random_frame, random_riesz, random_symbol
from schattenmult.rng import complex_normal, make_rng

settings.register_profile(
    "desk",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("desk")

FRAME_DIMS = [(2, 1, 3), (4, 1, 6), (3, 2, 1), (5, 2, 2), (6, 2, 3), (9, 3, 2)]
RIESZ_DIMS = [(3, 1, 3), (4, 2, 1), (8, 2, 2), (9, 3, 1)]

seeds = st.integers(min_value=0, max_value=2**31 - 1)
frame_dims = st.sampled_from(FRAME_DIMS).map(lambda t: Dims(*t))
riesz_dims = st.sampled_from(RIESZ_DIMS).map(lambda t: Dims(*t))
exponents = st.floats(min_value=1.0, max_value=8.0, allow_nan=False)


def op(A) -> float:
    return float(np.linalg.norm(A, 2))


def rng_for(seed, name="test"):
    return make_rng(seed, name)


def frame_triple(dims, seed, cond=5.0, riesz=False):
    """``(m, F, G)`` drawn from one stream."""
    rng = rng_for(seed, "triple")
    draw = random_riesz if riesz else random_frame
    F = draw(dims, rng, cond)
    G = draw(dims, rng, cond)
    return random_symbol(dims.n, rng), F, G


@pytest.fixture
def rng():
    return rng_for(12345)


@pytest.fixture
def cnormal(rng):
    return lambda shape: complex_normal(rng, shape)


# acceptance summary: test_acceptance fills this, one line per criterion
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
