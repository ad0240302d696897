import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kfredholm.module import CompactElement, ModuleVector
from kfredholm.operators import AdjointableOp

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def cmat(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)


@st.composite
def module_setup(draw, max_d=6, max_m=8):
    """(rng, d, m) with a reproducible generator."""
    seed = draw(seeds)
    d = draw(st.integers(1, max_d))
    m = draw(st.integers(1, max_m))
    return np.random.default_rng(seed), d, m


def rand_vector(rng, d, m):
    return ModuleVector(cmat(rng, d, m))


def rand_element(rng, d):
    return CompactElement(cmat(rng, d, d))


def rand_op(rng, d, m):
    return AdjointableOp(d, m, cmat(rng, m, m))


def rand_projection(rng, d):
    u = cmat(rng, d)
    u /= np.linalg.norm(u)
    return CompactElement(np.outer(u, u.conj()))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
