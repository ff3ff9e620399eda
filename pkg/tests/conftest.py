import numpy as np
import pytest
from hypothesis import strategies as st

from ipsuncert import ExpDecayProfile, mixture_from_profiles, MixtureProfile

WIND = ExpDecayProfile(31.86, 2.67)
SOLAR = ExpDecayProfile(41.90, 0.89)


@pytest.fixture
def ips_mixture():
    return mixture_from_profiles([(0.8, WIND), (0.2, SOLAR)])


@pytest.fixture
def fig1_mixture():
    return mixture_from_profiles([(1.0, ExpDecayProfile(8, 4)), (1.0, ExpDecayProfile(2, 2))])


def random_mixture(rng, max_n=5, tau_range=(0.1, 50.0)):
    n = int(rng.integers(1, max_n + 1))
    w = rng.dirichlet(np.ones(n))
    w = np.maximum(w, 1e-6)
    w = w / w.sum()
    taus = rng.uniform(*tau_range, size=n)
    return MixtureProfile(tuple(w / w.sum()), tuple(taus), float(rng.uniform(1, 50)))


@st.composite
def mixtures(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    taus = draw(st.lists(st.floats(0.1, 50.0), min_size=n, max_size=n))
    amp = draw(st.floats(0.1, 100.0))
    total = sum(raw)
    return mixture_from_profiles([(r / total, ExpDecayProfile(amp, tau))
                                  for r, tau in zip(raw, taus)])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
