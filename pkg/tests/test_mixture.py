import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ipsuncert import (
    ExpDecayProfile,
    MixtureProfile,
    ValidationError,
    contour_tau0,
    delta_lambda,
    equivalent_tau,
    eval_contour,
    eval_lambda,
    eval_lambda_sum,
    eval_sum,
    max_deviation,
    mixture_from_profiles,
)
from ipsuncert.mixture import deviation_residual, golden_section_max

from conftest import mixtures, random_mixture


def grid_scan_max(m, step=1e-3):
    """Brute-force oracle: argmax of the contour-sum gap on a uniform grid."""
    t = np.arange(0.0, 10 * max(m.taus) + step, step)
    w, tau = np.array(m.weights), np.array(m.taus)
    gap = np.exp(-t[:, None] / tau) @ w - np.exp(-t / contour_tau0(m))
    i = int(np.argmax(gap))
    return t[i], gap[i]


def mp_equivalent_tau(m, t):
    mp.mp.dps = 60
    # renormalize: float weights sum to 1 only to ~1e-16, which ln() would amplify at tiny t
    total = mp.fsum(mp.mpf(w) for w in m.weights)
    s = mp.fsum(mp.mpf(w) / total * mp.e ** (-mp.mpf(t) / mp.mpf(x))
                for w, x in zip(m.weights, m.taus))
    return float(-mp.mpf(t) / mp.log(s))


# -- construction ----------------------------------------------------------

def test_ips_weights(ips_mixture):
    assert ips_mixture.total_amplitude == pytest.approx(33.87, abs=0.005)
    assert ips_mixture.weights[0] == pytest.approx(0.7526, abs=5e-5)
    assert ips_mixture.weights[1] == pytest.approx(0.2474, abs=5e-5)


def test_single_and_fig1_construction(fig1_mixture):
    m = mixture_from_profiles([(1.0, ExpDecayProfile(10, 2))])
    assert m.total_amplitude == 10 and m.weights == (1.0,)
    assert fig1_mixture.total_amplitude == 10
    assert fig1_mixture.weights == pytest.approx((0.8, 0.2), abs=1e-15)


def test_zero_weight_entries_dropped():
    m = mixture_from_profiles([(0.0, ExpDecayProfile(5, 1)), (1.0, ExpDecayProfile(3, 2))])
    assert m.taus == (2.0,)


def test_empty_mixture():
    with pytest.raises(ValidationError, match="empty mixture"):
        mixture_from_profiles([(0.0, ExpDecayProfile(5, 1))])
    with pytest.raises(ValidationError):
        mixture_from_profiles([])


@pytest.mark.parametrize("w,tau,a", [
    ((0.5, 0.6), (1, 2), 1.0),
    ((1.0,), (0,), 1.0),
    ((-0.5, 1.5), (1, 2), 1.0),
    ((1.0,), (1,), -1.0),
    ((), (), 1.0),
])
def test_mixture_invariants(w, tau, a):
    with pytest.raises(ValidationError):
        MixtureProfile(w, tau, a)


# -- evaluation examples ---------------------------------------------------

def test_eval_sum_examples(fig1_mixture, ips_mixture):
    assert eval_sum(fig1_mixture, 0) == 0
    assert eval_sum(ips_mixture, 100) == pytest.approx(33.868, abs=1e-6)
    # 10 * (0.8 (1 - e^-1) + 0.2 (1 - e^-2)) at 40 digits
    assert eval_sum(fig1_mixture, 4) == pytest.approx(6.7862939041552364, rel=1e-14)
    assert eval_lambda_sum(fig1_mixture, 4) == pytest.approx(0.67862939041552364, rel=1e-14)


def test_lambda_sum_single_component_collapses():
    m = mixture_from_profiles([(1.0, ExpDecayProfile(3, 1.7))])
    t = np.linspace(0, 20, 50)
    np.testing.assert_allclose(eval_lambda_sum(m, t), eval_lambda(1.7, t), rtol=1e-15)


def test_tau0_examples(fig1_mixture, ips_mixture):
    assert contour_tau0(fig1_mixture) == pytest.approx(10 / 3, rel=1e-15)
    assert contour_tau0(ips_mixture) == pytest.approx(1.79, abs=0.01)
    assert contour_tau0(mixture_from_profiles([(1, ExpDecayProfile(1, 7))])) == 7


def test_equivalent_tau_examples(fig1_mixture):
    assert equivalent_tau(fig1_mixture, 0) == pytest.approx(3.33, abs=0.005)
    single = mixture_from_profiles([(1, ExpDecayProfile(1, 5))])
    np.testing.assert_allclose(equivalent_tau(single, [0, 0.3, 7, 900]), 5, rtol=1e-13)
    # exact value from the 40-digit oracle; convergence to 4 is only O(1/t)
    assert equivalent_tau(fig1_mixture, 100) == pytest.approx(3.9646128880237623, rel=1e-13)
    assert equivalent_tau(fig1_mixture, 100) < 4


@pytest.mark.parametrize("t", [1e-12, 1e-6, 0.01, 1.0, 7.5, 60.0, 1e3, 1e5])
def test_equivalent_tau_against_mpmath(fig1_mixture, ips_mixture, t):
    for m in (fig1_mixture, ips_mixture):
        assert equivalent_tau(m, t) == pytest.approx(mp_equivalent_tau(m, t), rel=1e-12)


def test_equivalent_tau_survives_underflow(fig1_mixture):
    # exp(-t/tau) underflows for every component here
    assert equivalent_tau(fig1_mixture, 1e6) == pytest.approx(mp_equivalent_tau(fig1_mixture, 1e6),
                                                             rel=1e-12)


def test_contour_examples(ips_mixture):
    assert eval_contour(ips_mixture, 0) == 0
    assert eval_contour(ips_mixture, 200) == pytest.approx(33.87, abs=0.005)
    # 33.868 * (1 - exp(-1.79 / tau0)) with the exact tau0 = 1.78612 h
    assert eval_contour(ips_mixture, 1.79) == pytest.approx(21.435712213852470, rel=1e-13)


def test_delta_lambda_examples(ips_mixture):
    assert delta_lambda(ips_mixture, 0) == 0
    single = mixture_from_profiles([(1, ExpDecayProfile(4, 3))])
    assert np.all(delta_lambda(single, np.linspace(0, 30, 40)) == 0)
    assert delta_lambda(ips_mixture, 3) == pytest.approx(0.066724403467078928, rel=1e-12)


def test_delta_lambda_is_contour_minus_sum(ips_mixture):
    t = np.linspace(0, 20, 101)
    expected = eval_contour(ips_mixture, t) / ips_mixture.total_amplitude \
        - eval_lambda_sum(ips_mixture, t)
    np.testing.assert_allclose(delta_lambda(ips_mixture, t), expected, atol=1e-15)


# -- maximum deviation -----------------------------------------------------

def test_max_deviation_ips(ips_mixture):
    rep = max_deviation(ips_mixture)
    assert rep.delta_alpha_star == pytest.approx(2.24, abs=0.1)
    assert rep.t_star == pytest.approx(3.258118388162846, abs=1e-9)
    assert rep.delta_alpha_star == pytest.approx(ips_mixture.total_amplitude * rep.delta_lambda_star)
    assert abs(deviation_residual(ips_mixture, rep.t_star)) <= 1e-9
    t_grid, gap = grid_scan_max(ips_mixture)
    assert abs(rep.t_star - t_grid) <= 1e-3
    assert abs(rep.delta_lambda_star - gap) <= 1e-6
    assert not rep.degenerate


def test_max_deviation_degenerate():
    m = mixture_from_profiles([(1, ExpDecayProfile(4, 3)), (1, ExpDecayProfile(1, 3))])
    rep = max_deviation(m)
    assert (rep.t_star, rep.delta_lambda_star, rep.delta_alpha_star) == (0, 0, 0)
    assert rep.degenerate


def test_golden_section_simple():
    assert golden_section_max(lambda x: -(x - 1.3) ** 2, 0, 5, tol=1e-10) == pytest.approx(1.3, abs=1e-6)


def test_max_deviation_matches_grid_oracle_on_random_mixtures():
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = random_mixture(rng, max_n=4, tau_range=(0.2, 8.0))
        if len(m.taus) < 2:
            continue
        rep = max_deviation(m)
        t_grid, gap = grid_scan_max(m)
        assert abs(rep.t_star - t_grid) <= 1e-3
        assert abs(rep.delta_lambda_star - gap) <= 1e-6
        assert abs(deviation_residual(m, rep.t_star)) <= 1e-9


# -- properties ------------------------------------------------------------

@given(mixtures(), st.floats(1e-6, 500.0))
def test_equivalence(m, t):
    tau_t = equivalent_tau(m, t)
    assert abs(-math.expm1(-t / tau_t) - eval_lambda_sum(m, t)) <= 1e-12


@given(mixtures(), st.floats(0.0, 300.0), st.floats(0.0, 300.0))
def test_equivalent_tau_monotone(m, t1, t2):
    lo, hi = sorted((t1, t2))
    assert equivalent_tau(m, lo) <= equivalent_tau(m, hi) + 1e-10


@given(mixtures())
def test_equivalent_tau_bounds(m):
    assert equivalent_tau(m, 0.0) == contour_tau0(m)
    assert min(m.taus) * (1 - 1e-15) <= contour_tau0(m) <= max(m.taus) * (1 + 1e-15)
    t = 1000 * max(m.taus)
    # tau(t) approaches max tau like tau_max**2 * |ln w_max| / t from below
    w_max = max(w for w, x in zip(m.weights, m.taus) if x == max(m.taus))
    bound = max(m.taus) ** 2 * abs(math.log(w_max)) / t
    assert max(m.taus) - bound - 1e-9 <= equivalent_tau(m, t) <= max(m.taus) * (1 + 1e-12)


@given(mixtures(), st.floats(0.0, 1e4))
def test_contour_dominates_sum(m, t):
    assert delta_lambda(m, t) >= -1e-14
    assert eval_contour(m, t) >= eval_sum(m, t) - 1e-12 * m.total_amplitude


@given(st.floats(0.5, 10.0), st.floats(0.01, 0.9), st.floats(0.01, 0.9))
@settings(max_examples=200)
def test_smaller_rate_spread_gives_smaller_gap(tau0, f1, f2):
    # equal weights with rates 1/tau0 +- d keep the contour coefficient at tau0
    def pair(d):
        r = 1 / tau0
        return MixtureProfile((0.5, 0.5), (1 / (r * (1 + d)), 1 / (r * (1 - d))), 1.0)

    d1, d2 = sorted((f1, f2))
    if d2 - d1 < 1e-3:
        return
    m1, m2 = pair(d1), pair(d2)
    assert contour_tau0(m1) == pytest.approx(tau0, rel=1e-12)
    assert contour_tau0(m2) == pytest.approx(tau0, rel=1e-12)
    assert delta_lambda(m1, tau0) < delta_lambda(m2, tau0)
