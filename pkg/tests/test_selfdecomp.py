"""Inverse Gamma powers, log-Beta laws, Monte Carlo factorization."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from bellshape.selfdecomp import (
    InvGammaPower,
    LogBetaExample,
    SpectralFunction,
    conjecture2_probe,
    integer_alpha_factorization_mc,
    inv_gamma_power_derivative,
    ks_distance,
    log_beta_density,
    spectral_k,
    verify_invgamma_bellshape,
)


HALF_INV_GAMMA = InvGammaPower(Fraction(1, 2), 1)


def test_invgamma_density_value():
    # inverse Gamma(1/2) at 1: exp(-1)/sqrt(pi)
    assert inv_gamma_power_derivative(HALF_INV_GAMMA, 1.0, 0) == pytest.approx(
        math.exp(-1.0) / math.sqrt(math.pi), rel=1e-13
    )


def test_invgamma_mode():
    assert inv_gamma_power_derivative(HALF_INV_GAMMA, 2.0 / 3.0, 1) == pytest.approx(
        0.0, abs=1e-14
    )


def test_invgamma_positive():
    for x in (0.05, 0.5, 3.0, 50.0):
        assert inv_gamma_power_derivative(HALF_INV_GAMMA, x, 0) > 0


def test_invgamma_integrates_to_one():
    for p in (HALF_INV_GAMMA, InvGammaPower(2, 1), InvGammaPower(Fraction(1, 2), 2)):
        total, _ = quad(
            lambda x: inv_gamma_power_derivative(p, x, 0), 0.0, np.inf, limit=400
        )
        assert total == pytest.approx(1.0, abs=1e-10)


def test_invgamma_derivative_vs_finite_difference():
    p = InvGammaPower(2, 1)
    for n in (1, 2, 3):
        for x in (0.5, 1.5):
            h = 1e-6 * x
            fd = (
                inv_gamma_power_derivative(p, x + h, n - 1)
                - inv_gamma_power_derivative(p, x - h, n - 1)
            ) / (2 * h)
            assert inv_gamma_power_derivative(p, x, n) == pytest.approx(fd, rel=1e-6)


def test_invgamma_bellshape_counts():
    assert verify_invgamma_bellshape(HALF_INV_GAMMA, 4).zero_counts == (1, 2, 3, 4)
    assert verify_invgamma_bellshape(InvGammaPower(2, 1), 3).zero_counts == (1, 2, 3)
    assert verify_invgamma_bellshape(InvGammaPower(Fraction(1, 2), 2), 2).zero_counts == (1, 2)


def test_invgamma_validation():
    with pytest.raises(ValueError):
        InvGammaPower(-1, 1)
    with pytest.raises(ValueError):
        InvGammaPower(1, 0.5)


def test_logbeta_density_closed_form():
    e = LogBetaExample(1, 2)
    for x in (0.2, 0.9, 2.5):
        u = math.exp(-x)
        assert log_beta_density(e, x) == pytest.approx(2 * u * (1 - u), rel=1e-12)


def test_logbeta_mode_at_log2():
    e = LogBetaExample(1, 2)
    assert log_beta_density(e, math.log(2.0), 1) == pytest.approx(0.0, abs=1e-14)


def test_logbeta_vanishes_at_origin():
    e = LogBetaExample(1.0, 2.5)
    assert log_beta_density(e, 1e-9) < 1e-8


def test_logbeta_integrates_to_one():
    for a, b in ((1, 2), (2.0, 2.5), (1.0, 4.5)):
        e = LogBetaExample(a, b)
        total, _ = quad(lambda x: log_beta_density(e, x), 0.0, np.inf, limit=300)
        assert total == pytest.approx(1.0, abs=1e-10)


def test_logbeta_derivative_vs_finite_difference():
    e = LogBetaExample(1.0, 4.5)
    for n in (1, 2, 3, 4):
        for x in (0.4, 1.2):
            h = 1e-6
            fd = (
                log_beta_density(e, x + h, n - 1) - log_beta_density(e, x - h, n - 1)
            ) / (2 * h)
            assert log_beta_density(e, x, n) == pytest.approx(fd, rel=1e-6)


def test_spectral_k_limit():
    e = LogBetaExample(1, 3)
    assert spectral_k(e, 1e-12) == pytest.approx(3.0, abs=1e-9)
    assert spectral_k(e, 50.0) < 1e-20


def test_spectral_k_nonincreasing():
    e = LogBetaExample(0.7, 2.6)
    xs = np.geomspace(1e-6, 20.0, 200)
    vals = [spectral_k(e, float(x)) for x in xs]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_spectral_function_wrapper():
    sf = SpectralFunction.from_log_beta(LogBetaExample(1.2, 3.4))
    assert sf.k_zero_plus == pytest.approx(3.4)
    assert sf(1e-10) == pytest.approx(3.4, abs=1e-8)
    assert sf.nonincreasing_on(np.geomspace(1e-5, 10.0, 100))


def test_conjecture2_examples():
    assert conjecture2_probe(LogBetaExample(1.0, 4.5), 3).all_pass
    assert conjecture2_probe(LogBetaExample(2.0, 2.5), 1).all_pass
    assert conjecture2_probe(LogBetaExample(1.0, 1.5), 0).all_pass


def test_conjecture2_requires_b_margin():
    with pytest.raises(ValueError):
        conjecture2_probe(LogBetaExample(1.0, 2.0), 2)


def test_logbeta_validation():
    with pytest.raises(ValueError):
        LogBetaExample(0.0, 2.0)
    with pytest.raises(ValueError):
        LogBetaExample(1.0, 1.0)


def test_gamma_sampling_moments():
    rng = np.random.Generator(np.random.PCG64(3))
    for t in (0.5, 2.0):
        g = rng.gamma(t, 1.0, 200_000)
        se_mean = math.sqrt(t / len(g))
        assert abs(float(np.mean(g)) - t) < 4 * se_mean


def test_ks_distance_identical_samples():
    x = np.array([1.0, 2.0, 3.0])
    assert ks_distance(x, x) == 0.0


def test_mc_factorization_small():
    d2, ok2 = integer_alpha_factorization_mc(2, 100_000, seed=21)
    assert ok2, d2
    d3, ok3 = integer_alpha_factorization_mc(3, 100_000, seed=21)
    assert ok3, d3


def test_mc_mismatched_laws_fail():
    # X_{1/3} against the n=2 product must show a large KS distance
    from bellshape import Alpha, sample_stable

    x3 = sample_stable(Alpha(1.0 / 3.0), 50_000, seed=5)
    rng = np.random.Generator(np.random.PCG64(6))
    prod2 = 2.0 ** (-2) / rng.gamma(0.5, 1.0, 50_000)
    assert ks_distance(x3, prod2) > 0.05


def test_mc_validation():
    with pytest.raises(ValueError):
        integer_alpha_factorization_mc(1, 100_000, seed=0)
    with pytest.raises(ValueError):
        integer_alpha_factorization_mc(2, 100, seed=0)
