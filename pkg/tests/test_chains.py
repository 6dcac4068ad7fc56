"""Exponential convolution chains: exact transforms, densities, profiles."""

import math
from fractions import Fraction

import pytest
from scipy.integrate import quad

from bellshape.chains import (
    ChainSpec,
    ExpMixture,
    boundary_signs,
    chain_density,
    chain_density_with_err,
    chain_laplace,
    default_chain,
    default_mixture,
    expected_profile,
    exponential_sum_chain,
    verify_wbs,
)
from bellshape.errors import DegeneratePoles
from bellshape.signs import Sign, pattern_a, pattern_b


def _exp1_chain(rates):
    return ChainSpec(base=ExpMixture(components=((1, 1),)), exp_rates=tuple(rates))


def test_hand_partial_fractions():
    # Exp(1) + Exp(2): transform 2/((1+s)(2+s)), density 2(e^-x - e^-2x)
    lt = chain_laplace(_exp1_chain([2]))
    for x in (0.2, 0.7, 1.9):
        assert chain_density(lt, x) == pytest.approx(
            2 * (math.exp(-x) - math.exp(-2 * x)), rel=1e-13
        )
    # unique critical point at ln 2
    assert chain_density(lt, math.log(2.0), 1) == pytest.approx(0.0, abs=1e-14)


def test_empty_chain_is_mixture():
    mix = ExpMixture(components=((Fraction(1, 2), 3), (Fraction(1, 2), 5)))
    lt = chain_laplace(ChainSpec(base=mix, exp_rates=()))
    for x in (0.1, 1.0):
        want = 0.5 * 3 * math.exp(-3 * x) + 0.5 * 5 * math.exp(-5 * x)
        assert chain_density(lt, x) == pytest.approx(want, rel=1e-13)


def test_transform_normalized_at_zero():
    lt = chain_laplace(default_chain(3))
    assert lt.transform(0.0) == pytest.approx(1.0, abs=1e-12)


def test_repeated_rates_polynomial_factors():
    # Exp(1) + Exp(2) + Exp(2): density 4(e^-x - e^-2x - x e^-2x)
    lt = chain_laplace(_exp1_chain([2, 2]))
    for x in (0.4, 1.3, 3.0):
        want = 4 * (math.exp(-x) - math.exp(-2 * x) - x * math.exp(-2 * x))
        assert chain_density(lt, x) == pytest.approx(want, rel=1e-12)


def test_mixture_rate_coincides_with_chain_rate():
    # Exp(2) base plus Exp(2) factor: density 4x e^-2x
    spec = ChainSpec(base=ExpMixture(components=((1, 2),)), exp_rates=(2,))
    lt = chain_laplace(spec)
    for x in (0.25, 1.0):
        assert chain_density(lt, x) == pytest.approx(4 * x * math.exp(-2 * x), rel=1e-12)


def test_density_matches_brute_force_convolution():
    # ME* base with two atoms plus one exponential, against direct quadrature
    mix = ExpMixture(components=((Fraction(1, 3), 1), (Fraction(2, 3), 4)))
    spec = ChainSpec(base=mix, exp_rates=(2,))
    lt = chain_laplace(spec)

    def f0(y):
        return (1 / 3) * 1 * math.exp(-y) + (2 / 3) * 4 * math.exp(-4 * y)

    for x in (0.3, 1.0, 2.5):
        conv, _ = quad(lambda y: f0(y) * 2 * math.exp(-2 * (x - y)), 0.0, x)
        assert chain_density(lt, x) == pytest.approx(conv, rel=1e-8)


def test_two_step_brute_force_convolution():
    spec = _exp1_chain([2, 3])
    lt = chain_laplace(spec)
    lt1 = chain_laplace(_exp1_chain([2]))
    for x in (0.5, 1.5):
        conv, _ = quad(
            lambda y: chain_density(lt1, y) * 3 * math.exp(-3 * (x - y)), 0.0, x
        )
        assert chain_density(lt, x) == pytest.approx(conv, rel=1e-8)


def test_ode_recursion_pointwise():
    # f_n' + l_n f_n = l_n f_{n-1} at random points
    rates = [1.5, 2.5, 6.0]
    full = chain_laplace(_exp1_chain(rates))
    prev = chain_laplace(_exp1_chain(rates[:-1]))
    ln = rates[-1]
    for x in (0.17, 0.9, 2.2, 5.1):
        resid = (
            chain_density(full, x, 1)
            + ln * chain_density(full, x)
            - ln * chain_density(prev, x)
        )
        scale = abs(ln * chain_density(prev, x)) + 1.0
        assert abs(resid) < 1e-11 * scale


def test_transform_density_consistency():
    lt = chain_laplace(default_chain(2))
    for s in (0.0, 0.3, 1.0, 3.0, 7.5, 20.0):
        num, _ = quad(
            lambda x: chain_density(lt, x) * math.exp(-s * x), 0.0, 80.0, limit=400
        )
        assert num == pytest.approx(lt.transform(s), abs=1e-9)


def test_exact_path_matches_float_path():
    mix_exact = ExpMixture(
        components=((Fraction(1, 2), Fraction(1)), (Fraction(1, 2), Fraction(3)))
    )
    mix_float = ExpMixture(components=((0.5, 1.0), (0.5, 3.0)))
    lt_e = chain_laplace(ChainSpec(base=mix_exact, exp_rates=(Fraction(2), Fraction(2))))
    lt_f = chain_laplace(ChainSpec(base=mix_float, exp_rates=(2.0, 2.0)))
    assert lt_e.exact and not lt_f.exact
    for x in (0.3, 1.0, 4.0):
        for order in (0, 1, 3):
            assert chain_density(lt_e, x, order) == pytest.approx(
                chain_density(lt_f, x, order), rel=1e-10
            )


def test_boundary_signs_one_factor():
    spec = _exp1_chain([2])
    signs = boundary_signs(spec, 3)
    assert signs[0] is Sign.ZERO
    assert signs[1] is Sign.PLUS
    assert signs[2] is Sign.MINUS
    assert signs[3] is Sign.PLUS


def test_boundary_signs_exact_zero_block():
    spec = ChainSpec(base=default_mixture(), exp_rates=(Fraction(2), Fraction(5)))
    signs = boundary_signs(spec, 4)
    assert signs[0] is Sign.ZERO
    assert signs[1] is Sign.ZERO
    assert signs[2] is Sign.PLUS
    assert signs[3] is Sign.MINUS


def test_expected_profiles():
    assert expected_profile(2, 0) == pattern_a(0)
    assert expected_profile(2, 1) == pattern_a(1)
    assert expected_profile(2, 2) == pattern_b(2)
    assert expected_profile(2, 3) == pattern_b(2).negated()
    assert expected_profile(1, 1) == pattern_b(1)
    assert expected_profile(1, 2) == pattern_b(1).negated()


def test_verify_wbs_single_factor():
    rep = verify_wbs(_exp1_chain([2]), 3)
    assert rep.all_pass
    assert str(rep.profiles[1].observed) == "+0-0"
    assert str(rep.profiles[2].observed) == "-0+0"


def test_verify_wbs_three_component_base():
    spec = ChainSpec(base=default_mixture(), exp_rates=(1.0, 2.0, 3.0))
    rep = verify_wbs(spec, 4)
    assert rep.all_pass
    for i in (0, 1, 2):
        assert rep.profiles[i].observed == pattern_a(i)


def test_wbs_disjointness():
    # profiles of an n-factor chain never satisfy the order-m expectation
    # set for m != n-1
    spec = default_chain(2)
    rep = verify_wbs(spec, 4)
    observed = {p.order: p.observed for p in rep.profiles}
    for m in (1, 3):  # wrong chain orders
        hit = all(observed[i] == expected_profile(m, i) for i in observed)
        assert not hit


def test_zero_counts_follow_patterns():
    spec = default_chain(3)
    rep = verify_wbs(spec, 6)
    assert rep.all_pass
    for p in rep.profiles:
        want = p.order if p.order <= 2 else 3
        assert len(p.zero_set.zeros) == want


def test_mixture_validation():
    with pytest.raises(ValueError):
        ExpMixture(components=((0.5, 1.0), (0.6, 2.0)))  # weights sum > 1
    with pytest.raises(DegeneratePoles):
        ExpMixture(components=((0.5, 1.0), (0.5, 1.0)))  # duplicate rates
    with pytest.raises(ValueError):
        ExpMixture(components=((1.0, -1.0),))


def test_chain_rate_order_enforced():
    with pytest.raises(ValueError):
        ChainSpec(base=default_mixture(), exp_rates=(3.0, 1.0))


def test_exponential_sum_chain_density():
    spec = exponential_sum_chain([1.0, 2.0])
    lt = chain_laplace(spec)
    assert chain_density(lt, 0.9) == pytest.approx(
        2 * (math.exp(-0.9) - math.exp(-1.8)), rel=1e-12
    )


def test_err_estimate_positive_and_value_consistent():
    lt = chain_laplace(default_chain(3))
    v, e = chain_density_with_err(lt, 0.5, 2)
    assert math.isfinite(v) and e > 0
    assert v == chain_density(lt, 0.5, 2)
