"""Sign counting, pattern machinery, and zero location."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from bellshape import Alpha, AmbiguousZero, closed_form_half
from bellshape.signs import (
    Grid,
    Sign,
    SignPattern,
    count_sign_changes_closed,
    count_sign_changes_open,
    locate_zeros,
    log_grid,
    match_pattern,
    pattern_a,
    pattern_b,
    sign_of,
    verify_bell_shape,
    zeros_interlace,
)


def test_sign_of():
    assert sign_of(-3.0, 0.0) is Sign.MINUS
    assert sign_of(0.0, 0.0) is Sign.ZERO
    assert sign_of(5e-13, 1e-12) is Sign.ZERO
    assert sign_of(2.0, 1.0) is Sign.PLUS
    with pytest.raises(ValueError):
        sign_of(1.0, -1e-3)


def test_open_count_examples():
    assert count_sign_changes_open([1, 0, -2, 3]) == 2
    assert count_sign_changes_open([1, 2, 3]) == 0
    assert count_sign_changes_open([-1, 1, -1, 1]) == 3


def test_closed_count_examples():
    assert count_sign_changes_closed([1, 0, 1]) == 2
    assert count_sign_changes_closed([1, -1]) == 1
    assert count_sign_changes_closed([0, 0]) == 1
    assert count_sign_changes_closed([0]) == 0


def test_counts_reject_empty():
    with pytest.raises(ValueError):
        count_sign_changes_open([])
    with pytest.raises(ValueError):
        count_sign_changes_closed([])


def _brute_closed(vals):
    import itertools

    zero_idx = [i for i, v in enumerate(vals) if v == 0]
    best = 0
    for assign in itertools.product((1, -1), repeat=len(zero_idx)):
        signs = []
        it = iter(assign)
        for v in vals:
            if v == 0:
                signs.append(next(it))
            else:
                signs.append(1 if v > 0 else -1)
        best = max(best, sum(1 for a, b in zip(signs, signs[1:]) if a != b))
    return best


@given(st.lists(st.sampled_from([-2, -1, 0, 1, 2]), min_size=1, max_size=9))
@settings(max_examples=300, deadline=None)
def test_closed_count_matches_bruteforce(vals):
    assert count_sign_changes_closed(vals) == _brute_closed(vals)


@given(st.lists(st.sampled_from([-2, -1, 0, 1, 3]), min_size=1, max_size=12))
@settings(max_examples=300, deadline=None)
def test_open_le_closed(vals):
    assert count_sign_changes_open(vals) <= count_sign_changes_closed(vals)


def test_patterns():
    assert str(pattern_a(0)) == "0+0"
    assert str(pattern_a(1)) == "0+0-0"
    assert str(pattern_a(2)) == "0+0-0+0"
    assert str(pattern_b(1)) == "+0-0"
    assert str(pattern_b(2)) == "+0-0+0"
    assert str(pattern_b(1).negated()) == "-0+0"


def test_pattern_rejects_consecutive_duplicates():
    with pytest.raises(ValueError):
        SignPattern((Sign.PLUS, Sign.PLUS))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(points=())
    with pytest.raises(ValueError):
        Grid(points=(0.0, 1.0))
    with pytest.raises(ValueError):
        Grid(points=(1.0, 1.0))


def test_locate_zeros_on_half_derivative():
    g = Grid(points=log_grid(0.01, 30.0, 800))
    zs = locate_zeros(lambda x: closed_form_half(x, 1), g, boundary=(Sign.ZERO, Sign.ZERO))
    assert len(zs.zeros) == 1
    assert zs.zeros[0][0] == pytest.approx(1.0 / 6.0, abs=1e-6)
    assert match_pattern(zs, pattern_a(1))


def test_locate_zeros_on_half_second_derivative():
    g = Grid(points=log_grid(0.01, 30.0, 800))
    zs = locate_zeros(lambda x: closed_form_half(x, 2), g, boundary=(Sign.ZERO, Sign.ZERO))
    assert len(zs.zeros) == 2
    assert zs.zeros[0][0] == pytest.approx(1.0 / (10.0 + 2.0 * math.sqrt(10.0)), abs=1e-6)
    assert zs.zeros[1][0] == pytest.approx(1.0 / (10.0 - 2.0 * math.sqrt(10.0)), abs=1e-6)
    assert match_pattern(zs, pattern_a(2))


def test_locate_zeros_constant():
    g = Grid(points=log_grid(0.5, 2.0, 50))
    zs = locate_zeros(lambda x: 1.0, g)
    assert len(zs.zeros) == 0
    assert zs.sign_profile == SignPattern((Sign.PLUS,))


def test_locate_zeros_negated_function_flips_profile():
    g = Grid(points=log_grid(0.01, 30.0, 600))
    zp = locate_zeros(lambda x: closed_form_half(x, 1), g, boundary=(Sign.ZERO, Sign.ZERO))
    zn = locate_zeros(lambda x: -closed_form_half(x, 1), g, boundary=(Sign.ZERO, Sign.ZERO))
    assert len(zp.zeros) == len(zn.zeros) == 1
    assert zn.zeros[0][0] == pytest.approx(zp.zeros[0][0], rel=1e-10)
    assert zn.sign_profile == zp.sign_profile.negated()


def test_locate_zeros_stable_under_refinement():
    g1 = Grid(points=log_grid(0.01, 30.0, 500))
    g2 = Grid(points=log_grid(0.01, 30.0, 2000))
    z1 = locate_zeros(lambda x: closed_form_half(x, 2), g1, boundary=(Sign.ZERO, Sign.ZERO))
    z2 = locate_zeros(lambda x: closed_form_half(x, 2), g2, boundary=(Sign.ZERO, Sign.ZERO))
    assert z1.sign_profile == z2.sign_profile
    for (a, _), (b, _) in zip(z1.zeros, z2.zeros):
        assert a == pytest.approx(b, rel=1e-9)


def test_tangential_zero_raises_with_plain_tolerance():
    # (x-1)^2 touches zero; a plain-tolerance scan must refuse to guess
    g = Grid(points=tuple(0.5 + 0.01 * i for i in range(101)), zero_tolerance=1e-7)
    with pytest.raises(AmbiguousZero):
        locate_zeros(lambda x: (x - 1.0) ** 2, g)


def test_all_zero_function_raises():
    g = Grid(points=log_grid(0.5, 2.0, 20))
    with pytest.raises(AmbiguousZero):
        locate_zeros(lambda x: 0.0, g)


def test_verify_bell_shape_half_order2():
    rep = verify_bell_shape(Alpha(0.5), 2)
    assert rep.all_pass
    assert [r.zero_count for r in rep.per_order] == [1, 2]
    assert rep.per_order[0].zero_set.zeros[0][0] == pytest.approx(1 / 6, abs=1e-6)


def test_bell_shape_zeros_interlace():
    rep = verify_bell_shape(Alpha(0.5), 3)
    assert rep.all_pass
    for outer, inner in zip(rep.per_order, rep.per_order[1:]):
        assert zeros_interlace(outer.zero_set, inner.zero_set)


def test_report_serialization_roundtrip():
    rep = verify_bell_shape(Alpha(0.5), 1)
    d = rep.to_dict()
    assert d["alpha"] == 0.5
    assert d["orders"][0]["zero_count"] == 1
    rows = rep.to_csv_rows()
    assert rows[0][0] == "alpha"
    assert len(rows) == 2  # header + one zero
