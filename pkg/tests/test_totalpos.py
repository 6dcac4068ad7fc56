"""Kernel minors and the variation-diminishing bound."""

import math

import numpy as np
import pytest

from bellshape import Alpha
from bellshape.chains import chain_laplace, chain_density, exponential_sum_chain
from bellshape.signs import log_grid
from bellshape.totalpos import (
    KernelMatrix,
    build_kernel,
    find_negative_minor_2x2,
    scan_minors,
    stable_density_evaluator,
    vd_bound_check,
)


def test_build_kernel_support_convention():
    km = build_kernel(lambda t: math.exp(-t), [1.0, 2.0], [1.0, 2.0])
    # entries [[f(0), f(-1)], [f(1), f(0)]] with zero extension on t <= 0
    assert km.entries[0, 0] == 0.0
    assert km.entries[0, 1] == 0.0
    assert km.entries[1, 0] == pytest.approx(math.exp(-1.0))
    assert km.entries[1, 1] == 0.0


def test_hand_minor():
    km = KernelMatrix((1.0, 2.0), (1.0, 2.0), np.array([[2.0, 1.0], [1.0, 2.0]]))
    rep = scan_minors(km, order=2)
    assert rep.all_nonnegative
    assert rep.min_minor == pytest.approx(3.0)


def test_exponential_kernel_is_tp():
    pts = log_grid(0.05, 5.0, 30)
    km = build_kernel(lambda t: math.exp(-1.7 * t), pts, pts)
    rep = scan_minors(km, order=4, budget=3000, seed=2)
    assert rep.all_nonnegative


def test_gaussian_bump_kernel_symmetric_positive():
    pts = np.linspace(1.0, 3.0, 12)
    km = build_kernel(lambda t: math.exp(-((t - 2.0) ** 2)), pts, pts + 0.0)
    assert np.all(km.entries >= 0.0)


def test_stable_kernel_not_tp2():
    a = Alpha(0.7)
    pts = log_grid(0.05, 40.0, 36)
    km = build_kernel(stable_density_evaluator(a), pts, pts)
    assert np.all(km.entries >= 0.0)
    w = find_negative_minor_2x2(km)
    assert w is not None
    rows, cols, value = w
    assert value < 0


def test_stable_witness_survives_refinement():
    # refine the grid around a found witness; the violation must persist
    a = Alpha(0.7)
    pts = log_grid(0.05, 40.0, 36)
    f = stable_density_evaluator(a)
    km = build_kernel(f, pts, pts)
    (i1, i2), (j1, j2), _ = find_negative_minor_2x2(km)
    xs = np.geomspace(pts[i1] * 0.98, pts[i2] * 1.02, 8)
    ys = np.geomspace(pts[j1] * 0.98, pts[j2] * 1.02, 8)
    km2 = build_kernel(f, xs, ys)
    assert find_negative_minor_2x2(km2) is not None


def test_expsum_kernel_minors_nonnegative():
    rates = [(k * math.pi) ** 2 for k in range(1, 7)]
    lt = chain_laplace(exponential_sum_chain(rates))
    pts = log_grid(5e-3, 3.0, 30)
    km = build_kernel(lambda t: chain_density(lt, t), pts, pts)
    rep = scan_minors(km, order=4, budget=2000, seed=4)
    assert rep.all_nonnegative


def test_vd_bound_on_tp_kernel():
    rates = [(k * math.pi) ** 2 for k in range(1, 5)]
    lt = chain_laplace(exponential_sum_chain(rates))
    pts = log_grid(5e-3, 3.0, 25)
    km = build_kernel(lambda t: chain_density(lt, t), pts, pts)
    cin, cout = vd_bound_check(km, [1.0, -1.0, 1.0] + [0.0] * 22)
    assert cout <= cin
    rng = np.random.Generator(np.random.PCG64(0))
    for _ in range(25):
        v = rng.standard_normal(25)
        cin, cout = vd_bound_check(km, v)
        assert cout <= cin


def test_vd_identity_kernel_preserves_changes():
    n = 9
    km = KernelMatrix(
        tuple(range(1, n + 1)), tuple(range(1, n + 1)), np.eye(n)
    )
    v = [1.0, -2.0, 3.0, -1.0, 2.0, -2.0, 1.0, 1.0, -5.0]
    cin, cout = vd_bound_check(km, v)
    assert cin == cout


def test_vd_applied_to_chain_derivative_signs():
    # input: (n+1)-th derivative of the partial chain, which has n+1 changes
    n = 2
    rates = [(k * math.pi) ** 2 for k in range(1, n + 5)]
    lt_partial = chain_laplace(exponential_sum_chain(rates[: n + 2]))
    tail_lt = chain_laplace(exponential_sum_chain(rates[n + 2 :]))
    ys = log_grid(5e-3, 2.0, 40)
    km = build_kernel(lambda t: chain_density(tail_lt, t), ys, ys)
    v = [chain_density(lt_partial, y, n + 1) for y in ys]
    cin, cout = vd_bound_check(km, v)
    assert cin == n + 1
    assert cout <= n + 1


def test_scan_rejects_oversized_order():
    km = KernelMatrix((1.0, 2.0), (1.0, 2.0), np.eye(2))
    with pytest.raises(ValueError):
        scan_minors(km, order=3)


def test_minor_report_dict():
    km = KernelMatrix((1.0, 2.0), (1.0, 2.0), np.array([[2.0, 1.0], [1.0, 2.0]]))
    d = scan_minors(km, 2).to_dict()
    assert d["all_nonnegative"] is True
    assert d["witness"] is None
