"""Pure-Python fallback for the series summation hot loop.

Mirrors ``_series_cy.pyx`` operation for operation.  Both backends run the
same double-precision recurrence in the same order against the same libm,
so their outputs are bitwise identical; ``tests/test_kernels.py`` asserts
this whenever the compiled backend is importable.
"""

import math

# exp() overflows just above 709; leave headroom so partial products stay finite
_LOG_HUGE = 690.0

_EPS = 2.220446049250313e-16


def eval_series(logc, sgn, alpha, gshift, x, tail_tol, max_terms, compensated):
    """Sum the power series sum_k sgn[k] * exp(logc[k] - (k*alpha + gshift)*log x).

    ``logc`` and ``sgn`` hold log-magnitudes and signs of the x-independent
    coefficients for k = 1, 2, ...; the caller guarantees len(logc) >= 1.

    Stops once the magnitudes of three consecutive terms fall below
    ``tail_tol`` times the current partial-sum magnitude.  Returns

        (value, trunc_err, round_err, max_log_term, n_used, converged)

    where ``trunc_err`` is the largest of the final three terms,
    ``round_err`` bounds the accumulated floating-point error (driven by
    the size of the exp() arguments, hence by cancellation), and
    ``converged`` is False when the term budget ran out first.  A term
    whose log exceeds the overflow guard aborts with round_err = inf.
    """
    lw = math.log(x)
    n_avail = len(logc)
    if max_terms < n_avail:
        n_avail = max_terms

    s = 0.0
    comp = 0.0
    round_acc = 0.0
    max_lt = -math.inf
    small = 0
    t3 = [0.0, 0.0, 0.0]

    for i in range(n_avail):
        k = i + 1
        e = k * alpha + gshift
        lt = logc[i] - e * lw
        if lt > _LOG_HUGE:
            return (math.nan, math.inf, math.inf, lt, k, False)
        if lt > max_lt:
            max_lt = lt
        t = sgn[i] * math.exp(lt)
        at = abs(t)
        # per-term error model: lgamma/log/sin argument rounding amplified by exp
        round_acc += at * (4.0 + abs(logc[i]) + e * abs(lw) + 3.2 * k * alpha)

        if compensated:
            y = t - comp
            tmp = s + y
            comp = (tmp - s) - y
            s = tmp
        else:
            s += t

        t3[i % 3] = at
        if at <= tail_tol * abs(s):
            small += 1
            if small >= 3:
                trunc = max(t3[0], t3[1], t3[2])
                return (s, trunc, _EPS * round_acc, max_lt, k, True)
        else:
            small = 0

    trunc = max(t3[0], t3[1], t3[2])
    return (s, trunc, _EPS * round_acc, max_lt, n_avail, False)


def eval_series_grid(logc, sgn, alpha, gshift, xs, tail_tol, max_terms, compensated):
    """Vectorized wrapper: apply ``eval_series`` to every point of ``xs``.

    Returns parallel lists (values, trunc_errs, round_errs, max_log_terms,
    n_useds, convergeds).  Exists so the compiled backend can keep the
    whole grid loop in C.
    """
    n = len(xs)
    values = [0.0] * n
    truncs = [0.0] * n
    rounds_ = [0.0] * n
    maxlts = [0.0] * n
    nused = [0] * n
    convs = [False] * n
    for j in range(n):
        v, te, re_, ml, nu, cv = eval_series(
            logc, sgn, alpha, gshift, xs[j], tail_tol, max_terms, compensated
        )
        values[j] = v
        truncs[j] = te
        rounds_[j] = re_
        maxlts[j] = ml
        nused[j] = nu
        convs[j] = cv
    return values, truncs, rounds_, maxlts, nused, convs
