# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled series summation hot loop.

Keep in lockstep with ``_series_py.py``: same operations, same order, same
libm, so results are bitwise identical between backends.
"""

from libc.math cimport exp, fabs, log, INFINITY, NAN


DEF LOG_HUGE = 690.0
DEF EPS = 2.220446049250313e-16


def eval_series(double[::1] logc, double[::1] sgn, double alpha, double gshift,
                double x, double tail_tol, long max_terms, bint compensated):
    cdef double lw = log(x)
    cdef Py_ssize_t n_avail = logc.shape[0]
    if max_terms < n_avail:
        n_avail = max_terms

    cdef double s = 0.0, comp = 0.0, round_acc = 0.0
    cdef double max_lt = -INFINITY
    cdef double t0 = 0.0, t1 = 0.0, t2 = 0.0
    cdef int small = 0
    cdef double e, lt, t, at, y, tmp, trunc
    cdef Py_ssize_t i
    cdef long k

    for i in range(n_avail):
        k = i + 1
        e = k * alpha + gshift
        lt = logc[i] - e * lw
        if lt > LOG_HUGE:
            return (NAN, INFINITY, INFINITY, lt, k, False)
        if lt > max_lt:
            max_lt = lt
        t = sgn[i] * exp(lt)
        at = fabs(t)
        round_acc += at * (4.0 + fabs(logc[i]) + e * fabs(lw) + 3.2 * k * alpha)

        if compensated:
            y = t - comp
            tmp = s + y
            comp = (tmp - s) - y
            s = tmp
        else:
            s += t

        if i % 3 == 0:
            t0 = at
        elif i % 3 == 1:
            t1 = at
        else:
            t2 = at
        if at <= tail_tol * fabs(s):
            small += 1
            if small >= 3:
                trunc = t0
                if t1 > trunc:
                    trunc = t1
                if t2 > trunc:
                    trunc = t2
                return (s, trunc, EPS * round_acc, max_lt, k, True)
        else:
            small = 0

    trunc = t0
    if t1 > trunc:
        trunc = t1
    if t2 > trunc:
        trunc = t2
    return (s, trunc, EPS * round_acc, max_lt, n_avail, False)


def eval_series_grid(double[::1] logc, double[::1] sgn, double alpha, double gshift,
                     double[::1] xs, double tail_tol, long max_terms, bint compensated):
    cdef Py_ssize_t n = xs.shape[0]
    values = [0.0] * n
    truncs = [0.0] * n
    rounds_ = [0.0] * n
    maxlts = [0.0] * n
    nused = [0] * n
    convs = [False] * n
    cdef Py_ssize_t j
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
