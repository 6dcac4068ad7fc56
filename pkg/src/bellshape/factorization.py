"""Additive factorization of the stable exponent lambda^a.

Splitting the Bernstein representation of lambda^a at the integer part of
the spectral weight c_a * u^a (c_a = sin(pi*a)/pi) decomposes X_a into an
independent sum of a completely-monotone-density factor and countably many
exponentials:

    lambda^a = Psi_me(lambda) + sum_{n>=1} log(1 + lambda / kappa_n),

    kappa_n  = (n*pi / sin(pi*a))^(1/a),
    Psi_me   = integral of (1 - e^(-lambda*x)) * l(x) dx,
    l(x)     = integral of frac(c_a * u^a) * e^(-x*u) du,

where frac() is the fractional part.  l is completely monotone, blows up
like 1/(2x) at zero (infinite Levy measure, so the mixture factor has no
atom) and decays like (a / Gamma(1-a)) * x^(-a-1).

Everything here is evaluated by substituting s = c_a * u^a, which makes
the sawtooth breakpoints the integers: each segment [m, m+1] carries a
smooth integrand handled by fixed-node Gauss-Legendre panels with node
doubling, and the tail beyond the last segment splits into an analytic
half (mean of the sawtooth) plus an oscillation remainder bounded by
integration by parts.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np
from scipy.special import zeta

from .errors import QuadratureFailure
from .stable import Alpha


@dataclass(frozen=True)
class RateSequence:
    """First n_terms exponential rates kappa_n, strictly increasing like n^(1/a)."""

    alpha: Alpha
    n_terms: int
    rates: Tuple[float, ...]

    @classmethod
    def build(cls, a: Alpha, n_terms: int) -> "RateSequence":
        if n_terms < 1:
            raise ValueError("n_terms must be >= 1")
        n = np.arange(1, n_terms + 1, dtype=np.float64)
        rates = (n * math.pi / math.sin(math.pi * a.alpha)) ** (1.0 / a.alpha)
        return cls(a, n_terms, tuple(rates.tolist()))


def kappa(a: Alpha, n: int) -> float:
    """n-th factorization rate (n*pi / sin(pi*a))^(1/a)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n * math.pi / math.sin(math.pi * a.alpha)) ** (1.0 / a.alpha)


@dataclass(frozen=True)
class SpectralL:
    """Evaluation state for the spectral function l.

    Segments live between consecutive rates kappa_m (integer crossings of
    c_a * u^a); quadrature refines per-segment until two node counts agree
    to quad_tolerance (relative).
    """

    alpha: Alpha
    quad_tolerance: float = 1e-9
    max_segments: int = 200_000

    def breakpoints(self, m: int) -> np.ndarray:
        n = np.arange(1, m + 1, dtype=np.float64)
        return (n * math.pi / math.sin(math.pi * self.alpha.alpha)) ** (
            1.0 / self.alpha.alpha
        )


@dataclass(frozen=True)
class ExponentIdentityReport:
    alpha: Alpha
    lam: float
    psi_me: float
    psi_sum: float
    tail_correction: float
    residual: float

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.alpha,
            "lambda": self.lam,
            "psi_me": self.psi_me,
            "psi_sum": self.psi_sum,
            "tail_correction": self.tail_correction,
            "residual": self.residual,
        }


# ---------------------------------------------------------------------------
# segment quadrature in s-space
#
# With kappa(s) = (s/c_a)^(1/a) one has du = kappa(s)/(a*s) ds, so
#   l(x)    = (1/a) * sum_m  int_m^(m+1) (s-m) * exp(-x*kappa(s)) * kappa(s)/s ds
#   Psi_me  = (lam/a) * sum_m int_m^(m+1) (s-m) / (s * (kappa(s) + lam)) ds
# and the integrands are smooth on every segment.
# ---------------------------------------------------------------------------

_gauss_cache: dict = {}


def _gauss01(n: int):
    nodes = _gauss_cache.get(n)
    if nodes is None:
        x, w = np.polynomial.legendre.leggauss(n)
        nodes = (0.5 * (x + 1.0), 0.5 * w)
        _gauss_cache[n] = nodes
    return nodes


def _quad_panels(integrand, edges: np.ndarray, rel_tol: float) -> float:
    """Gauss-Legendre over a panel set, doubling nodes until totals agree.

    ``integrand(s)`` maps a 2-D node array to values.
    """
    prev = None
    for n_nodes in (16, 32, 64, 128, 256):
        t, w = _gauss01(n_nodes)
        lo = edges[:-1, None]
        hi = edges[1:, None]
        s = lo + (hi - lo) * t[None, :]
        vals = integrand(s) * (hi - lo)
        total = float(np.sum(vals @ w))
        if prev is not None and abs(total - prev) <= rel_tol * max(abs(total), 1e-300):
            return total
        prev = total
    raise QuadratureFailure(f"panel quadrature did not stabilize to {rel_tol:.1e}")


_S_EDGE = 1e-9  # graded panels for segment 0 start here; callers add the stub


def _segment_sum(
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    m_hi: int,
    rel_tol: float,
) -> float:
    """Integrate sum_{m=0}^{m_hi-1} int_m^(m+1) (s-m)*h(s) ds over [_S_EDGE, m_hi).

    ``integrand(s, frac)`` evaluates frac * h(s) elementwise.  Segment 0 is
    treated on panels graded toward s = 0, where the substituted rate
    kappa(s) = (s/c)^(1/a) is an algebraic power that defeats plain Gauss
    nodes; segments m >= 1 are smooth and run as one batch per node count.
    """
    edges0 = np.geomspace(_S_EDGE, 1.0, 28)
    total = _quad_panels(lambda s: integrand(s, s), edges0, rel_tol)
    if m_hi > 1:
        prev = None
        for n_nodes in (16, 32, 64, 128, 256):
            t, w = _gauss01(n_nodes)
            m = np.arange(1, m_hi, dtype=np.float64)[:, None]
            s = m + t[None, :]
            frac = np.broadcast_to(t[None, :], s.shape)
            vals = integrand(s, frac)
            part = float(np.sum(vals @ w))
            if prev is not None and abs(part - prev) <= rel_tol * max(
                abs(part) + abs(total), 1e-300
            ):
                return total + part
            prev = part
        raise QuadratureFailure(f"segment quadrature did not stabilize to {rel_tol:.1e}")
    return total


def spectral_l(spec: SpectralL, x: float) -> float:
    """Evaluate l(x) = integral of frac(c_a u^a) e^(-xu) du, x > 0."""
    if x <= 0:
        raise ValueError("x must be positive")
    a = spec.alpha.alpha
    c = spec.alpha.c_alpha
    inv_a = 1.0 / a

    def kap(s):
        return (s / c) ** inv_a

    # choose the segment count so the tail remainder is negligible:
    # beyond kappa_M the sawtooth mean contributes exp(-x*kappa_M)/(2x)
    # analytically and the oscillation is bounded by the segment width
    # times the integrand scale.
    m_hi = 4
    while True:
        k_hi = kap(float(m_hi))
        width = kap(float(m_hi + 1)) - k_hi
        osc_bound = 0.5 * width * math.exp(-x * k_hi)
        if x * k_hi > 45.0 or osc_bound < spec.quad_tolerance * 1e-3 / max(x, 1e-300):
            break
        if m_hi >= spec.max_segments:
            raise QuadratureFailure(
                f"tail of l needs more than {spec.max_segments} segments at x={x}"
            )
        m_hi = min(2 * m_hi, spec.max_segments)

    def integrand(s, frac):
        k = kap(s)
        return frac * np.exp(-x * k) * k / (a * s)

    total = _segment_sum(integrand, m_hi, spec.quad_tolerance)
    half_tail = 0.5 * math.exp(-x * kap(float(m_hi))) / x
    return total + half_tail


def me_exponent(spec: SpectralL, lam: float) -> float:
    """Levy exponent of the mixture factor: integral of (1-e^(-lam*x)) l(x) dx.

    Computed in u-space after Fubini: the x-integral against e^(-xu)
    collapses to lam / (u (u + lam)), then the same s-substitution and
    segmentation as for l apply.  Tail beyond the last breakpoint:
    (1/2) log1p(lam/kappa_M) analytically, oscillation folded into the
    tolerance check.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0:
        return 0.0
    a = spec.alpha.alpha
    c = spec.alpha.c_alpha
    inv_a = 1.0 / a

    def kap(s):
        return (s / c) ** inv_a

    m_hi = 4
    while True:
        k_hi = kap(float(m_hi))
        width = kap(float(m_hi + 1)) - k_hi
        osc_bound = 0.5 * width * lam / (k_hi * (k_hi + lam))
        if osc_bound < spec.quad_tolerance * 1e-2:
            break
        if m_hi >= spec.max_segments:
            raise QuadratureFailure(
                f"tail of Psi_me needs more than {spec.max_segments} segments"
            )
        m_hi = min(2 * m_hi, spec.max_segments)

    def integrand(s, frac):
        return frac * lam / (a * s * (kap(s) + lam))

    total = _segment_sum(integrand, m_hi, spec.quad_tolerance)
    # [0, _S_EDGE] stub: the integrand tends to 1/a at s = 0
    total += (_S_EDGE / a) * lam / (lam + kap(_S_EDGE))
    half_tail = 0.5 * math.log1p(lam / kap(float(m_hi)))
    return total + half_tail


def me_exponent_direct(spec: SpectralL, lam: float, n_panels: int = 160) -> float:
    """Validation route for Psi_me: direct x-space quadrature against l.

    Integrates (1 - e^(-lam*x)) l(x) dx on a log-spaced panel set wide
    enough that both tails are negligible; deliberately independent of the
    u-space route so the two can be cross-checked on a spot grid.
    """
    if lam <= 0:
        return 0.0
    a = spec.alpha.alpha
    # left: integrand -> lam/2 as x -> 0 via l ~ 1/(2x); right: l decays
    # like x^-(a+1), so cut where the remaining mass is tiny
    lo = 1e-7
    hi = (1e-11 * math.gamma(1.0 - a)) ** (-1.0 / a)
    edges = np.geomspace(lo, hi, n_panels + 1)
    t, w = _gauss01(10)
    total = 0.0
    for xa, xb in zip(edges[:-1], edges[1:]):
        xs = xa + (xb - xa) * t
        vals = [(-math.expm1(-lam * x)) * spectral_l(spec, x) for x in xs]
        total += (xb - xa) * float(np.dot(vals, w))
    # left stub: integrand -> lam/2 as x -> 0
    total += lo * lam / 2.0
    return total


def expsum_exponent(r: RateSequence, lam: float) -> Tuple[float, float]:
    """Levy exponent of the truncated exponential sum plus a tail estimate.

    value = sum_{n<=N} log(1 + lam/kappa_n); tail bounds the discarded
    remainder by lam * sum_{n>N} kappa_n^(-1), evaluated exactly with the
    Hurwitz zeta function (1/a > 1, so it converges).
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0:
        return 0.0, 0.0
    rates = np.asarray(r.rates)
    value = float(math.fsum(np.log1p(lam / rates).tolist()))
    a = r.alpha.alpha
    c_pow = (math.sin(math.pi * a) / math.pi) ** (1.0 / a)
    tail = lam * c_pow * float(zeta(1.0 / a, r.n_terms + 1))
    return value, tail


def factorization_residual(
    a: Alpha, lam: float, n_rates: int, quad_tolerance: float = 1e-9
) -> ExponentIdentityReport:
    """Assemble lambda^a - Psi_me - Psi_sum - tail; should vanish to tolerance."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    spec = SpectralL(a, quad_tolerance=quad_tolerance)
    psi_me = me_exponent(spec, lam)
    rates = RateSequence.build(a, n_rates)
    psi_sum, tail = expsum_exponent(rates, lam)
    residual = lam**a.alpha - psi_me - psi_sum - tail
    return ExponentIdentityReport(a, lam, psi_me, psi_sum, tail, residual)


def complete_monotonicity_probe(
    f: Callable[[float], float],
    x0: float,
    h: float,
    max_order: int,
    eval_tol: float = 1e-9,
) -> List[bool]:
    """Check (-1)^k Delta_h^k f(x0) >= -tol for k = 0..max_order.

    Finite-difference characterization of complete monotonicity; tol scales
    with the binomial weights times the evaluation accuracy, since the
    alternating sum amplifies per-point error by up to 2^k.
    """
    if x0 <= 0 or h <= 0:
        raise ValueError("x0 and h must be positive")
    vals = [f(x0 + j * h) for j in range(max_order + 1)]
    scale = max(abs(v) for v in vals)
    out = []
    for k in range(max_order + 1):
        acc = 0.0
        for j in range(k + 1):
            acc += (-1.0) ** (k - j) * math.comb(k, j) * vals[j]
        signed = (-1.0) ** k * acc
        tol = (2.0**k) * eval_tol * scale * 8.0
        out.append(signed >= -tol)
    return out
