"""Exponential convolution chains over a finite exponential mixture.

The sum X + Exp(l_1) + ... + Exp(l_n), with X a finite mixture of
exponentials (completely monotone density) and nondecreasing rates, has a
rational Laplace transform

    F(s) = [ sum_i w_i t_i / (t_i + s) ] * prod_j l_j / (l_j + s),

so the density and every derivative are exact finite combinations
poly(x) * exp(-rate * x), obtained here by partial fractions with full
multiplicity bookkeeping.  Coefficient arithmetic runs over Fractions
when every input rate and weight is rational (the oracle path) and over
floats otherwise.

These chains are the weak-bell-shape laboratory: with n exponential
factors the density's i-th derivative follows the a_i profile for
i <= n-1 and the sign-adjusted b_n profile beyond, which verify_wbs
checks zero by zero.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .errors import DegeneratePoles
from .signs import (
    Grid,
    Sign,
    SignPattern,
    ZeroSet,
    locate_zeros,
    log_grid,
    pattern_a,
    pattern_b,
)

_EPS = 2.220446049250313e-16


def _is_rational(v) -> bool:
    return isinstance(v, (int, Fraction))


@dataclass(frozen=True)
class ExpMixture:
    """Finite exponential mixture with positive weights summing to one."""

    components: Tuple[Tuple[object, object], ...]  # (weight, rate) pairs

    def __post_init__(self):
        comps = tuple((w, r) for w, r in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        rates = [r for _, r in comps]
        if len(set(float(r) for r in rates)) != len(rates):
            raise DegeneratePoles("mixture rates must be distinct")
        for w, r in comps:
            if not (float(w) > 0 and float(r) > 0):
                raise ValueError("weights and rates must be positive")
        total = math.fsum(float(w) for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total}")
        object.__setattr__(self, "components", comps)

    @property
    def exact(self) -> bool:
        return all(_is_rational(w) and _is_rational(r) for w, r in self.components)

    def density(self, x: float) -> float:
        return math.fsum(
            float(w) * float(r) * math.exp(-float(r) * x) for w, r in self.components
        )


@dataclass(frozen=True)
class ChainSpec:
    base: ExpMixture
    exp_rates: Tuple[object, ...]

    def __post_init__(self):
        rates = tuple(self.exp_rates)
        vals = [float(r) for r in rates]
        if any(v <= 0 for v in vals):
            raise ValueError("exponential rates must be positive")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("exponential rates must be nondecreasing")
        object.__setattr__(self, "exp_rates", rates)

    @property
    def n(self) -> int:
        return len(self.exp_rates)

    @property
    def exact(self) -> bool:
        return self.base.exact and all(_is_rational(r) for r in self.exp_rates)


# ---------------------------------------------------------------------------
# polynomial helpers over Fraction or float coefficients (low-to-high degree)
# ---------------------------------------------------------------------------


def _poly_mul(p, q):
    out = [0 * (p[0] * q[0])] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _poly_shift(p, p0):
    """Coefficients of P(p0 + t) as a polynomial in t."""
    out = [p[0] * 0] * len(p)
    for i, a in enumerate(p):
        for j in range(i + 1):
            out[j] = out[j] + a * math.comb(i, j) * p0 ** (i - j)
    return out


def _series_inv(d, m):
    """First m coefficients of 1/D(t) given D(0) != 0."""
    inv0 = 1 / d[0]
    out = [inv0]
    for k in range(1, m):
        acc = d[0] * 0
        for j in range(1, min(k, len(d) - 1) + 1):
            acc = acc + d[j] * out[k - j]
        out.append(-inv0 * acc)
    return out


@dataclass(frozen=True)
class RationalLT:
    """Partial-fraction data of a chain transform and its inverse.

    ``poles`` holds (rate, multiplicity) with rate > 0 (pole at s = -rate);
    ``residues`` the matching coefficient lists r[m] of (s + rate)^-(m+1);
    ``inverse_polys`` per-pole polynomials p(x) with density contribution
    p(x) * exp(-rate*x).  ``factors`` keeps the exact factored transform
    for direct evaluation.
    """

    poles: Tuple[Tuple[object, int], ...]
    residues: Tuple[Tuple[object, ...], ...]
    inverse_polys: Tuple[Tuple[object, ...], ...]
    mixture: Tuple[Tuple[object, object], ...]
    chain_rates: Tuple[object, ...]
    exact: bool

    def transform(self, s: float) -> float:
        """F(s) from the factored form; F(0) = 1."""
        mix = math.fsum(
            float(w) * float(r) / (float(r) + s) for w, r in self.mixture
        )
        prod = 1.0
        for lam in self.chain_rates:
            prod *= float(lam) / (float(lam) + s)
        return mix * prod

    @property
    def pole_locations(self) -> Tuple[float, ...]:
        return tuple(-float(r) for r, _ in self.poles)


def chain_laplace(spec: ChainSpec) -> RationalLT:
    """Exact partial-fraction decomposition of the chain transform."""
    exact = spec.exact
    if exact:
        mix = [(Fraction(w), Fraction(r)) for w, r in spec.base.components]
        lams = [Fraction(r) for r in spec.exp_rates]
        one = Fraction(1)
    else:
        mix = [(float(w), float(r)) for w, r in spec.base.components]
        lams = [float(r) for r in spec.exp_rates]
        one = 1.0

    # group equal pole locations (mixture rates are distinct; chain rates
    # may repeat and may coincide with mixture rates)
    locations = []
    for _, r in mix:
        locations.append(r)
    locations.extend(lams)
    groups = []
    for r in locations:
        for g in groups:
            if g[0] == r:
                g[1] += 1
                break
        else:
            groups.append([r, 1])

    # numerator polynomial in s:
    #   N(s) = (sum_i w_i t_i prod_{i'!=i} (t_{i'} + s)) * prod_j l_j
    num = [one * 0]
    for i, (w, t) in enumerate(mix):
        term = [w * t]
        for i2, (_, t2) in enumerate(mix):
            if i2 != i:
                term = _poly_mul(term, [t2, one])
        if len(term) > len(num):
            num, term = term, num
        for j, c in enumerate(term):
            num[j] = num[j] + c
    lam_const = one
    for lam in lams:
        lam_const = lam_const * lam
    num = [c * lam_const for c in num]

    poles = []
    residues = []
    inverse_polys = []
    for rate, mult in groups:
        # remaining denominator D~(s) = prod of all factors except (rate+s)^mult
        dt = [one]
        for _, t in mix:
            if t != rate:
                dt = _poly_mul(dt, [t, one])
        for lam in lams:
            if lam != rate:
                dt = _poly_mul(dt, [lam, one])
        # expand around s = -rate: s = -rate + t
        num_sh = _poly_shift(num, -rate)
        dt_sh = _poly_shift(dt, -rate)
        if float(dt_sh[0]) == 0.0:
            raise DegeneratePoles(f"denominator degenerate at pole {float(rate)}")
        inv = _series_inv(dt_sh, mult)
        series = [one * 0] * mult
        for k in range(mult):
            acc = one * 0
            for j in range(k + 1):
                if j < len(num_sh):
                    acc = acc + num_sh[j] * inv[k - j]
            series[k] = acc
        # coefficient of (s+rate)^-(m) is series[mult-m]; inverse transform
        # of r/(s+rate)^m is r x^(m-1) e^(-rate x)/(m-1)!
        res = tuple(series[mult - m] for m in range(1, mult + 1))
        poly = [one * 0] * mult
        for m in range(1, mult + 1):
            denom = math.factorial(m - 1)
            poly[m - 1] = res[m - 1] / denom if exact else res[m - 1] / float(denom)
        poles.append((rate, mult))
        residues.append(res)
        inverse_polys.append(tuple(poly))

    lt = RationalLT(
        poles=tuple(poles),
        residues=tuple(residues),
        inverse_polys=tuple(inverse_polys),
        mixture=tuple(mix),
        chain_rates=tuple(lams),
        exact=exact,
    )
    chk = lt.transform(0.0)
    if abs(chk - 1.0) > 1e-9:
        raise DegeneratePoles(f"transform normalization broke: F(0) = {chk}")
    return lt


def _differentiate_polys(lt: RationalLT, order: int):
    """Per-pole polynomials of the order-th derivative, cached on the object."""
    cache = getattr(lt, "_deriv_cache", None)
    if cache is None:
        cache = {0: tuple(tuple(p) for p in lt.inverse_polys)}
        object.__setattr__(lt, "_deriv_cache", cache)
    top = max(cache)
    while top < order:
        new = []
        for (rate, _), poly in zip(lt.poles, cache[top]):
            # d/dx [P(x) e^(-r x)] = (P' - r P) e^(-r x)
            dp = list(poly)
            out = [poly[0] * 0] * len(poly)
            for j in range(len(poly)):
                out[j] = out[j] - rate * poly[j]
            for j in range(1, len(poly)):
                out[j - 1] = out[j - 1] + j * poly[j]
            new.append(tuple(out))
        top += 1
        cache[top] = tuple(new)
    return cache[order]


def _float_polys(lt: RationalLT, order: int):
    cache = getattr(lt, "_float_cache", None)
    if cache is None:
        cache = {}
        object.__setattr__(lt, "_float_cache", cache)
    entry = cache.get(order)
    if entry is None:
        polys = _differentiate_polys(lt, order)
        entry = tuple(
            (float(rate), tuple(float(c) for c in poly))
            for (rate, _), poly in zip(lt.poles, polys)
        )
        cache[order] = entry
    return entry


def chain_density(lt: RationalLT, x: float, order: int = 0) -> float:
    """f^(order)(x) = sum over poles of poly(x) * exp(-rate*x)."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    total = 0.0
    for rate, poly in _float_polys(lt, order):
        acc = 0.0
        for c in reversed(poly):
            acc = acc * x + c
        total += acc * math.exp(-rate * x)
    return total


def chain_density_with_err(lt: RationalLT, x: float, order: int = 0):
    """(value, rounding-error bound): error scales with the term magnitudes,
    which is what matters when the exponentials nearly cancel near 0."""
    total = 0.0
    mag = 0.0
    for rate, poly in _float_polys(lt, order):
        acc = 0.0
        amag = 0.0
        for c in reversed(poly):
            acc = acc * x + c
            amag = amag * x + abs(c)
        e = math.exp(-rate * x)
        total += acc * e
        mag += amag * e
    return total, _EPS * (len(lt.poles) + 4) * mag


def boundary_signs(spec: ChainSpec, max_order: int) -> Tuple[Sign, ...]:
    """Analytic signs of f^(i)(0+) for i = 0..max_order.

    Exact coefficient sums: zero for i <= n-1 (n chain factors smooth the
    mixture out to order n-1) and alternating (-1)^(n+i) afterwards.  The
    float path classifies against the term-magnitude scale.
    """
    lt = chain_laplace(spec)
    out = []
    for i in range(max_order + 1):
        polys = _differentiate_polys(lt, i)
        if lt.exact:
            v = sum(p[0] for p in polys)
            out.append(Sign.PLUS if v > 0 else Sign.MINUS if v < 0 else Sign.ZERO)
        else:
            v = math.fsum(float(p[0]) for p in polys)
            scale = max(abs(float(p[0])) for p in polys)
            tol = 1e-9 * scale
            out.append(Sign.PLUS if v > tol else Sign.MINUS if v < -tol else Sign.ZERO)
    return tuple(out)


@dataclass(frozen=True)
class OrderProfile:
    order: int
    observed: SignPattern
    expected: SignPattern
    passed: bool
    zero_set: ZeroSet


@dataclass(frozen=True)
class WbsReport:
    n: int
    profiles: Tuple[OrderProfile, ...]

    @property
    def all_pass(self) -> bool:
        return all(p.passed for p in self.profiles)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "all_pass": self.all_pass,
            "profiles": [
                {
                    "order": p.order,
                    "observed": str(p.observed),
                    "expected": str(p.expected),
                    "pass": p.passed,
                    "zeros": [
                        {"location": z[0], "bracket_width": z[1]}
                        for z in p.zero_set.zeros
                    ],
                }
                for p in self.profiles
            ],
        }


def expected_profile(n: int, i: int) -> SignPattern:
    """Profile of f_n^(i) for a chain with n exponential factors.

    a_i while i <= n-1; for i >= n the pattern is b_n up to the sign
    (-1)^(n+i), i.e. the chain is weakly bell-shaped of order n-1.
    """
    if i <= n - 1:
        return pattern_a(i)
    base = pattern_b(n)
    return base if (n + i) % 2 == 0 else base.negated()


def chain_grid(spec: ChainSpec, points: int = 1400) -> Grid:
    rates = [float(r) for _, r in spec.base.components]
    rates += [float(r) for r in spec.exp_rates]
    lo = 1e-4 / max(rates)
    hi = 80.0 / min(rates)
    return Grid(points=log_grid(lo, hi, points))


def verify_wbs(
    spec: ChainSpec, i_max: int, g: Optional[Grid] = None
) -> WbsReport:
    """Match the sign profile of every derivative up to i_max against the
    weak-bell-shape prediction for this chain."""
    n = spec.n
    if i_max < n:
        raise ValueError("i_max must be at least the number of chain rates")
    lt = chain_laplace(spec)
    bsigns = boundary_signs(spec, i_max)
    grid = g if g is not None else chain_grid(spec)
    profiles = []
    for i in range(i_max + 1):

        def f(x, _i=i):
            return chain_density_with_err(lt, x, _i)

        zs = locate_zeros(f, grid, boundary=(bsigns[i], Sign.ZERO))
        exp_pat = expected_profile(n, i)
        profiles.append(
            OrderProfile(i, zs.sign_profile, exp_pat, zs.sign_profile == exp_pat, zs)
        )
    return WbsReport(n, tuple(profiles))


def default_mixture() -> ExpMixture:
    """The stock completely-monotone base used by the verification suite."""
    return ExpMixture(
        components=(
            (Fraction(1, 2), Fraction(1)),
            (Fraction(1, 3), Fraction(5, 2)),
            (Fraction(1, 6), Fraction(7)),
        )
    )


def default_chain(n: int) -> ChainSpec:
    """Stock base plus the first n factorization rates at index one half
    (k^2 pi^2), tying the laboratory to the stable-density decomposition."""
    rates = tuple((k * math.pi) ** 2 for k in range(1, n + 1))
    return ChainSpec(base=default_mixture(), exp_rates=rates)


def exponential_sum_chain(rates: Sequence[float]) -> ChainSpec:
    """Pure hypoexponential: Exp(rates[0]) + Exp(rates[1]) + ..."""
    rates = sorted(float(r) for r in rates)
    if len(rates) < 1:
        raise ValueError("need at least one rate")
    base = ExpMixture(components=((1, rates[0]),))
    return ChainSpec(base=base, exp_rates=tuple(rates[1:]))
