"""Sign sequences on (0, inf): counting, zero location, profile matching.

A smooth function that tends to limits at 0+ and +inf and vanishes on a
finite set is summarized by the ordered sequence of its signs, e.g. the
half-index stable density is of type 0+0 and its derivative 0+0-0.  Two
canonical families appear throughout:

    a_n = 0 + 0 - 0 + ... (sign block k has sign (-1)^k; n interior zeros)
    b_n = + 0 - 0 + ... 0  (same alternation, but positive at 0+)

Bell-shape verification reduces to: locate the zeros of each derivative by
bracketing and bisection, then match the assembled profile against a_n.
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import AmbiguousZero
from . import stable
from .stable import Alpha, SeriesConfig, DEFAULT_SERIES


class Sign(enum.Enum):
    MINUS = "-"
    ZERO = "0"
    PLUS = "+"

    def __str__(self):
        return self.value

    @property
    def flipped(self) -> "Sign":
        if self is Sign.PLUS:
            return Sign.MINUS
        if self is Sign.MINUS:
            return Sign.PLUS
        return Sign.ZERO


def sign_of(v: float, tol: float = 0.0) -> Sign:
    """Classify v as PLUS / MINUS / ZERO with a symmetric tolerance band."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if v > tol:
        return Sign.PLUS
    if v < -tol:
        return Sign.MINUS
    return Sign.ZERO


def _alt(k: int) -> Sign:
    return Sign.PLUS if k % 2 == 0 else Sign.MINUS


@dataclass(frozen=True)
class SignPattern:
    """Ordered sign symbols over [0, +inf]; first and last are endpoint limits."""

    symbols: Tuple[Sign, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        for s, t in zip(syms, syms[1:]):
            if s is t:
                raise ValueError(f"consecutive identical symbols in pattern {self}")
        object.__setattr__(self, "symbols", syms)

    def __str__(self):
        return "".join(str(s) for s in self.symbols)

    def negated(self) -> "SignPattern":
        return SignPattern(tuple(s.flipped for s in self.symbols))


def pattern_a(n: int) -> SignPattern:
    """0 +0-0...(-1)^n 0 : profile of the n-th derivative of a bell-shaped density."""
    syms = [Sign.ZERO]
    for k in range(n + 1):
        syms.append(_alt(k))
        syms.append(Sign.ZERO)
    return SignPattern(tuple(syms))


def pattern_b(n: int) -> SignPattern:
    """+0-0...(-1)^n 0 : like a_n but with a strictly positive limit at 0+."""
    syms = []
    for k in range(n + 1):
        syms.append(_alt(k))
        syms.append(Sign.ZERO)
    return SignPattern(tuple(syms))


def count_sign_changes_open(samples: Sequence[float]) -> int:
    """S^-: sign changes after deleting zero entries."""
    if len(samples) == 0:
        raise ValueError("empty sample list")
    changes = 0
    last = 0
    for v in samples:
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last != 0 and s != last:
            changes += 1
        last = s
    return changes


def count_sign_changes_closed(samples: Sequence[float]) -> int:
    """S^+: maximal sign changes over all sign assignments to zero entries."""
    if len(samples) == 0:
        raise ValueError("empty sample list")
    NEG = -1
    p = m = None  # best change counts with last element assigned +, resp. -
    for v in samples:
        if v > 0:
            np_ = max(x for x in (p, (m + 1) if m is not None else None) if x is not None) if (p is not None or m is not None) else 0
            p, m = np_, None
        elif v < 0:
            nm = max(x for x in (m, (p + 1) if p is not None else None) if x is not None) if (p is not None or m is not None) else 0
            p, m = None, nm
        else:
            if p is None and m is None:
                p = m = 0
            else:
                np_ = max(x for x in (p, (m + 1) if m is not None else None) if x is not None)
                nm = max(x for x in (m, (p + 1) if p is not None else None) if x is not None)
                p, m = np_, nm
    return max(x for x in (p, m) if x is not None)


# ---------------------------------------------------------------------------
# grids and zero location
# ---------------------------------------------------------------------------


def log_grid(lo: float, hi: float, n: int) -> Tuple[float, ...]:
    """Logarithmically spaced points, matching power tails and sharp shoulders."""
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    return tuple(np.geomspace(lo, hi, n).tolist())


@dataclass(frozen=True)
class Grid:
    points: Tuple[float, ...]
    refinement_depth: int = 60
    zero_tolerance: float = 1e-12  # relative to the largest sampled magnitude

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if len(pts) == 0:
            raise ValueError("grid needs at least one point")
        if pts[0] <= 0:
            raise ValueError("grid points must be positive")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class ZeroSet:
    """Bracketed zeros (location, bracket width) plus the assembled profile."""

    zeros: Tuple[Tuple[float, float], ...]
    sign_profile: SignPattern


def match_pattern(z: ZeroSet, p: SignPattern) -> bool:
    """True iff the located profile equals the pattern exactly."""
    return z.sign_profile == p


Evaluator = Callable[[float], object]


class _Probe:
    """Uniform evaluate-and-classify access for both evaluator flavors.

    Evaluators returning (value, abs_error) pairs get a per-point tolerance
    of a few times their own error bound; bare-float evaluators share one
    tolerance relative to the largest magnitude seen on the initial grid.
    """

    def __init__(self, f: Evaluator, rel_tol: float):
        self.f = f
        self.rel_tol = rel_tol
        self.plain_tol = 0.0
        self.err_aware = True

    def raw(self, x: float):
        r = self.f(x)
        if isinstance(r, tuple):
            v, e = r
            return float(v), 8.0 * float(e)
        return float(r), None

    def calibrate(self, raws):
        plain = [v for v, t in raws if t is None]
        if plain:
            self.err_aware = False
            self.plain_tol = self.rel_tol * max(abs(v) for v in plain)

    def classify(self, x: float):
        v, tol = self.raw(x)
        if tol is None:
            tol = self.plain_tol
        return v, sign_of(v, tol)


def _bisect(probe: "_Probe", a, b, sa, depth):
    """Shrink a sign-change bracket; returns (root, width)."""
    for _ in range(depth):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break  # bracket at floating-point resolution
        _, sm = probe.classify(m)
        if sm is Sign.ZERO:
            return m, b - a
        if sm is sa:
            a = m
        else:
            b = m
    return 0.5 * (a + b), b - a


def _scan(probe, pts_syms, depth, level):
    """Walk classified points; bracket alternations, refine flat stretches.

    ``pts_syms`` is a list of (x, symbol).  Returns (zeros, block_signs):
    the located zeros and the deduplicated sequence of strict sign blocks.
    A stretch of zero-classified points between same-sign neighbours is
    re-sampled: either the function re-emerges with the flank sign (no
    zero), or strict opposite signs appear (an even number of zeros), or
    it stays indistinguishable from zero and we refuse to guess.
    """
    strict = [(x, s) for x, s in pts_syms if s is not Sign.ZERO]
    if not strict:
        raise AmbiguousZero("function is within zero tolerance on the whole stretch")
    zero_xs = {x for x, s in pts_syms if s is Sign.ZERO}

    zeros = []
    blocks = [strict[0][1]]
    for (xp, sp), (xc, sc) in zip(strict, strict[1:]):
        if sc is not sp:
            root, width = _bisect(probe, xp, xc, sp, depth)
            zeros.append((root, width))
            blocks.append(sc)
        elif any(xp < x < xc for x in zero_xs):
            if level >= 2:
                # stayed within tolerance under two refinement rounds: for
                # an error-aware evaluator everything in the stretch is
                # certified within its error bar of zero with equal flank
                # signs, so there is no crossing to count; with a plain
                # tolerance this could be a tangency and we refuse to guess
                if probe.err_aware:
                    continue
                raise AmbiguousZero(
                    f"cell [{xp:.6g}, {xc:.6g}] stays within zero tolerance under refinement"
                )
            xs = np.linspace(xp, xc, 65)
            sub = [(xp, sp)]
            sub += [(x, probe.classify(x)[1]) for x in xs[1:-1]]
            sub.append((xc, sc))
            sub_zeros, sub_blocks = _scan(probe, sub, depth, level + 1)
            zeros.extend(sub_zeros)
            for b in sub_blocks:
                if b is not blocks[-1]:
                    blocks.append(b)
    return zeros, blocks


def locate_zeros(
    f: Evaluator,
    grid: Grid,
    boundary: Optional[Tuple[Sign, Sign]] = None,
) -> ZeroSet:
    """Bracket and bisect the zeros of f over the grid; assemble the profile.

    f may return a bare float (tolerance taken as zero_tolerance times the
    largest sampled magnitude) or a (value, abs_error) pair (per-point
    tolerance).  Endpoint symbols default to the outermost classifications;
    callers with analytic knowledge pass ``boundary`` explicitly.

    Raises AmbiguousZero for tangency-like configurations instead of
    guessing a count.
    """
    probe = _Probe(f, grid.zero_tolerance)
    raws = [probe.raw(x) for x in grid.points]
    probe.calibrate(raws)
    pts_syms = []
    for x, (v, tol) in zip(grid.points, raws):
        if tol is None:
            tol = probe.plain_tol
        pts_syms.append((x, sign_of(v, tol)))

    zeros, blocks = _scan(probe, pts_syms, grid.refinement_depth, level=0)
    zeros.sort(key=lambda z: z[0])

    lead = boundary[0] if boundary is not None else pts_syms[0][1]
    trail = boundary[1] if boundary is not None else pts_syms[-1][1]
    symbols = [lead]
    for i, b in enumerate(blocks):
        if symbols[-1] is not b:
            symbols.append(b)
        if i < len(blocks) - 1:
            symbols.append(Sign.ZERO)
    if symbols[-1] is not trail:
        symbols.append(trail)
    return ZeroSet(tuple(zeros), SignPattern(tuple(symbols)))


# ---------------------------------------------------------------------------
# bell-shape verification for stable densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderResult:
    order: int
    zero_count: int
    expected: int
    passed: bool
    zero_set: ZeroSet


@dataclass(frozen=True)
class BellShapeReport:
    alpha: Alpha
    max_order: int
    per_order: Tuple[OrderResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.per_order)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha.alpha,
            "max_order": self.max_order,
            "all_pass": self.all_pass,
            "orders": [
                {
                    "order": r.order,
                    "zero_count": r.zero_count,
                    "expected": r.expected,
                    "pass": r.passed,
                    "zeros": [
                        {"location": z[0], "bracket_width": z[1]}
                        for z in r.zero_set.zeros
                    ],
                    "profile": str(r.zero_set.sign_profile),
                }
                for r in self.per_order
            ],
        }

    def to_csv_rows(self):
        """One row per located zero."""
        rows = [("alpha", "order", "zero_index", "location", "bracket_width", "pass")]
        for r in self.per_order:
            for i, (loc, w) in enumerate(r.zero_set.zeros):
                rows.append(
                    (self.alpha.alpha, r.order, i, loc, w, r.passed)
                )
        return rows


def stable_grid(a: Alpha, order: int, points_per_decade: int = 120,
                refinement_depth: int = 60,
                cfg: SeriesConfig = DEFAULT_SERIES) -> Grid:
    """Default scan range for f_a^(order).

    Starts deep inside the left shoulder (density below exp(-120), hence
    past every zero), but never below the smallest x the series term
    budget can resolve, which binds as a -> 1.  Extends well beyond the
    last sign change on the right.
    """
    lo = 0.7 * stable.left_cutoff(a, 120.0)
    lo = max(
        lo,
        1.05 * stable.min_reliable_x(a, cfg),
        stable.left_scan_limit(a, order, cfg),
    )
    hi = 80.0
    decades = math.log10(hi / lo)
    n = int(min(4000, max(900, points_per_decade * decades)))
    return Grid(points=log_grid(lo, hi, n), refinement_depth=refinement_depth)


def verify_bell_shape(
    a: Alpha,
    max_order: int,
    g: Optional[Grid] = None,
    cfg: SeriesConfig = DEFAULT_SERIES,
    auto_extend: bool = True,
) -> BellShapeReport:
    """Check that f_a^(n) vanishes exactly n times with profile a_n, n = 1..max_order."""
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if max_order > stable.DERIVATIVE_ORDER_CAP:
        raise ValueError(f"max_order exceeds derivative cap {stable.DERIVATIVE_ORDER_CAP}")

    results = []
    for n in range(1, max_order + 1):
        grid = g if g is not None else stable_grid(a, n, cfg=cfg)
        zs, ok = _scan_order(a, n, grid, cfg)
        if not ok and auto_extend and g is None:
            lo = max(
                grid.points[0] / 16.0,
                1.02 * stable.min_reliable_x(a, cfg),
                stable.left_scan_limit(a, n, cfg, max_peak_log10=220.0),
            )
            wider = Grid(
                points=log_grid(lo, grid.points[-1] * 4.0,
                                int(len(grid.points) * 1.5)),
                refinement_depth=grid.refinement_depth,
            )
            zs, ok = _scan_order(a, n, wider, cfg)
        results.append(OrderResult(n, len(zs.zeros), n, ok, zs))
    return BellShapeReport(a, max_order, tuple(results))


def _scan_order(a: Alpha, n: int, grid: Grid, cfg: SeriesConfig):
    # negligibility floor from a cheap double prepass: points whose values
    # are twenty-odd orders below the derivative's peak only need to be
    # certified tiny, not resolved to relative accuracy
    scale = stable.double_scan_scale(a, n, grid.points, cfg)
    floor = scale * 1e-13

    def f(x):
        ev = stable.density_derivative(a, x, n, cfg, abs_floor=floor)
        return ev.value, ev.est_error

    zs = locate_zeros(f, grid, boundary=(Sign.ZERO, Sign.ZERO))
    ok = len(zs.zeros) == n and match_pattern(zs, pattern_a(n))
    return zs, ok


def zeros_interlace(outer: ZeroSet, inner: ZeroSet) -> bool:
    """True if inner's zeros strictly separate consecutive zeros of outer.

    With outer = f^(n) and inner = f^(n+1), Rolle's theorem for a
    bell-shaped density forces z_{n+1,k} < z_{n,k} < z_{n+1,k+1}.
    """
    zo = [z[0] for z in outer.zeros]
    zi = [z[0] for z in inner.zeros]
    if len(zi) != len(zo) + 1:
        return False
    return all(zi[k] < zo[k] < zi[k + 1] for k in range(len(zo)))
