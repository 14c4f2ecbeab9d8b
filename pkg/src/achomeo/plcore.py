"""Exact piecewise-linear maps with rational breakpoints.

Rationals are :class:`fractions.Fraction` throughout.  A :class:`PLFunction`
is any continuous PL function on a closed rational interval; a
:class:`PLHomeo` is one whose breakpoint values are strictly increasing, i.e.
an increasing PL bijection between two rational intervals.  Both are kept in
canonical form (collinear breakpoints merged), so equality is structural.
"""

from __future__ import annotations

import bisect
import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

from .errors import (
    BreakpointBudgetExceeded,
    DomainMismatch,
    NonMonotone,
    OutOfDomain,
    ParseError,
    TooFewPoints,
)

Rational = Fraction
RationalLike = Union[Fraction, int, str]

DEFAULT_BREAKPOINT_BUDGET = 10**6


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction without ever going through a float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed rational {value!r}") from exc
    raise ParseError(f"not a rational (floats are rejected): {value!r}")


def format_rational(q: Fraction) -> str:
    """Lowest-terms ``"p/q"`` string, or ``"n"`` for integers."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_str(q: Fraction, digits: int = 12) -> str:
    """Presentational decimal rendering, ``digits`` significant, half-even."""
    q = Fraction(q)
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    value = ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator))
    return format(value, "f") if value.adjusted() > -7 else str(value)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if not self.lo < self.hi:
            raise DomainMismatch(f"degenerate or reversed interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> list:
        return [format_rational(self.lo), format_rational(self.hi)]

    def __str__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


UNIT = Interval(Fraction(0), Fraction(1))


def _canonical(xs: Sequence[Fraction], ys: Sequence[Fraction]):
    out_x = [xs[0], xs[1]]
    out_y = [ys[0], ys[1]]
    for x, y in zip(xs[2:], ys[2:]):
        x0, y0, x1, y1 = out_x[-2], out_y[-2], out_x[-1], out_y[-1]
        if (y1 - y0) * (x - x1) == (y - y1) * (x1 - x0):
            out_x[-1], out_y[-1] = x, y
        else:
            out_x.append(x)
            out_y.append(y)
    return tuple(out_x), tuple(out_y)


class PLFunction:
    """Continuous piecewise-linear function on ``[xs[0], xs[-1]]``.

    Values need not be monotone; slopes may be zero.  Instances are immutable.
    """

    __slots__ = ("xs", "ys", "_slopes", "_inv", "_den", "_ixs")

    def __init__(self, points: Iterable[Tuple[RationalLike, RationalLike]]):
        pts = [(as_rational(x), as_rational(y)) for x, y in points]
        if len(pts) < 2:
            raise TooFewPoints(f"need at least 2 breakpoints, got {len(pts)}")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise NonMonotone(f"x-coordinates not strictly increasing at {a} >= {b}")
        self._check_values(ys)
        xs, ys = _canonical(xs, ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(
            self, "_slopes",
            tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)),
        )
        object.__setattr__(self, "_inv", None)
        # breakpoints over a common denominator, for integer-only bisection
        den = math.lcm(*(x.denominator for x in xs))
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_ixs", tuple(x.numerator * (den // x.denominator) for x in xs))

    def _check_values(self, ys):
        pass

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- basic access -------------------------------------------------------

    @property
    def domain(self) -> Interval:
        return Interval(self.xs[0], self.xs[-1])

    @property
    def points(self) -> Tuple[Tuple[Fraction, Fraction], ...]:
        return tuple(zip(self.xs, self.ys))

    @property
    def slopes(self) -> Tuple[Fraction, ...]:
        return self._slopes

    def __reduce__(self):
        return type(self), (self.points,)

    @property
    def breakpoint_count(self) -> int:
        return len(self.xs)

    def segments(self):
        """Yield ``(x0, x1, y0, y1)`` for each linear piece."""
        xs, ys = self.xs, self.ys
        for i in range(len(xs) - 1):
            yield xs[i], xs[i + 1], ys[i], ys[i + 1]

    def eval(self, x: RationalLike) -> Fraction:
        x = as_rational(x)
        ixs = self._ixs
        scaled, rem = divmod(x.numerator * self._den, x.denominator)
        # scaled = floor(x * den); x >= xs[i] iff scaled >= ixs[i]
        if scaled < ixs[0] or scaled > ixs[-1] or (scaled == ixs[-1] and rem):
            raise OutOfDomain(f"{x} outside {self.domain}")
        i = bisect.bisect_right(ixs, scaled) - 1
        if i == len(ixs) - 1:
            return self.ys[-1]
        return self.ys[i] + self._slopes[i] * (x - self.xs[i])

    __call__ = eval

    def restrict(self, lo: RationalLike, hi: RationalLike) -> "PLFunction":
        lo, hi = as_rational(lo), as_rational(hi)
        if not (self.xs[0] <= lo < hi <= self.xs[-1]):
            raise DomainMismatch(f"[{lo}, {hi}] not inside {self.domain}")
        inner = [x for x in self.xs if lo < x < hi]
        pts = [lo, *inner, hi]
        return type(self)((x, self.eval(x)) for x in pts)

    # -- equality / display -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __repr__(self):
        body = ", ".join(f"({format_rational(x)}, {format_rational(y)})" for x, y in self.points)
        return f"{type(self).__name__}([{body}])"

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": [format_rational(min(self.ys)), format_rational(max(self.ys))],
            "points": [[format_rational(x), format_rational(y)] for x, y in self.points],
        }


class PLHomeo(PLFunction):
    """Increasing PL bijection from ``domain`` onto ``codomain``."""

    __slots__ = ()

    def _check_values(self, ys):
        for a, b in zip(ys, ys[1:]):
            if not a < b:
                raise NonMonotone(f"y-coordinates not strictly increasing at {a} >= {b}")

    @property
    def codomain(self) -> Interval:
        return Interval(self.ys[0], self.ys[-1])

    @property
    def is_self_map(self) -> bool:
        return self.xs[0] == self.ys[0] and self.xs[-1] == self.ys[-1]

    def is_identity(self) -> bool:
        return len(self.xs) == 2 and self.is_self_map

    def inverse(self) -> "PLHomeo":
        inv = self._inv
        if inv is None:
            inv = PLHomeo(zip(self.ys, self.xs))
            object.__setattr__(inv, "_inv", self)
            object.__setattr__(self, "_inv", inv)
        return inv

    def eval_inverse(self, y: RationalLike) -> Fraction:
        return self.inverse().eval(y)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "points": [[format_rational(x), format_rational(y)] for x, y in self.points],
        }


# -- module-level operations --------------------------------------------------

def from_points(pairs: Iterable[Tuple[RationalLike, RationalLike]]) -> PLHomeo:
    return PLHomeo(pairs)


def identity(interval: Interval = UNIT) -> PLHomeo:
    return PLHomeo([(interval.lo, interval.lo), (interval.hi, interval.hi)])


def evaluate(f: PLFunction, x: RationalLike) -> Fraction:
    return f.eval(x)


def inverse(f: PLHomeo) -> PLHomeo:
    return f.inverse()


def compose(f: PLHomeo, g: PLHomeo) -> PLHomeo:
    """Return ``f ∘ g``; requires ``g.codomain == f.domain``."""
    if g.codomain != f.domain:
        raise DomainMismatch(f"cannot compose: codomain {g.codomain} != domain {f.domain}")
    g_inv = g.inverse()
    xs = set(g.xs)
    xs.update(g_inv.eval(y) for y in f.xs[1:-1])
    return PLHomeo((x, f.eval(g.eval(x))) for x in sorted(xs))


def power(f: PLHomeo, n: int, budget: int = DEFAULT_BREAKPOINT_BUDGET) -> PLHomeo:
    """``n``-fold composite of ``f`` (inverse powers for negative ``n``)."""
    if not f.is_self_map:
        raise DomainMismatch(f"power needs a self-map, got {f.domain} -> {f.codomain}")
    if n < 0:
        f, n = f.inverse(), -n
    result = identity(f.domain)
    base = f
    while n:
        if n & 1:
            result = compose(base, result)
            if result.breakpoint_count > budget:
                raise BreakpointBudgetExceeded(
                    f"{result.breakpoint_count} breakpoints exceeds budget {budget}")
        n >>= 1
        if n:
            base = compose(base, base)
            if base.breakpoint_count > budget:
                raise BreakpointBudgetExceeded(
                    f"{base.breakpoint_count} breakpoints exceeds budget {budget}")
    return result


def affine_map(source: Interval, target: Interval) -> PLHomeo:
    """The increasing affine bijection ``source -> target``."""
    return PLHomeo([(source.lo, target.lo), (source.hi, target.hi)])


def affine_conjugate(f: PLHomeo, target: Interval) -> PLHomeo:
    """``A ∘ f ∘ A⁻¹`` for the increasing affine ``A : f.domain -> target``."""
    if not f.is_self_map:
        raise DomainMismatch("affine_conjugate needs a self-map")
    d = f.domain
    scale = target.length / d.length

    def a(t):
        return target.lo + (t - d.lo) * scale

    return PLHomeo((a(x), a(y)) for x, y in f.points)


def restrict(f: PLHomeo, lo: RationalLike, hi: RationalLike) -> PLHomeo:
    return f.restrict(lo, hi)


# -- JSON ------------------------------------------------------------------

def pl_to_json(f: PLFunction) -> dict:
    return f.to_json()


def pl_from_json(data: dict, cls=PLHomeo) -> PLFunction:
    try:
        raw = data["points"]
        points = [(as_rational(x), as_rational(y)) for x, y in raw]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed PL map JSON: {exc}") from exc
    f = cls(points)
    if "domain" in data and Interval(*map(as_rational, data["domain"])) != f.domain:
        raise ParseError("declared domain does not match breakpoints")
    if cls is PLHomeo and "codomain" in data:
        if Interval(*map(as_rational, data["codomain"])) != f.codomain:
            raise ParseError("declared codomain does not match breakpoints")
    return f
