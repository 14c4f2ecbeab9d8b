"""Fixed-point sets, orbitals and the generic-element property checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import BudgetExhausted, DomainMismatch
from .plcore import Interval, PLHomeo, as_rational, format_rational


# -- fixed sets ----------------------------------------------------------------

def _merge_ranges(ranges):
    out = []
    for lo, hi in sorted(ranges):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


@dataclass(frozen=True)
class FixedSet:
    """Finite union of isolated points and closed intervals, sorted."""

    points: Tuple[Fraction, ...] = ()
    intervals: Tuple[Interval, ...] = ()

    @classmethod
    def from_ranges(cls, ranges) -> "FixedSet":
        points, intervals = [], []
        for lo, hi in _merge_ranges(ranges):
            if lo == hi:
                points.append(lo)
            else:
                intervals.append(Interval(lo, hi))
        return cls(tuple(points), tuple(intervals))

    def ranges(self) -> List[Tuple[Fraction, Fraction]]:
        """Components as ``(lo, hi)`` pairs, left to right (``lo == hi`` for points)."""
        items = [(p, p) for p in self.points] + [(i.lo, i.hi) for i in self.intervals]
        return sorted(items)

    def __contains__(self, x) -> bool:
        return any(lo <= x <= hi for lo, hi in self.ranges())

    @property
    def measure(self) -> Fraction:
        return sum((i.length for i in self.intervals), Fraction(0))

    def intersect(self, other: "FixedSet") -> "FixedSet":
        out = []
        for a_lo, a_hi in self.ranges():
            for b_lo, b_hi in other.ranges():
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo <= hi:
                    out.append((lo, hi))
        return FixedSet.from_ranges(out)

    def image(self, h: PLHomeo) -> "FixedSet":
        return FixedSet.from_ranges((h(lo), h(hi)) for lo, hi in self.ranges())

    def to_json(self) -> dict:
        return {
            "points": [format_rational(p) for p in self.points],
            "intervals": [i.to_json() for i in self.intervals],
        }


def _require_self_map(f: PLHomeo):
    if not f.is_self_map:
        raise DomainMismatch(f"expected a self-map, got {f.domain} -> {f.codomain}")


def fixed_set(f: PLHomeo) -> FixedSet:
    _require_self_map(f)
    ranges = []
    for x0, x1, y0, y1 in f.segments():
        d0, d1 = y0 - x0, y1 - x1
        if d0 == 0 and d1 == 0:
            ranges.append((x0, x1))
            continue
        if d0 == 0:
            ranges.append((x0, x0))
        if d1 == 0:
            ranges.append((x1, x1))
        if d0 * d1 < 0:
            p = x0 + d0 / (d0 - d1) * (x1 - x0)
            ranges.append((p, p))
    return FixedSet.from_ranges(ranges)


# -- orbitals ----------------------------------------------------------------

@dataclass(frozen=True)
class Orbital:
    span: Interval
    parity: int

    def to_json(self) -> dict:
        return {"span": self.span.to_json(), "parity": self.parity}


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def orbitals(f: PLHomeo) -> List[Orbital]:
    fixed = fixed_set(f).ranges()
    out = []
    for (_, left), (right, _) in zip(fixed, fixed[1:]):
        if left < right:
            mid = (left + right) / 2
            out.append(Orbital(Interval(left, right), _sign(f(mid) - mid)))
    return out


def orbital_of(f: PLHomeo, x, orbs: Optional[Sequence[Orbital]] = None) -> Optional[Orbital]:
    """The orbital containing ``x``, or None when ``x`` is fixed."""
    x = as_rational(x)
    for orb in orbs if orbs is not None else orbitals(f):
        if orb.span.lo < x < orb.span.hi:
            return orb
    return None


@dataclass(frozen=True)
class BetweenReport:
    holds: bool
    vacuous: bool
    positive_witness: Optional[Fraction] = None
    negative_witness: Optional[Fraction] = None
    between: Tuple[Orbital, ...] = ()


def check_between(f: PLHomeo, q, r) -> BetweenReport:
    """Are there orbitals of both parities strictly between orb(q) and orb(r)?"""
    _require_self_map(f)
    q, r = as_rational(q), as_rational(r)
    if not q < r:
        raise DomainMismatch(f"need q < r, got {q}, {r}")
    orbs = orbitals(f)
    oq, orr = orbital_of(f, q, orbs), orbital_of(f, r, orbs)
    if oq is None or orr is None or oq == orr:
        return BetweenReport(holds=True, vacuous=True)
    between = tuple(o for o in orbs if oq.span.hi <= o.span.lo and o.span.hi <= orr.span.lo)
    pos = next(((o.span.lo + o.span.hi) / 2 for o in between if o.parity > 0), None)
    neg = next(((o.span.lo + o.span.hi) / 2 for o in between if o.parity < 0), None)
    return BetweenReport(
        holds=pos is not None and neg is not None,
        vacuous=False,
        positive_witness=pos,
        negative_witness=neg,
        between=between,
    )


# -- genericity properties ---------------------------------------------------

@dataclass(frozen=True)
class GenericityReport:
    is_cantor: bool
    mixing: bool
    null_fixed: bool
    fixed_measure: Fraction
    witnesses: Tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "is_cantor": self.is_cantor,
            "mixing": self.mixing,
            "null_fixed": self.null_fixed,
            "fixed_measure": format_rational(self.fixed_measure),
            "witnesses": list(self.witnesses),
        }


def genericity_report(f: PLHomeo) -> GenericityReport:
    _require_self_map(f)
    fix = fixed_set(f)
    witnesses = []

    # (i) Cantor: nonempty, perfect (no isolated points), totally disconnected
    perfect = not fix.points
    totally_disconnected = not fix.intervals
    if fix.points:
        witnesses.append(f"isolated fixed point {format_rational(fix.points[0])}")
    if fix.intervals:
        witnesses.append(f"fixed interval {fix.intervals[0]}")
    is_cantor = bool(fix.ranges()) and perfect and totally_disconnected

    # (ii) between any two orbitals lie orbitals of both parities
    orbs = orbitals(f)
    mixing = True
    for i in range(len(orbs)):
        for j in range(i + 1, len(orbs)):
            parities = {o.parity for o in orbs[i + 1:j]}
            if not {1, -1} <= parities:
                mixing = False
                witnesses.append(
                    f"no orbitals of both parities between {orbs[i].span} and {orbs[j].span}")
                break
        if not mixing:
            break

    # (iii) null fixed set
    measure = fix.measure
    if measure:
        witnesses.append(f"fixed set has measure {format_rational(measure)}")
    return GenericityReport(
        is_cantor=is_cantor,
        mixing=mixing,
        null_fixed=measure == 0,
        fixed_measure=measure,
        witnesses=tuple(witnesses),
    )


# -- pushing points up -------------------------------------------------------

@dataclass(frozen=True)
class PushResult:
    point: Fraction
    word: Tuple[Tuple[int, int], ...]  # (generator index, ±1) in application order


def replay_word(generators, word, start) -> Fraction:
    x = as_rational(start)
    for index, exp in word:
        gen = generators[index]
        x = gen(x) if exp > 0 else gen.inverse()(x)
    return x


def _least_common_fixed_at_or_above(generators, x) -> Optional[Fraction]:
    if not all(isinstance(g, PLHomeo) for g in generators):
        return None
    common = fixed_set(generators[0])
    for g in generators[1:]:
        common = common.intersect(fixed_set(g))
    candidates = [max(lo, x) for lo, hi in common.ranges() if hi >= x]
    return min(candidates) if candidates else None


def push_sup(generators: Sequence, start, target, budget: int = 1000) -> PushResult:
    """Greedily move ``start`` above ``target`` using generators and inverses.

    Each step takes the move with the largest image; ties go to the lower
    generator index, inverse before forward.  ``generators`` may be PL maps or
    any objects that are callable and provide ``inverse()``.
    """
    x, target = as_rational(start), as_rational(target)
    word = []
    if x > target:
        return PushResult(x, ())
    moves = []
    for i, g in enumerate(generators):
        moves.append((i, -1, g.inverse()))
        moves.append((i, 1, g))
    for _ in range(budget):
        best = None
        for i, exp, m in moves:
            y = m(x)
            if best is None or y > best[0]:
                best = (y, i, exp)
        y, i, exp = best
        if y <= x:
            raise BudgetExhausted(
                f"stalled at common fixed point {format_rational(x)}",
                reached=x, stall_point=x, fixers=range(len(generators)),
                obstructed=x <= target)
        x = y
        word.append((i, exp))
        if x > target:
            return PushResult(x, tuple(word))
    stall = _least_common_fixed_at_or_above(generators, x)
    fixers = ()
    if stall is not None:
        fixers = tuple(i for i, g in enumerate(generators) if g(stall) == stall)
    raise BudgetExhausted(
        f"budget {budget} exhausted at {format_rational(x)}"
        + (f"; orbit supremum is {format_rational(stall)}" if stall is not None else ""),
        reached=x, stall_point=stall, fixers=fixers,
        obstructed=None if stall is None else stall <= target)
