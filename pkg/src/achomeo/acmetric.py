"""The ρ metric (L¹ distance of derivatives) and companions.

For PL maps ρ is computed exactly from slopes.  For maps only available as
evaluation oracles we report the total variation of ``f - g`` over a
partition, which is a lower bound on ρ for absolutely continuous maps and is
nondecreasing under refinement.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Tuple

from .errors import (
    AchomeoError,
    BadParameter,
    DomainMismatch,
    OracleEvaluationFailure,
)
from .plcore import PLFunction, as_rational, decimal_str, format_rational

Oracle = Callable[[Fraction], Fraction]

DEFAULT_DYADIC_LEVEL = 12


@dataclass(frozen=True)
class Partition:
    points: Tuple[Fraction, ...]

    def __post_init__(self):
        pts = tuple(as_rational(p) for p in self.points)
        if len(pts) < 2:
            raise BadParameter("a partition needs at least two points")
        if any(not a < b for a, b in zip(pts, pts[1:])):
            raise BadParameter("partition points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @property
    def lo(self) -> Fraction:
        return self.points[0]

    @property
    def hi(self) -> Fraction:
        return self.points[-1]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @classmethod
    def dyadic(cls, lo=0, hi=1, level: int = DEFAULT_DYADIC_LEVEL) -> "Partition":
        lo, hi = as_rational(lo), as_rational(hi)
        n = 1 << level
        step = (hi - lo) / n
        return cls(tuple(lo + i * step for i in range(n + 1)))

    @classmethod
    def uniform(cls, lo, hi, cells: int) -> "Partition":
        lo, hi = as_rational(lo), as_rational(hi)
        step = (hi - lo) / cells
        return cls(tuple(lo + i * step for i in range(cells + 1)))

    @classmethod
    def from_breakpoints(cls, *maps: PLFunction, lo=None, hi=None) -> "Partition":
        """Coarsest partition of ``[lo, hi]`` refining every map's breakpoints."""
        lo = maps[0].xs[0] if lo is None else as_rational(lo)
        hi = maps[0].xs[-1] if hi is None else as_rational(hi)
        pts = {lo, hi}
        for m in maps:
            pts.update(x for x in m.xs if lo < x < hi)
        return cls(tuple(sorted(pts)))

    def refine(self) -> "Partition":
        """Insert every cell midpoint."""
        out = [self.points[0]]
        for a, b in zip(self.points, self.points[1:]):
            out.append((a + b) / 2)
            out.append(b)
        return Partition(tuple(out))

    def union(self, other: "Partition") -> "Partition":
        return Partition(tuple(sorted(set(self.points) | set(other.points))))


def _common_breakpoints(f: PLFunction, g: PLFunction, a: Fraction, b: Fraction):
    fd, gd = f.domain, g.domain
    if not (fd.lo <= a and gd.lo <= a and b <= fd.hi and b <= gd.hi):
        raise DomainMismatch(f"[{a}, {b}] is not inside both {fd} and {gd}")
    if a > b:
        raise DomainMismatch(f"reversed range [{a}, {b}]")
    pts = {a, b}
    pts.update(x for x in f.xs if a < x < b)
    pts.update(x for x in g.xs if a < x < b)
    return sorted(pts)


def _slope_at(h: PLFunction, left: Fraction, right: Fraction) -> Fraction:
    # slope of the piece containing the open cell (left, right)
    i = bisect.bisect_right(h.xs, left) - 1
    return h.slopes[min(i, len(h.slopes) - 1)]


def rho_exact(f: PLFunction, g: PLFunction, a=None, b=None) -> Fraction:
    """Exact ``∫_a^b |f' - g'|`` for PL ``f``, ``g`` (slope times length per cell)."""
    a = f.xs[0] if a is None else as_rational(a)
    b = f.xs[-1] if b is None else as_rational(b)
    pts = _common_breakpoints(f, g, a, b)
    total = Fraction(0)
    for left, right in zip(pts, pts[1:]):
        diff = _slope_at(f, left, right) - _slope_at(g, left, right)
        total += abs(diff) * (right - left)
    return total


def rho_upper_bound(f: PLFunction, g: PLFunction, a=None, b=None) -> Fraction:
    """``f(b) - f(a) + g(b) - g(a)``, an upper bound on ρ for increasing maps."""
    a = f.xs[0] if a is None else as_rational(a)
    b = f.xs[-1] if b is None else as_rational(b)
    _common_breakpoints(f, g, a, b)
    return f(b) - f(a) + g(b) - g(a)


def _call(oracle: Oracle, x: Fraction) -> Fraction:
    try:
        return oracle(x)
    except AchomeoError:
        raise
    except Exception as exc:  # noqa: BLE001 - oracles are user callables
        raise OracleEvaluationFailure(f"oracle failed at {x}: {exc}") from exc


def rho_sampled_lower(f: Oracle, g: Oracle, partition: Partition) -> Fraction:
    """Total variation of ``f - g`` sampled on ``partition``."""
    diffs = [_call(f, t) - _call(g, t) for t in partition.points]
    return variation(diffs)


def variation(values: Sequence[Fraction]) -> Fraction:
    return sum((abs(b - a) for a, b in zip(values, values[1:])), Fraction(0))


def uniform_dist(f: PLFunction, g: PLFunction) -> Fraction:
    """Exact sup-distance; ``f - g`` is PL so the max sits on a breakpoint."""
    if f.domain != g.domain:
        raise DomainMismatch(f"uniform_dist needs equal domains: {f.domain} vs {g.domain}")
    pts = set(f.xs) | set(g.xs)
    return max(abs(f(x) - g(x)) for x in pts)


def singular_mass(h: Oracle, mesh, slope_threshold, lo=0, hi=1) -> Fraction:
    """Rise of ``h`` carried by mesh cells steeper than ``slope_threshold``.

    A heuristic witness against absolute continuity, not a decision procedure:
    it is 0 for a PL map once the threshold exceeds its maximal slope, and
    stays near 1 along the Cantor-staircase approximants.
    """
    mesh, slope_threshold = as_rational(mesh), as_rational(slope_threshold)
    lo, hi = as_rational(lo), as_rational(hi)
    cells = (hi - lo) / mesh
    if mesh <= 0 or cells.denominator != 1:
        raise BadParameter(f"mesh {mesh} does not divide [{lo}, {hi}] evenly")
    cells = cells.numerator
    if isinstance(h, PLFunction):
        return _singular_mass_pl(h, mesh, slope_threshold, lo, hi)
    cutoff = slope_threshold * mesh
    total = Fraction(0)
    prev = _call(h, lo)
    for i in range(1, cells + 1):
        cur = _call(h, lo + i * mesh)
        rise = cur - prev
        if rise > cutoff:
            total += rise
        prev = cur
    return total


def _singular_mass_pl(h: PLFunction, mesh, threshold, lo, hi) -> Fraction:
    # cells inside one linear piece rise by slope * mesh and are counted in
    # bulk; only cells with a breakpoint strictly inside are evaluated
    if not (h.xs[0] <= lo and hi <= h.xs[-1]):
        raise OracleEvaluationFailure(f"[{lo}, {hi}] outside the map's domain {h.domain}")
    total = Fraction(0)
    split = set()
    for (x0, x1, _, _), slope in zip(h.segments(), h.slopes):
        a, b = max(x0, lo), min(x1, hi)
        if a >= b:
            continue
        first, last = math.ceil((a - lo) / mesh), math.floor((b - lo) / mesh)
        if last > first and slope > threshold:
            total += (last - first) * slope * mesh
        for x in (a, b):
            pos = (x - lo) / mesh
            if lo < x < hi and pos.denominator != 1:
                split.add(math.floor(pos))
    cutoff = threshold * mesh
    for i in split:
        rise = h(lo + (i + 1) * mesh) - h(lo + i * mesh)
        if rise > cutoff:
            total += rise
    return total


# -- CSV emission --------------------------------------------------------------

SWEEP_COLUMNS = ("n", "rho", "uniform", "bound")


def sweep_rows_to_csv(rows: Iterable[Tuple[int, Fraction, Fraction, Fraction]],
                      extra: Sequence[str] = ()) -> str:
    """Render ``(n, rho, uniform, bound, *extra)`` rows as CSV text.

    Each rational column appears twice: exact ``p/q`` and a 12-digit decimal.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["n"]
    for name in (*SWEEP_COLUMNS[1:], *extra):
        header += [name, f"{name}_decimal"]
    writer.writerow(header)
    for row in rows:
        out = [str(row[0])]
        for q in row[1:]:
            out += [format_rational(q), decimal_str(q)]
        writer.writerow(out)
    return buf.getvalue()
