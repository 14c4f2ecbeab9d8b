"""Seeded random PL instances for experiments and property tests.

All randomness flows through a caller-supplied :class:`random.Random`, so a
seed fully determines every instance.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from .plcore import UNIT, Interval, PLHomeo, affine_conjugate, as_rational, from_points


def random_rational(rng: random.Random, lo=0, hi=1, denominator: int = 64) -> Fraction:
    """Uniform on the open grid ``lo + (hi - lo) * k / denominator``."""
    lo, hi = as_rational(lo), as_rational(hi)
    return lo + (hi - lo) * Fraction(rng.randint(1, denominator - 1), denominator)


def random_sorted(rng: random.Random, lo, hi, count: int, denominator: int = 256) -> List[Fraction]:
    """``count`` distinct sorted grid rationals strictly inside ``(lo, hi)``."""
    lo, hi = as_rational(lo), as_rational(hi)
    ks = sorted(rng.sample(range(1, denominator), count))
    return [lo + (hi - lo) * Fraction(k, denominator) for k in ks]


def _increments(rng, count, spread):
    raw = [rng.randint(1, spread) for _ in range(count)]
    total = sum(raw)
    acc, out = 0, [Fraction(0)]
    for r in raw:
        acc += r
        out.append(Fraction(acc, total))
    return out


def random_pl_homeo(rng: random.Random, pieces: int = 4, interval: Interval = UNIT,
                    spread: int = 4) -> PLHomeo:
    """Endpoint-fixing PL map; slopes lie in ``[1/spread**2, spread**2]``."""
    xs = _increments(rng, pieces, spread)
    ys = _increments(rng, pieces, spread)
    unit = from_points(zip(xs, ys))
    return unit if interval == UNIT else affine_conjugate(unit, interval)


def random_pl_fixing(rng: random.Random, point, pieces: int = 3, spread: int = 3) -> PLHomeo:
    """Endpoint-fixing map of [0, 1] that also fixes the interior ``point``."""
    point = as_rational(point)
    left = random_pl_homeo(rng, pieces, Interval(0, point), spread)
    right = random_pl_homeo(rng, pieces, Interval(point, 1), spread)
    return from_points(list(left.points) + list(right.points[1:]))


def random_bump(rng: random.Random, interval: Interval, parity: int,
                strength: Tuple[Fraction, Fraction] = (Fraction(1, 3), Fraction(1, 2)),
                breakpoints: int = 2, margin=None) -> PLHomeo:
    """Bump on ``interval`` (only the endpoints fixed) of the given parity.

    Interior breakpoints sit on ``u ↦ u ± t·u(1-u)``, which is increasing for
    ``t < 1``, so the result stays strictly on one side of the diagonal.
    With ``margin`` set, breakpoints are pinned at ``margin`` and
    ``1 - margin`` (in unit coordinates), so the slopes at the two endpoints
    are ``1 ± t(1 - margin)`` and vary only through ``t``.
    """
    lo_t, hi_t = strength
    t = lo_t + (hi_t - lo_t) * Fraction(rng.randint(0, 16), 16)
    if margin is None:
        us = random_sorted(rng, 0, 1, breakpoints, 32)
    else:
        m = as_rational(margin)
        us = [m] + random_sorted(rng, m, 1 - m, breakpoints, 32) + [1 - m]
    pts = [(Fraction(0), Fraction(0))]
    pts += [(u, u + parity * t * u * (1 - u)) for u in us]
    pts.append((Fraction(1), Fraction(1)))
    unit = from_points(pts)
    return unit if interval == UNIT else affine_conjugate(unit, interval)


Token = Tuple[int, bool]


def random_signature(rng: random.Random, orbitals: int = 3, allow_intervals: bool = True
                     ) -> Tuple[Token, ...]:
    """Random alternating token sequence starting and ending with a fixed token."""
    tokens = []
    for i in range(orbitals + 1):
        is_interval = allow_intervals and 0 < i < orbitals and rng.random() < 0.25
        tokens.append((0, is_interval))
        if i < orbitals:
            tokens.append((rng.choice((1, -1)), False))
    return tuple(tokens)


def random_map_with_signature(rng: random.Random, signature: Sequence[Token],
                              denominator: int = 512, **bump_kw) -> PLHomeo:
    """PL self-map of [0, 1] whose orbital signature is ``signature``."""
    fixed = [tok for tok in signature if tok[0] == 0]
    inner_cuts = sum(2 if is_int else 1 for _, is_int in fixed) - 2
    cuts = [Fraction(0)] + random_sorted(rng, 0, 1, inner_cuts, denominator) + [Fraction(1)]
    spans, k = [], 0
    for _, is_int in fixed:
        if is_int:
            spans.append((cuts[k], cuts[k + 1]))
            k += 2
        else:
            spans.append((cuts[k], cuts[k]))
            k += 1
    parities = [tok[0] for tok in signature if tok[0] != 0]
    pts = []
    for i, parity in enumerate(parities):
        left, right = spans[i][1], spans[i + 1][0]
        bump = random_bump(rng, Interval(left, right), parity, **bump_kw)
        pts += bump.points if not pts else bump.points[1:]
        if spans[i + 1][0] < spans[i + 1][1]:
            pts.append((spans[i + 1][1], spans[i + 1][1]))
    if not parities:
        return from_points([(0, 0), (1, 1)])
    if spans[0][0] < spans[0][1]:
        pts.insert(0, (spans[0][0], spans[0][0]))
    return from_points(pts)
