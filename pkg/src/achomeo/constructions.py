"""Explicit families and operators: sawtooth, wobble, blow-up, Cantor
staircases, and the two-generator pair with conjugated tiles near 0."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Sequence, Tuple

from .acmetric import rho_exact
from .dynamics import FixedSet, fixed_set
from .errors import (
    BadParameter,
    NotAFixedPoint,
    OverlappingSites,
    SharedFixedPoint,
)
from .orbitmaps import Tiled
from .plcore import (
    UNIT,
    Interval,
    PLFunction,
    PLHomeo,
    affine_conjugate,
    as_rational,
    compose,
    format_rational,
    from_points,
    identity,
    pl_from_json,
)


def sawtooth(n: int) -> PLHomeo:
    """PL map through ``(i/n, i/n)`` and ``(i/n + 1/n², (i+1)/n - 1/n²)``."""
    if n < 2:
        raise BadParameter(f"sawtooth needs n >= 2, got {n}")
    n2 = Fraction(1, n * n)
    pts = [(Fraction(i, n), Fraction(i, n)) for i in range(n + 1)]
    pts += [(Fraction(i, n) + n2, Fraction(i + 1, n) - n2) for i in range(n)]
    return from_points(sorted(pts))


def wobble(a=0, b=1) -> PLHomeo:
    """Five-point map on [a, b] that is above, below, above the diagonal."""
    a, b = as_rational(a), as_rational(b)
    if not a < b:
        raise BadParameter(f"wobble needs a < b, got {a}, {b}")
    return from_points([
        (a, a),
        ((3 * a + b) / 4, (2 * a + b) / 3),
        ((a + b) / 2, (3 * a + 2 * b) / 5),
        ((a + 3 * b) / 4, (a + 4 * b) / 5),
        (b, b),
    ])


# -- blow-up -------------------------------------------------------------

@dataclass(frozen=True)
class BlowUpSpec:
    map: PLHomeo
    sites: Tuple[Tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        sites = tuple(tuple(as_rational(v) for v in s) for s in self.sites)
        object.__setattr__(self, "sites", sites)


def blow_up(spec: BlowUpSpec) -> Tuple[PLHomeo, Fraction]:
    """Replace each site ``[a_i, b_i]`` by a pointwise-fixed interval.

    Between consecutive sites the map is ``φ`` followed by the affine rescaling
    that restores the gap's endpoints.  Returns ``(ψ, bound)`` where ``bound``
    is the site-wise sum bounding ``ρ(φ, ψ)``.
    """
    phi = spec.map
    if not phi.is_self_map:
        raise BadParameter("blow_up needs an endpoint-fixing map")
    lo, hi = phi.domain.lo, phi.domain.hi
    prev_b = None
    bound = Fraction(0)
    for a, x, b in spec.sites:
        if not (lo <= a <= x <= b <= hi):
            raise BadParameter(f"site ({a}, {x}, {b}) is not an ordered triple in {phi.domain}")
        if prev_b is not None and not prev_b < a:
            raise OverlappingSites(f"site starting at {a} overlaps the previous one")
        if phi(x) != x:
            raise NotAFixedPoint(f"{format_rational(x)} is not fixed by the map")
        prev_b = b
        fa, fb = phi(a), phi(b)
        bound += abs(a - fa) + abs(fb - b) + (b - a) + (fb - fa)

    cuts = [lo]
    for a, _, b in spec.sites:
        cuts += [a, b]
    cuts.append(hi)
    pts = {}
    for g_lo, g_hi in zip(cuts[::2], cuts[1::2]):
        if g_lo == g_hi:
            continue
        base = phi(g_lo)
        scale = (g_hi - g_lo) / (phi(g_hi) - base)
        xs = [g_lo, *(t for t in phi.xs if g_lo < t < g_hi), g_hi]
        for t in xs:
            pts[t] = g_lo + scale * (phi(t) - base)
    for a, _, b in spec.sites:
        pts[a], pts[b] = a, b
    return from_points(sorted(pts.items())), bound


# -- Cantor staircase and its mixture with the identity --------------------

def cantor_stair(k: int) -> PLFunction:
    """Stage-``k`` middle-thirds staircase (slope ``(3/2)^k`` or 0)."""
    if k < 0:
        raise BadParameter(f"cantor_stair needs k >= 0, got {k}")
    kept = [(Fraction(0), Fraction(1))]
    for _ in range(k):
        nxt = []
        for l, r in kept:
            third = (r - l) / 3
            nxt += [(l, l + third), (r - third, r)]
        kept = nxt
    step = Fraction(1, 2 ** k)
    pts = []
    for j, (l, r) in enumerate(kept):
        pts += [(l, j * step), (r, (j + 1) * step)]
    dedup = [pts[0]]
    for p in pts[1:]:
        if p[0] != dedup[-1][0]:
            dedup.append(p)
    return PLFunction(dedup)


def mix(k: int) -> PLHomeo:
    """``x ↦ (cantor_stair(k)(x) + x) / 2``."""
    c = cantor_stair(k)
    return from_points((x, (y + x) / 2) for x, y in c.points)


# -- generator pair ---------------------------------------------------------

DEFAULT_PHIS = (
    from_points([(0, 0), (Fraction(1, 4), Fraction(1, 2)), (1, 1)]),
    from_points([(0, 0), (Fraction(2, 3), Fraction(1, 3)), (1, 1)]),
)
ALPHA_BISECTION_DEPTH = 16


@dataclass(frozen=True)
class GeneratorPairSpec:
    """Inputs of the two-generator construction.

    ``phis`` are templates on [0, 1]; they are affinely moved onto the first
    tile ``[x1, x0]`` once the modified ``g`` is known.
    """

    f: PLHomeo
    g: PLHomeo
    delta: Fraction
    alpha: Fraction
    x0: Fraction
    phis: Tuple[PLHomeo, ...] = DEFAULT_PHIS
    N: int = len(DEFAULT_PHIS)

    @property
    def y0(self) -> Fraction:
        a = self.alpha
        return min(a, self.g(a), self.f(a)) / 2


def choose_alpha(f: PLHomeo, g: PLHomeo, delta, depth: int = ALPHA_BISECTION_DEPTH) -> Fraction:
    """Largest dyadic ``k / 2**depth`` with ``f(α), g(α) < δ/2`` (exact bisection)."""
    half = as_rational(delta) / 2

    def ok(t):
        return f(t) < half and g(t) < half

    lo, hi = Fraction(0), Fraction(1)
    if ok(hi):
        raise BadParameter("delta too large: f(1), g(1) < delta/2")
    for _ in range(depth):
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0:
        raise BadParameter("no positive dyadic alpha at this depth")
    return lo


def default_generator_spec(f: PLHomeo, g: PLHomeo, delta, phis: Sequence[PLHomeo] = None,
                           alpha=None, x0=None) -> GeneratorPairSpec:
    delta = as_rational(delta)
    alpha = choose_alpha(f, g, delta) if alpha is None else as_rational(alpha)
    phis = tuple(phis) if phis is not None else DEFAULT_PHIS
    y0 = min(alpha, g(alpha), f(alpha)) / 2
    x0 = y0 / 2 if x0 is None else as_rational(x0)
    return GeneratorPairSpec(f, g, delta, alpha, x0, phis, len(phis))


def _interpolant(x0, alpha, f_alpha, g_tilde) -> PLHomeo:
    # stays strictly on one side of the diagonal over (x0, alpha)
    m = (x0 + alpha) / 2
    for _ in range(64):
        if f_alpha >= alpha:
            q = (m + min(f_alpha, alpha + (alpha - m))) / 2
        else:
            q = (x0 + min(m, f_alpha)) / 2
        if q != g_tilde(m):
            return from_points([(x0, x0), (m, q), (alpha, f_alpha)])
        m = (m + alpha) / 2
    raise SharedFixedPoint("could not place the interpolant off the graph of g~")


@dataclass(frozen=True)
class GeneratorPair:
    spec: GeneratorPairSpec
    f_tilde: Tiled
    g_tilde: PLHomeo
    interpolant: PLHomeo
    y0: Fraction
    x1: Fraction
    tile_phis: Tuple[PLHomeo, ...]

    @property
    def x0(self) -> Fraction:
        return self.spec.x0

    @property
    def alpha(self) -> Fraction:
        return self.spec.alpha

    def xs(self) -> Iterator[Fraction]:
        """``x_n = g~⁻ⁿ(x0)`` for n = 0, 1, 2, ... on demand."""
        return self.f_tilde.boundaries()

    def x(self, n: int) -> Fraction:
        inv = self.g_tilde.inverse()
        x = self.spec.x0
        for _ in range(n):
            x = inv(x)
        return x

    @property
    def rest(self) -> PLHomeo:
        """``f~`` on ``[x0, 1]`` (interpolant then ``f``)."""
        return self.f_tilde.rest

    def rho_g(self) -> Fraction:
        return rho_exact(self.spec.g, self.g_tilde)

    def g_bound(self) -> Fraction:
        return 2 * self.spec.g(self.alpha)

    def f_bound(self) -> Fraction:
        return 2 * self.spec.f(self.alpha)

    def rho_f_upper(self) -> Fraction:
        """Exact ρ on ``[x0, 1]`` plus the increasing-map bound on ``[0, x0]``."""
        f, x0 = self.spec.f, self.spec.x0
        return rho_exact(f, self.rest, x0, 1) + f(x0) + x0

    def to_json(self) -> dict:
        spec = self.spec
        return {
            "f": spec.f.to_json(),
            "g": spec.g.to_json(),
            "g_tilde": self.g_tilde.to_json(),
            "interpolant": self.interpolant.to_json(),
            "phis": [p.to_json() for p in spec.phis],
            "alpha": format_rational(spec.alpha),
            "x0": format_rational(spec.x0),
            "delta": format_rational(spec.delta),
        }


def generator_pair(spec: GeneratorPairSpec) -> GeneratorPair:
    f, g, alpha, x0 = spec.f, spec.g, spec.alpha, spec.x0
    if f.domain != UNIT or g.domain != UNIT or not (f.is_self_map and g.is_self_map):
        raise BadParameter("f and g must be endpoint-fixing maps of [0, 1]")
    if spec.N != len(spec.phis) or spec.N < 1:
        raise BadParameter("N must equal the number of tile maps (at least 1)")
    if not 0 < alpha < 1:
        raise BadParameter(f"alpha {alpha} not in (0, 1)")
    half = spec.delta / 2
    if not (f(alpha) < half and g(alpha) < half):
        raise BadParameter("alpha too large: need f(alpha), g(alpha) < delta/2")
    y0 = spec.y0
    if not 0 < x0 < y0:
        raise BadParameter(f"x0 must lie in (0, {y0})")
    for phi in spec.phis:
        if not phi.is_self_map:
            raise BadParameter("tile templates must be endpoint-fixing")

    g_alpha = g(alpha)
    g_tilde = from_points(
        [(0, 0), (y0 / 3, 2 * y0 / 3), (y0, y0), (alpha, g_alpha)]
        + [(x, y) for x, y in g.points if x > alpha]
    )
    x1 = g_tilde.eval_inverse(x0)
    tile = Interval(x1, x0)
    tile_phis = tuple(affine_conjugate(phi, tile) if phi.domain != tile else phi
                      for phi in spec.phis)
    interp = _interpolant(x0, alpha, f(alpha), g_tilde)
    rest = from_points(list(interp.points) + [(x, y) for x, y in f.points if x > alpha])

    shared = fixed_set(rest).intersect(fixed_set(g_tilde))
    interior = [r for r in shared.ranges() if r[0] < 1]
    if interior:
        lo, hi = interior[0]
        raise SharedFixedPoint(
            f"f~ and g~ share fixed points in [{format_rational(lo)}, {format_rational(hi)}]")

    f_tilde = Tiled(g_tilde, tile_phis, x0, rest)
    return GeneratorPair(spec, f_tilde, g_tilde, interp, y0, x1, tile_phis)


def generator_pair_from_json(data: dict) -> GeneratorPair:
    spec = GeneratorPairSpec(
        f=pl_from_json(data["f"]),
        g=pl_from_json(data["g"]),
        delta=as_rational(data["delta"]),
        alpha=as_rational(data["alpha"]),
        x0=as_rational(data["x0"]),
        phis=tuple(pl_from_json(p) for p in data["phis"]),
        N=len(data["phis"]),
    )
    return generator_pair(spec)


@dataclass(frozen=True)
class TileCheck:
    index: int
    tile: Interval
    tile_fixed: FixedSet
    shared: FixedSet

    @property
    def ok(self) -> bool:
        return not self.shared.ranges()


def tile_maps(pair: GeneratorPair, depth: int) -> List[Tuple[Interval, PLHomeo]]:
    """Explicit PL form of ``f~`` on the tiles ``[x_{m+1}, x_m]``, m < depth."""
    g = pair.g_tilde
    first = Interval(pair.x1, pair.x0)
    to_first = identity(first)  # g~^m restricted to the current tile
    hi, lo = pair.x0, pair.x1
    out = []
    for m in range(depth):
        phi = pair.tile_phis[m % len(pair.tile_phis)]
        out.append((Interval(lo, hi), compose(to_first.inverse(), compose(phi, to_first))))
        nxt = g.eval_inverse(lo)
        to_first = compose(to_first, g.restrict(nxt, lo))
        hi, lo = lo, nxt
    return out


def check_tiles(pair: GeneratorPair, depth: int = 20) -> List[TileCheck]:
    """Verify tile by tile that ``f~`` and ``g~`` share no interior fixed point."""
    g_fix = fixed_set(pair.g_tilde)
    checks = []
    for m, (tile, t_map) in enumerate(tile_maps(pair, depth)):
        t_fix = fixed_set(t_map)
        shared = t_fix.intersect(g_fix)
        if shared.ranges():
            raise SharedFixedPoint(f"tile {m} shares fixed points with g~: {shared.to_json()}")
        checks.append(TileCheck(m, tile, t_fix, shared))
    return checks
