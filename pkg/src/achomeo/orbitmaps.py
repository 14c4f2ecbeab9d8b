"""Lazily evaluated homeomorphisms and conjugator constructions.

A :class:`LazyHomeo` is an immutable expression tree over PL atoms.  It is
evaluated exactly on rationals; nodes that encode maps with infinitely many
breakpoints (orbit extensions, conjugated tiles) iterate their PL atoms and
charge each application against an iteration cap.
"""

from __future__ import annotations

import bisect
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

from .dynamics import fixed_set, orbitals
from .errors import (
    DomainMismatch,
    HasInteriorFixedPoint,
    IterationCapExceeded,
    OrbitalMismatch,
    OutOfDomain,
    ParityMismatch,
    ParseError,
)
from .plcore import (
    Interval,
    PLHomeo,
    affine_map,
    as_rational,
    format_rational,
    identity,
    pl_from_json,
)


def _default_cap() -> int:
    raw = os.environ.get("ACHOMEO_ITERATION_CAP")
    return int(raw) if raw else 1 << 16


DEFAULT_ITERATION_CAP = _default_cap()


class _Meter:
    __slots__ = ("cap", "count")

    def __init__(self, cap: int):
        self.cap = cap
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.cap:
            raise IterationCapExceeded(f"more than {self.cap} PL applications")


class LazyHomeo:
    """Base class; subclasses implement ``_fwd`` and ``_bwd`` (the inverse)."""

    domain: Interval
    codomain: Interval

    def _fwd(self, x: Fraction, meter: _Meter) -> Fraction:
        raise NotImplementedError

    def _bwd(self, y: Fraction, meter: _Meter) -> Fraction:
        raise NotImplementedError

    def __call__(self, x) -> Fraction:
        return lazy_eval(self, x)

    def inverse(self) -> "LazyHomeo":
        return Inverse(self)

    def to_json(self) -> dict:
        raise NotImplementedError


def _check(interval: Interval, x: Fraction):
    if not interval.lo <= x <= interval.hi:
        raise OutOfDomain(f"{format_rational(x)} outside {interval}")


def lazy_eval(h: LazyHomeo, x, iteration_cap: int = None) -> Fraction:
    return eval_counted(h, x, iteration_cap)[0]


def eval_counted(h: LazyHomeo, x, iteration_cap: int = None) -> Tuple[Fraction, int]:
    """Evaluate and report the number of PL-atom applications used."""
    x = as_rational(x)
    _check(h.domain, x)
    meter = _Meter(DEFAULT_ITERATION_CAP if iteration_cap is None else iteration_cap)
    return h._fwd(x, meter), meter.count


# -- node kinds -------------------------------------------------------------

class Atom(LazyHomeo):
    def __init__(self, pl: PLHomeo):
        self.map = pl

    @property
    def domain(self):
        return self.map.domain

    @property
    def codomain(self):
        return self.map.codomain

    def _fwd(self, x, meter):
        meter.tick()
        return self.map.eval(x)

    def _bwd(self, y, meter):
        meter.tick()
        return self.map.inverse().eval(y)

    def inverse(self):
        return Atom(self.map.inverse())

    def to_json(self):
        return {"kind": "atom", "map": self.map.to_json()}


class Compose(LazyHomeo):
    """``outer ∘ inner``."""

    def __init__(self, outer: LazyHomeo, inner: LazyHomeo):
        if inner.codomain != outer.domain:
            raise DomainMismatch(f"cannot compose: {inner.codomain} != {outer.domain}")
        self.outer, self.inner = outer, inner

    @property
    def domain(self):
        return self.inner.domain

    @property
    def codomain(self):
        return self.outer.codomain

    def _fwd(self, x, meter):
        return self.outer._fwd(self.inner._fwd(x, meter), meter)

    def _bwd(self, y, meter):
        return self.inner._bwd(self.outer._bwd(y, meter), meter)

    def to_json(self):
        return {"kind": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


class Inverse(LazyHomeo):
    def __init__(self, of: LazyHomeo):
        self.of = of

    @property
    def domain(self):
        return self.of.codomain

    @property
    def codomain(self):
        return self.of.domain

    def _fwd(self, x, meter):
        return self.of._bwd(x, meter)

    def _bwd(self, y, meter):
        return self.of._fwd(y, meter)

    def inverse(self):
        return self.of

    def to_json(self):
        return {"kind": "inverse", "of": self.of.to_json()}


class Power(LazyHomeo):
    def __init__(self, of: LazyHomeo, n: int):
        if of.domain != of.codomain:
            raise DomainMismatch("power needs a self-map")
        self.of, self.n = of, n

    @property
    def domain(self):
        return self.of.domain

    codomain = domain

    def _fwd(self, x, meter):
        step = self.of._fwd if self.n > 0 else self.of._bwd
        for _ in range(abs(self.n)):
            x = step(x, meter)
        return x

    def _bwd(self, y, meter):
        step = self.of._bwd if self.n > 0 else self.of._fwd
        for _ in range(abs(self.n)):
            y = step(y, meter)
        return y

    def inverse(self):
        return Power(self.of, -self.n)

    def to_json(self):
        return {"kind": "power", "of": self.of.to_json(), "n": self.n}


class Tiled(LazyHomeo):
    """Map built from conjugated tiles accumulating at ``shift.domain.lo``.

    With ``x_j := shift⁻ʲ(x0)``, the map is ``rest`` on ``[x0, hi]`` and
    ``shift⁻ʲ ∘ phis[j mod N] ∘ shiftʲ`` on ``[x_{j+1}, x_j]``.  ``shift``
    must satisfy ``shift(x) > x`` on ``(lo, x0]``; each ``phis[i]`` is a
    self-map of ``[x1, x0]`` and ``rest`` a self-map of ``[x0, hi]``.
    """

    def __init__(self, shift: PLHomeo, phis: Sequence[PLHomeo], x0, rest: PLHomeo):
        x0 = as_rational(x0)
        self.shift, self.phis, self.x0, self.rest = shift, tuple(phis), x0, rest
        lo = shift.domain.lo
        if not lo < x0 or shift(x0) <= x0:
            raise DomainMismatch("shift must push x0 upward")
        self.x1 = shift.eval_inverse(x0)
        for phi in self.phis:
            if phi.domain != Interval(self.x1, x0) or not phi.is_self_map:
                raise DomainMismatch(f"tile map must be a self-map of [{self.x1}, {x0}]")
        if rest.domain.lo != x0 or not rest.is_self_map:
            raise DomainMismatch("rest must be a self-map of [x0, hi]")
        self._phis_inv = tuple(p.inverse() for p in self.phis)

    @property
    def domain(self):
        return Interval(self.shift.domain.lo, self.rest.domain.hi)

    codomain = domain

    def boundaries(self) -> Iterator[Fraction]:
        """Yield ``x_0, x_1, x_2, ...`` (strictly decreasing)."""
        x = self.x0
        inv = self.shift.inverse()
        while True:
            yield x
            x = inv.eval(x)

    def _apply(self, x, meter, tile_maps, rest):
        lo = self.shift.domain.lo
        if x == lo:
            return x
        if x >= self.x0:
            meter.tick()
            return rest(x)
        t = 0
        shift = self.shift
        while x < self.x1:
            meter.tick()
            x = shift.eval(x)
            t += 1
        meter.tick()
        x = tile_maps[t % len(tile_maps)](x)
        back = shift.inverse()
        for _ in range(t):
            meter.tick()
            x = back.eval(x)
        return x

    def _fwd(self, x, meter):
        return self._apply(x, meter, self.phis, self.rest)

    def _bwd(self, y, meter):
        return self._apply(y, meter, self._phis_inv, self.rest.inverse())

    def inverse(self):
        return Tiled(self.shift, [p.inverse() for p in self.phis], self.x0, self.rest.inverse())

    def to_json(self):
        return {
            "kind": "tiled",
            "shift": self.shift.to_json(),
            "phis": [p.to_json() for p in self.phis],
            "x0": format_rational(self.x0),
            "rest": self.rest.to_json(),
        }


def _parity(f: PLHomeo) -> int:
    mid = (f.xs[0] + f.xs[-1]) / 2
    d = f(mid) - mid
    return (d > 0) - (d < 0)


class OrbitExtension(LazyHomeo):
    """``h(x) = gⁿ(h0(f⁻ⁿ(x)))`` with ``f⁻ⁿ(x)`` in the fundamental domain.

    ``f`` and ``g`` are bumps (self-maps fixing only their endpoints) of the
    same parity; ``h0`` maps the fundamental domain between ``x0`` and
    ``f(x0)`` onto the one between ``y0`` and ``g(y0)``.
    """


    def __init__(self, f: PLHomeo, g: PLHomeo, h0: PLHomeo, x0, y0):
        self.f, self.g, self.h0 = f, g, h0
        self.x0, self.y0 = as_rational(x0), as_rational(y0)
        self.parity = _parity(f)
        fx0 = f(self.x0)
        self.fund = (min(self.x0, fx0), max(self.x0, fx0))

    @property
    def domain(self):
        return self.f.domain

    @property
    def codomain(self):
        return self.g.domain

    def _fwd(self, x, meter):
        f = self.f
        a, b = f.xs[0], f.xs[-1]
        if x == a:
            return self.g.xs[0]
        if x == b:
            return self.g.xs[-1]
        lo, hi = self.fund
        f_inv = f.inverse()
        # down = f⁻¹ for positive parity; n counts net powers of f⁻¹ applied
        down, down_n, up, up_n = (f_inv, 1, f, -1) if self.parity > 0 else (f, -1, f_inv, 1)
        n = 0
        while x >= hi:
            meter.tick()
            x = down.eval(x)
            n += down_n
        while x < lo:
            meter.tick()
            x = up.eval(x)
            n += up_n
        meter.tick()
        z = self.h0.eval(x)
        step = self.g if n > 0 else self.g.inverse()
        for _ in range(abs(n)):
            meter.tick()
            z = step.eval(z)
        return z

    def _bwd(self, y, meter):
        return self.inverse()._fwd(y, meter)

    def inverse(self):
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = OrbitExtension(self.g, self.f, self.h0.inverse(), self.y0, self.x0)
            self._inv = inv
        return inv

    def to_json(self):
        return {
            "kind": "orbit_extension",
            "f": self.f.to_json(),
            "g": self.g.to_json(),
            "h0": self.h0.to_json(),
            "x0": format_rational(self.x0),
            "y0": format_rational(self.y0),
        }


class Paste(LazyHomeo):
    """Contiguous closed pieces, each carried by its own LazyHomeo."""


    def __init__(self, pieces: Sequence[LazyHomeo]):
        pieces = tuple(pieces)
        for p, q in zip(pieces, pieces[1:]):
            if p.domain.hi != q.domain.lo or p.codomain.hi != q.codomain.lo:
                raise DomainMismatch("pasted pieces must be contiguous in domain and image")
        self.pieces = pieces
        self._los = [p.domain.lo for p in pieces]

    @property
    def domain(self):
        return Interval(self.pieces[0].domain.lo, self.pieces[-1].domain.hi)

    @property
    def codomain(self):
        return Interval(self.pieces[0].codomain.lo, self.pieces[-1].codomain.hi)

    def _fwd(self, x, meter):
        i = max(bisect.bisect_right(self._los, x) - 1, 0)
        return self.pieces[i]._fwd(x, meter)

    def _bwd(self, y, meter):
        return self.inverse()._fwd(y, meter)

    def inverse(self):
        inv = self.__dict__.get("_inv")
        if inv is None:
            inv = Paste([p.inverse() for p in self.pieces])
            self._inv = inv
        return inv

    def to_json(self):
        return {"kind": "paste", "pieces": [p.to_json() for p in self.pieces]}


def lazy_from_json(data: dict) -> LazyHomeo:
    try:
        kind = data["kind"]
        if kind == "atom":
            return Atom(pl_from_json(data["map"]))
        if kind == "compose":
            return Compose(lazy_from_json(data["outer"]), lazy_from_json(data["inner"]))
        if kind == "inverse":
            return Inverse(lazy_from_json(data["of"]))
        if kind == "power":
            return Power(lazy_from_json(data["of"]), int(data["n"]))
        if kind == "tiled":
            return Tiled(pl_from_json(data["shift"]), [pl_from_json(p) for p in data["phis"]],
                         as_rational(data["x0"]), pl_from_json(data["rest"]))
        if kind == "orbit_extension":
            return OrbitExtension(pl_from_json(data["f"]), pl_from_json(data["g"]),
                                  pl_from_json(data["h0"]), as_rational(data["x0"]),
                                  as_rational(data["y0"]))
        if kind == "paste":
            return Paste([lazy_from_json(p) for p in data["pieces"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed LazyHomeo JSON: {exc}") from exc
    raise ParseError(f"unknown LazyHomeo kind {kind!r}")


def compose_all(maps: Sequence[LazyHomeo], domain: Interval) -> LazyHomeo:
    """``maps[0] ∘ maps[1] ∘ ... ∘ maps[-1]``; identity atom when empty."""
    if not maps:
        return Atom(identity(domain))
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = Compose(m, out)
    return out


# -- conjugators --------------------------------------------------------------

def _require_bump(f: PLHomeo, name: str):
    fix = fixed_set(f)
    if fix.intervals or fix.points != (f.xs[0], f.xs[-1]):
        raise HasInteriorFixedPoint(f"{name} must fix only its endpoints, fixes {fix.to_json()}")


def fundamental_domain(f: PLHomeo, x0) -> Interval:
    x0 = as_rational(x0)
    fx0 = f(x0)
    return Interval(min(x0, fx0), max(x0, fx0))


def bump_conjugator(f: PLHomeo, g: PLHomeo, x0=None, y0=None, h0: PLHomeo = None) -> OrbitExtension:
    """Conjugator ``h`` with ``h ∘ f = g ∘ h`` between two bumps of equal parity."""
    _require_bump(f, "f")
    _require_bump(g, "g")
    pf, pg = _parity(f), _parity(g)
    if pf != pg:
        raise ParityMismatch(f"parities differ: {pf} vs {pg}")
    a, b = f.domain.lo, f.domain.hi
    c, d = g.domain.lo, g.domain.hi
    x0 = (a + b) / 2 if x0 is None else as_rational(x0)
    y0 = (c + d) / 2 if y0 is None else as_rational(y0)
    if not (a < x0 < b and c < y0 < d):
        raise DomainMismatch("base points must be interior")
    dom, cod = fundamental_domain(f, x0), fundamental_domain(g, y0)
    if h0 is None:
        h0 = affine_map(dom, cod)
    elif h0.domain != dom or h0.codomain != cod:
        raise DomainMismatch(f"h0 must map {dom} onto {cod}")
    return OrbitExtension(f, g, h0, x0, y0)


@dataclass(frozen=True)
class OrbitalSignature:
    tokens: Tuple[Tuple[int, bool], ...]

    def __str__(self):
        names = []
        for parity, is_interval in self.tokens:
            if parity:
                names.append("+1" if parity > 0 else "-1")
            else:
                names.append("fix" if is_interval else "pt")
        return "[" + ", ".join(names) + "]"


def _decompose(f: PLHomeo):
    """Left-to-right pieces: ``("fixed", lo, hi)`` and ``("orbital", lo, hi, parity)``."""
    fixed = fixed_set(f).ranges()
    orbs = {o.span.lo: o for o in orbitals(f)}
    out = []
    for lo, hi in fixed:
        out.append(("fixed", lo, hi))
        if hi in orbs:
            o = orbs[hi]
            out.append(("orbital", o.span.lo, o.span.hi, o.parity))
    return out


def orbital_signature(f: PLHomeo) -> OrbitalSignature:
    tokens = []
    for piece in _decompose(f):
        if piece[0] == "fixed":
            tokens.append((0, piece[1] < piece[2]))
        else:
            tokens.append((piece[3], False))
    return OrbitalSignature(tuple(tokens))


def global_conjugator(f: PLHomeo, g: PLHomeo) -> Paste:
    """Paste bump conjugators over matching orbitals, affine maps over fixed intervals."""
    if f.domain != g.domain or not (f.is_self_map and g.is_self_map):
        raise DomainMismatch("global_conjugator needs self-maps of one interval")
    sf, sg = orbital_signature(f), orbital_signature(g)
    if sf != sg:
        raise OrbitalMismatch(f"signatures differ: {sf} vs {sg}")
    pieces = []
    for pf, pg in zip(_decompose(f), _decompose(g)):
        if pf[0] == "fixed":
            if pf[1] < pf[2]:
                pieces.append(Atom(affine_map(Interval(pf[1], pf[2]), Interval(pg[1], pg[2]))))
        else:
            pieces.append(bump_conjugator(f.restrict(pf[1], pf[2]), g.restrict(pg[1], pg[2])))
    return Paste(pieces)
