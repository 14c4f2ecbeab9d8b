"""Command-line entry point: ``achomeo <subcommand> ...``.

Maps are read from JSON files or inline JSON (``{"points": [["0","0"], ...]}``
or a bare point list).  Rationals print as ``"p/q"`` together with a 12-digit
decimal.  Exit codes: 0 ok, 2 usage, 3 parse, 4 validation, 5 construction,
6 budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import acmetric, constructions, densitysearch, dynamics, orbitmaps, sampling
from .errors import AchomeoError, ParseError
from .plcore import (
    PLFunction,
    PLHomeo,
    as_rational,
    decimal_str,
    format_rational,
    identity,
    pl_from_json,
)


# -- input helpers -----------------------------------------------------------

def _load_json(source: str):
    if source == "-":
        text = sys.stdin.read()
    elif source.lstrip().startswith(("{", "[")):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {source[:40]!r}: {exc}") from exc


def _load_map(source: str, cls=PLHomeo) -> PLFunction:
    if source == "id":
        return identity()
    data = _load_json(source)
    if isinstance(data, list):
        data = {"points": data}
    return pl_from_json(data, cls)


def _q(value: Fraction) -> dict:
    return {"value": format_rational(value), "decimal": decimal_str(value)}


def _emit(args, payload):
    text = json.dumps(payload, indent=2) + "\n" if not isinstance(payload, str) else payload
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _cap(args):
    return args.iteration_cap if args.iteration_cap is not None else orbitmaps.DEFAULT_ITERATION_CAP


# -- subcommands -------------------------------------------------------------

def cmd_rho(args):
    f, g = _load_map(args.f, PLFunction), _load_map(args.g, PLFunction)
    a = as_rational(args.a) if args.a is not None else None
    b = as_rational(args.b) if args.b is not None else None
    out = {
        "rho": _q(acmetric.rho_exact(f, g, a, b)),
        "upper_bound": _q(acmetric.rho_upper_bound(f, g, a, b)),
    }
    if f.domain == g.domain and a is None and b is None:
        out["uniform"] = _q(acmetric.uniform_dist(f, g))
    return out


def cmd_fix(args):
    return dynamics.fixed_set(_load_map(args.f)).to_json()


def cmd_orbitals(args):
    f = _load_map(args.f)
    return {
        "orbitals": [o.to_json() for o in dynamics.orbitals(f)],
        "signature": str(orbitmaps.orbital_signature(f)),
    }


def cmd_generic_check(args):
    return dynamics.genericity_report(_load_map(args.f)).to_json()


def cmd_sawtooth_sweep(args):
    rows = []
    ident = identity()
    for n in range(2, args.n_max + 1):
        f = constructions.sawtooth(n)
        rows.append((n, acmetric.rho_exact(f, ident), acmetric.uniform_dist(f, ident),
                     acmetric.rho_upper_bound(f, ident)))
    return acmetric.sweep_rows_to_csv(rows)


def cmd_wobble(args):
    w = constructions.wobble(as_rational(args.a), as_rational(args.b))
    return {"map": w.to_json(), "fixed": dynamics.fixed_set(w).to_json(),
            "orbitals": [o.to_json() for o in dynamics.orbitals(w)]}


def cmd_blowup(args):
    phi = _load_map(args.f)
    sites = tuple(tuple(as_rational(v) for v in site) for site in _load_json(args.sites))
    psi, bound = constructions.blow_up(constructions.BlowUpSpec(phi, sites))
    return {"psi": psi.to_json(), "bound": _q(bound), "rho": _q(acmetric.rho_exact(phi, psi))}


def cmd_cantor_sweep(args):
    rows = []
    for k in range(1, args.k_max + 1):
        m0, m1 = constructions.mix(k), constructions.mix(k + 1)
        rows.append((k, acmetric.rho_exact(m0, m1), acmetric.uniform_dist(m0, m1),
                     acmetric.rho_upper_bound(m0, m1)))
    return acmetric.sweep_rows_to_csv(rows)


def cmd_conjugate(args):
    f, g = _load_map(args.f), _load_map(args.g)
    h = orbitmaps.global_conjugator(f, g)
    out = {"conjugator": h.to_json()}
    if args.at:
        pts = [as_rational(v) for v in args.at]
        out["values"] = {format_rational(x): _q(orbitmaps.lazy_eval(h, x, _cap(args)))
                         for x in pts}
    return out


def _pair_from_args(args):
    if args.pair:
        return constructions.generator_pair_from_json(_load_json(args.pair))
    rng = random.Random(args.seed)
    f = _load_map(args.f) if args.f else sampling.random_pl_homeo(rng)
    g = _load_map(args.g) if args.g else sampling.random_pl_homeo(rng)
    spec = constructions.default_generator_spec(f, g, as_rational(args.delta))
    return constructions.generator_pair(spec)


def _add_pair_args(p):
    p.add_argument("--pair", help="generator pair JSON (as emitted by `generators`)")
    p.add_argument("--f", help="first map (random from --seed when omitted)")
    p.add_argument("--g", help="second map (random from --seed when omitted)")
    p.add_argument("--delta", default="1/10")


def cmd_generators(args):
    pair = _pair_from_args(args)
    checks = constructions.check_tiles(pair, args.tile_depth)
    out = pair.to_json()
    out["certificates"] = {
        "rho_g": _q(pair.rho_g()),
        "g_bound": _q(pair.g_bound()),
        "f_bound": _q(pair.f_bound()),
        "rho_f_upper": _q(pair.rho_f_upper()),
        "tiles_ok": all(c.ok for c in checks),
    }
    return out


def _target(args):
    if args.target == "wobble":
        return constructions.wobble()
    return _load_map(args.target)


def cmd_search(args):
    pair = _pair_from_args(args)
    target = _target(args)
    partition = acmetric.Partition.dyadic(0, 1, args.level)
    report = densitysearch.best_approx((pair.f_tilde, orbitmaps.Atom(pair.g_tilde)), target,
                                       args.max_word_len, partition, _cap(args), args.workers)
    if args.trace_csv:
        Path(args.trace_csv).write_text(report.trace_csv())
    return report.to_json()


def cmd_proof_approx(args):
    pair = _pair_from_args(args)
    report = densitysearch.proof_guided_approx(
        pair, _target(args), as_rational(args.epsilon), args.max_word_len, args.cells,
        iteration_cap=_cap(args))
    return report.to_json()


def cmd_singular_mass(args):
    h = _load_map(args.f, PLFunction) if args.f else None
    if args.cantor is not None:
        h = constructions.cantor_stair(args.cantor)
    elif args.conjugator:
        h = orbitmaps.lazy_from_json(_load_json(args.conjugator))
    if h is None:
        raise ParseError("one of --f, --cantor, --conjugator is required")
    mesh = as_rational(args.mesh)
    mass = acmetric.singular_mass(h, mesh, as_rational(args.threshold))
    return {"singular_mass": _q(mass)}


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="achomeo", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--iteration-cap", type=int, default=None,
                        help="PL applications per lazy evaluation "
                             "(default: $ACHOMEO_ITERATION_CAP or 65536)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("rho", cmd_rho, "exact ρ distance of two PL maps")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--a")
    p.add_argument("--b")

    for name, func, text in (("fix", cmd_fix, "fixed-point set"),
                             ("orbitals", cmd_orbitals, "orbitals and signature"),
                             ("generic-check", cmd_generic_check, "genericity properties")):
        add(name, func, text).add_argument("--f", required=True)

    add("sawtooth-sweep", cmd_sawtooth_sweep, "CSV of ρ(sawtooth(n), id)").add_argument(
        "--n-max", type=int, default=64)

    p = add("wobble", cmd_wobble, "the three-orbital example map")
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="1")

    p = add("blowup", cmd_blowup, "blow fixed points up into fixed intervals")
    p.add_argument("--f", required=True)
    p.add_argument("--sites", required=True, help='JSON list of [lo, p, hi] triples')

    add("cantor-sweep", cmd_cantor_sweep, "CSV of ρ(mix(k), mix(k+1))").add_argument(
        "--k-max", type=int, default=8)

    p = add("conjugate", cmd_conjugate, "conjugator h with h∘f = g∘h")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--at", nargs="*", help="evaluate h at these rationals")

    p = add("generators", cmd_generators, "two-generator approximation of (f, g)")
    _add_pair_args(p)
    p.add_argument("--tile-depth", type=int, default=20)

    p = add("search", cmd_search, "brute-force word search towards a target")
    _add_pair_args(p)
    p.add_argument("--target", default="wobble", help='map, or "wobble"')
    p.add_argument("--max-word-len", type=int, default=4)
    p.add_argument("--level", type=int, default=5, help="dyadic partition level")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trace-csv")

    p = add("proof-approx", cmd_proof_approx, "proof-guided approximation of a target")
    _add_pair_args(p)
    p.add_argument("--target", default="wobble", help='map, or "wobble"')
    p.add_argument("--epsilon", default="1")
    p.add_argument("--max-word-len", type=int, default=3)
    p.add_argument("--cells", type=int, default=16)

    p = add("singular-mass", cmd_singular_mass, "mass of steep cells at a mesh")
    p.add_argument("--f")
    p.add_argument("--cantor", type=int)
    p.add_argument("--conjugator", help="LazyHomeo JSON")
    p.add_argument("--mesh", default="1/65536")
    p.add_argument("--threshold", default="64")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _emit(args, args.func(args))
    except AchomeoError as exc:
        print(f"achomeo {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
