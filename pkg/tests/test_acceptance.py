"""Acceptance suite: one check per criterion, each timed against its budget.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines, or
directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from fractions import Fraction as Q

import pytest

from achomeo.acmetric import (Partition, rho_exact, rho_sampled_lower,
                              singular_mass, uniform_dist)
from achomeo.constructions import (BlowUpSpec, blow_up, cantor_stair, check_tiles,
                                   default_generator_spec, generator_pair, mix, sawtooth, wobble)
from achomeo.densitysearch import Word, best_approx, proof_guided_approx
from achomeo.dynamics import fixed_set, genericity_report
from achomeo.errors import NoEscape, PushFailed
from achomeo.orbitmaps import Atom, bump_conjugator, global_conjugator, lazy_eval
from achomeo.plcore import compose, identity
from achomeo.sampling import (random_bump, random_map_with_signature, random_pl_fixing,
                              random_pl_homeo, random_rational, random_signature)
from achomeo.plcore import UNIT

ID = identity()


def segment_sum(f, g):
    # slope-free oracle: difference quotients on the merged breakpoints
    xs = sorted(set(f.xs) | set(g.xs))
    return sum((abs((f(b) - f(a)) - (g(b) - g(a))) for a, b in zip(xs, xs[1:])), Q(0))


def c1_sawtooth():
    for n in range(2, 65):
        assert rho_exact(sawtooth(n), ID, 0, 1) == 2 - Q(4, n), n
    return "rho(sawtooth(n), id) = 2 - 4/n for n = 2..64"


def c2_diameter():
    rng = random.Random(2)
    worst = Q(0)
    for _ in range(500):
        f, g = random_pl_homeo(rng, 6), random_pl_homeo(rng, 6)
        r = rho_exact(f, g)
        assert r <= 2
        worst = max(worst, r)
    assert rho_exact(sawtooth(64), ID) == 2 - Q(1, 16)
    return f"500 pairs <= 2 (max {float(worst):.4f}); sawtooth(64) gives 31/16"


def c3_metric_laws():
    rng = random.Random(3)
    for _ in range(200):
        f, g, k = (random_pl_homeo(rng, 5) for _ in range(3))
        h = random_pl_homeo(rng, 4)
        m = random_rational(rng, 0, 1, 1024)
        r = rho_exact(f, g)
        assert r == rho_exact(g, f)
        assert rho_exact(f, k) <= r + rho_exact(g, k)
        assert r == rho_exact(f, g, 0, m) + rho_exact(f, g, m, 1)
        assert rho_exact(compose(f, h), compose(g, h)) == r
        assert 2 * uniform_dist(f, g) <= r
    return "symmetry, triangle, additivity, right-invariance, 2*uniform <= rho on 200 triples"


def c4_blowup():
    rng = random.Random(4)
    for _ in range(100):
        p = random_rational(rng, Q(1, 8), Q(7, 8), 96)
        phi = random_pl_fixing(rng, p, spread=2)
        a = random_rational(rng, 0, p, 16) if rng.random() < 0.8 else p
        b = random_rational(rng, p, 1, 16) if rng.random() < 0.8 else p
        psi, bound = blow_up(BlowUpSpec(phi, ((a, p, b),)))
        assert rho_exact(phi, psi) <= bound
        assert all(psi(x) == x for x in (a, p, b))
        bounds = [blow_up(BlowUpSpec(phi, ((p - r, p, p + r),)))[1]
                  for r in (Q(1, 8), Q(1, 32), Q(1, 128))]
        assert bounds[0] >= bounds[1] >= bounds[2]
        assert bounds[2] < Q(1, 10)
    return "100 instances: rho <= bound; radii 1/8, 1/32, 1/128 decrease to < 1/10"


def c5_sampled_tv():
    rng = random.Random(5)
    for _ in range(100):
        f, g = random_pl_homeo(rng, 5), random_pl_homeo(rng, 5)
        exact = rho_exact(f, g)
        assert rho_sampled_lower(f, g, Partition.from_breakpoints(f, g)) == exact
        prev = Q(0)
        for level in range(0, 7):
            low = rho_sampled_lower(f, g, Partition.dyadic(0, 1, level))
            assert prev <= low <= exact
            prev = low
    return "breakpoint partition reproduces rho; dyadic levels 0..6 climb monotonically below it"


def _matched_pair(rng):
    sig = random_signature(rng, rng.randint(1, 4))
    return (random_map_with_signature(rng, sig), random_map_with_signature(rng, sig))


def c6_conjugacy():
    rng = random.Random(6)
    for i in range(50):
        if i % 2:
            f, g = _matched_pair(rng)
            h = global_conjugator(f, g)
            lo, hi = Q(0), Q(1)
        else:
            parity = rng.choice((1, -1))
            f, g = random_bump(rng, UNIT, parity), random_bump(rng, UNIT, parity)
            h = bump_conjugator(f, g)
            lo, hi = Q(0), Q(1)
        assert lazy_eval(h, lo) == lo and lazy_eval(h, hi) == hi
        for _ in range(100):
            x = random_rational(rng, lo, hi, 10**6)
            assert lazy_eval(h, f(x)) == g(lazy_eval(h, x))
    return "h(f(x)) = g(h(x)) exactly at 100 points for 25 bump and 25 pasted conjugators"


def c7_singular_mass():
    mesh = Q(1, 2**16)
    rng = random.Random(7)
    tame = {"margin": Q(1, 4)}
    f, g = random_bump(rng, UNIT, 1, **tame), random_bump(rng, UNIT, 1, **tame)
    masses = [singular_mass(bump_conjugator(f, g), mesh, 64)]
    sig = ((0, False), (1, False), (0, False), (-1, False), (0, False))
    f = random_map_with_signature(rng, sig, **tame)
    g = random_map_with_signature(rng, sig, **tame)
    masses.append(singular_mass(global_conjugator(f, g), mesh, 64))
    assert all(m <= Q(1, 100) for m in masses), masses
    for k in range(11, 15):
        assert (Q(3, 2)) ** k > 64
        assert singular_mass(cantor_stair(k), Q(1, 3**k), 64) == 1
    return (f"conjugator masses {[float(m) for m in masses]} at mesh 2^-16; "
            "cantor_stair(k) mass 1 for k = 11..14")


def c8_finer_topology():
    for k in range(0, 9):
        a, b = mix(k), mix(k + 1)
        assert segment_sum(a, b) == Q(1, 3)
        assert rho_exact(a, b) == Q(1, 3)
        assert uniform_dist(a, b) <= Q(1, 2**k)
    return "rho(mix(k), mix(k+1)) = 1/3 (segment-sum oracle agrees), uniform <= 2^-k, k <= 8"


def _generator_pairs(count, delta):
    rng = random.Random(9)
    pairs = []
    while len(pairs) < count:
        f, g = random_pl_homeo(rng), random_pl_homeo(rng)
        if fixed_set(f).intersect(fixed_set(g)).ranges() != [(0, 0), (1, 1)]:
            continue  # outside the construction's hypothesis
        pairs.append(generator_pair(default_generator_spec(f, g, delta)))
    return pairs


def c9_generators():
    delta = Q(1, 10)
    for pair in _generator_pairs(10, delta):
        f, g, alpha = pair.spec.f, pair.spec.g, pair.alpha
        assert pair.rho_g() <= 2 * g(alpha) < delta
        assert pair.rho_f_upper() <= 2 * f(alpha) < delta
        assert all(c.ok for c in check_tiles(pair, 20))
    return "10 seeded pairs: rho(g, g~) <= 2g(alpha) < 1/10, f~ bound <= 2f(alpha), tiles clean"


def c10_density_probe():
    pair = _generator_pairs(1, Q(1, 10))[0]
    gens = (pair.f_tilde, Atom(pair.g_tilde))
    rng = random.Random(10)
    targets = [wobble(), random_pl_homeo(rng, 3), random_pl_homeo(rng, 4)]
    P = Partition.dyadic(0, 1, 4)
    finals = []
    for target in targets:
        rep = best_approx(gens, target, 8, P)
        assert list(rep.trace) == sorted(rep.trace, reverse=True)
        finals.append(float(rep.trace[-1]))
    rep = proof_guided_approx(pair, ID, Q(1, 10))
    assert rep.best_word == Word(()) and rep.blowup_bound == rep.outer_budget == rep.middle == 0
    eps = Q(1)
    try:
        rep = proof_guided_approx(pair, wobble(), eps, max_len=3, cells=16)
    except (PushFailed, NoEscape) as exc:  # steps 2-4 may fail; then nothing is claimed
        return f"traces nonincreasing {finals}; proof-guided stopped early: {exc}"
    assert rep.outer_budget < eps / 3
    return (f"traces nonincreasing, final {[round(v, 4) for v in finals]}; outer budget "
            f"{float(rep.outer_budget):.2e} < eps/3, middle {float(rep.middle):.3f}"
            f"{' (shortfall)' if rep.shortfall else ''}")


def c11_genericity():
    rep = genericity_report(ID)
    assert not rep.null_fixed and rep.fixed_measure == 1
    for n in range(2, 40):
        rep = genericity_report(sawtooth(n))
        if n > 2:
            assert not rep.is_cantor and rep.null_fixed
    rng = random.Random(11)
    for _ in range(200):
        assert not genericity_report(random_pl_homeo(rng, 6)).is_cantor
    return "identity fails (iii); sawtooth fails (i), passes (iii); no random PL map passes (i)"


CRITERIA = [
    (1, "sawtooth exactness", c1_sawtooth, 1),
    (2, "diameter", c2_diameter, 5),
    (3, "metric laws", c3_metric_laws, 10),
    (4, "blow-up bound", c4_blowup, 10),
    (5, "sampled-TV oracle", c5_sampled_tv, 10),
    (6, "conjugacy identities", c6_conjugacy, 30),
    (7, "AC evidence", c7_singular_mass, 30),
    (8, "finer topology", c8_finer_topology, 5),
    (9, "generator construction", c9_generators, 10),
    (10, "density probe", c10_density_probe, 300),
    (11, "genericity checkers", c11_genericity, 5),
]


def run_criterion(number, name, check, budget):
    start = time.perf_counter()
    try:
        detail = check()
        ok = True
    except AssertionError as exc:
        detail, ok = f"assertion failed: {exc}", False
    elapsed = time.perf_counter() - start
    if ok and elapsed > budget:
        ok, detail = False, f"{detail}; took {elapsed:.1f}s > {budget}s"
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name} ({elapsed:.2f}s): {detail}"
    return ok, line


@pytest.mark.parametrize("number, name, check, budget", CRITERIA,
                         ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, check, budget, capsys):
    ok, line = run_criterion(number, name, check, budget)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
