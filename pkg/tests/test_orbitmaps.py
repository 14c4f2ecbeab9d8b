import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings

from achomeo.acmetric import singular_mass
from achomeo.constructions import wobble
from achomeo.errors import (HasInteriorFixedPoint, IterationCapExceeded, OrbitalMismatch,
                            OutOfDomain, ParityMismatch, ParseError)
from achomeo.orbitmaps import (Atom, Compose, Inverse, Power, bump_conjugator, compose_all,
                               eval_counted, global_conjugator, lazy_eval, lazy_from_json,
                               orbital_signature)
from achomeo.plcore import UNIT, Interval, affine_map, compose, from_points, identity, inverse
from achomeo.sampling import (random_bump, random_map_with_signature,
                              random_rational, random_signature)

from .conftest import pl_maps, seeds

F = from_points([(0, 0), (Q(1, 2), Q(3, 4)), (1, 1)])
G = from_points([(0, 0), (Q(1, 4), Q(1, 2)), (1, 1)])


def samples(rng, lo=0, hi=1, count=100):
    return [random_rational(rng, lo, hi, 10**6) for _ in range(count)]


def assert_conjugates(h, f, g, xs):
    for x in xs:
        assert lazy_eval(h, f(x)) == g(lazy_eval(h, x))


class TestNodes:
    def test_atom_matches_eval(self):
        for x in (Q(0), Q(1, 3), Q(1)):
            assert lazy_eval(Atom(F), x) == F(x)

    def test_compose_inverse_power(self):
        x = Q(2, 7)
        assert lazy_eval(Compose(Atom(F), Atom(G)), x) == F(G(x))
        assert lazy_eval(Inverse(Atom(F)), F(x)) == x
        assert lazy_eval(Power(Atom(F), -3), x) == inverse(F)(inverse(F)(inverse(F)(x)))
        assert lazy_eval(compose_all([], UNIT), x) == x

    def test_cap_and_domain(self):
        with pytest.raises(IterationCapExceeded):
            lazy_eval(Power(Atom(F), 10), Q(1, 2), iteration_cap=5)
        assert eval_counted(Power(Atom(F), 10), Q(1, 2))[1] == 10
        with pytest.raises(OutOfDomain):
            lazy_eval(Atom(F), Q(2))

    def test_json_round_trip(self):
        h = Compose(Power(Atom(F), 2), Inverse(bump_conjugator(F, G)))
        again = lazy_from_json(h.to_json())
        for x in samples(random.Random(0), count=10):
            assert lazy_eval(again, x) == lazy_eval(h, x)
        with pytest.raises(ParseError):
            lazy_from_json({"kind": "nope"})
        with pytest.raises(ParseError):
            lazy_from_json({"kind": "power"})

    @given(pl_maps(), pl_maps())
    def test_inverse_round_trip(self, f, g):
        h = Compose(Atom(f), Power(Atom(g), 2))
        for x in (Q(1, 7), Q(5, 9)):
            assert lazy_eval(h.inverse(), lazy_eval(h, x)) == x


class TestBumpConjugator:
    def test_self_conjugacy_is_identity(self):
        h = bump_conjugator(F, F)
        for x in samples(random.Random(1), count=20):
            assert lazy_eval(h, x) == x

    def test_worked_example(self):
        h = bump_conjugator(F, G, Q(1, 2), Q(1, 4))
        assert lazy_eval(h, Q(1, 2)) == Q(1, 4)
        assert lazy_eval(h, Q(3, 4)) == Q(1, 2)
        assert lazy_eval(h, 0) == 0 and lazy_eval(h, 1) == 1
        assert_conjugates(h, F, G, samples(random.Random(2)))

    def test_negative_parity(self):
        f, g = inverse(F), inverse(G)
        h = bump_conjugator(f, g)
        assert_conjugates(h, f, g, samples(random.Random(3)))

    def test_between_different_intervals(self):
        f = random_bump(random.Random(4), Interval(Q(1, 5), Q(1, 2)), -1)
        g = random_bump(random.Random(5), Interval(Q(2, 3), Q(7, 3)), -1)
        h = bump_conjugator(f, g)
        assert lazy_eval(h, Q(1, 5)) == Q(2, 3) and lazy_eval(h, Q(1, 2)) == Q(7, 3)
        assert_conjugates(h, f, g, samples(random.Random(6), Q(1, 5), Q(1, 2)))

    def test_other_fundamental_domain_choice(self):
        dom = Interval(Q(1, 3), F(Q(1, 3)))
        cod = Interval(Q(1, 5), G(Q(1, 5)))
        bent = compose(affine_map(Interval(0, 1), cod),
                       compose(from_points([(0, 0), (Q(1, 3), Q(2, 3)), (1, 1)]),
                               affine_map(dom, Interval(0, 1))))
        h = bump_conjugator(F, G, Q(1, 3), Q(1, 5), bent)
        assert_conjugates(h, F, G, samples(random.Random(7)))

    def test_rejections(self):
        with pytest.raises(ParityMismatch):
            bump_conjugator(F, inverse(G))
        with pytest.raises(HasInteriorFixedPoint):
            bump_conjugator(wobble(), F)

    def test_monotone(self):
        h = bump_conjugator(F, G)
        xs = sorted(samples(random.Random(8)))
        ys = [lazy_eval(h, x) for x in xs]
        assert all(a < b for a, b in zip(ys, ys[1:]))


class TestGlobalConjugator:
    def test_signatures(self):
        assert str(orbital_signature(identity())) == "[fix]"
        assert str(orbital_signature(wobble())) == "[pt, +1, pt, -1, pt, +1, pt]"

    def test_self_conjugator_is_identity(self):
        w = wobble()
        h = global_conjugator(w, w)
        for x in samples(random.Random(9), count=30):
            assert lazy_eval(h, x) == x

    def test_wobble_to_other_map(self):
        rng = random.Random(10)
        w = wobble()
        g = random_map_with_signature(rng, orbital_signature(w).tokens)
        assert orbital_signature(g) == orbital_signature(w)
        assert orbital_signature(g) != orbital_signature(identity())
        h = global_conjugator(w, g)
        assert_conjugates(h, w, g, samples(rng))

    def test_fixed_intervals_map_affinely(self):
        sig = ((0, False), (1, False), (0, True), (-1, False), (0, False))
        rng = random.Random(11)
        f = random_map_with_signature(rng, sig)
        g = random_map_with_signature(rng, sig)
        h = global_conjugator(f, g)
        assert_conjugates(h, f, g, samples(rng))

    def test_mismatch(self):
        with pytest.raises(OrbitalMismatch):
            global_conjugator(wobble(), F)

    @settings(max_examples=15)
    @given(seeds)
    def test_random_signatures(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng, rng.randint(1, 4))
        f = random_map_with_signature(rng, sig)
        g = random_map_with_signature(rng, sig)
        h = global_conjugator(f, g)
        xs = samples(rng, count=20) + [Q(0), Q(1)]
        assert_conjugates(h, f, g, xs)
        assert lazy_eval(h, 0) == 0 and lazy_eval(h, 1) == 1

    @given(pl_maps(), pl_maps())
    def test_signature_conjugation_invariance(self, f, h):
        assert orbital_signature(compose(h, compose(f, inverse(h)))) == orbital_signature(f)

    def test_low_singular_mass_on_a_coarse_mesh(self):
        h = bump_conjugator(F, G)
        assert singular_mass(h, Q(1, 2**10), 64) <= Q(1, 100)
