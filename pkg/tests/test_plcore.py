from fractions import Fraction as Q

import pytest
from hypothesis import given

from achomeo.constructions import sawtooth
from achomeo.errors import (BreakpointBudgetExceeded, DomainMismatch, NonMonotone, OutOfDomain,
                            ParseError, TooFewPoints)
from achomeo.plcore import (
    UNIT, Interval, PLFunction, PLHomeo, affine_conjugate, as_rational, compose, decimal_str,
    format_rational, from_points, identity, inverse, pl_from_json, power,
)

from .conftest import pl_maps, rationals

KINK = from_points([(0, 0), (Q(1, 4), Q(1, 3)), (1, 1)])
HALF = from_points([(0, 0), (Q(1, 2), Q(3, 4)), (1, 1)])


class TestRationals:
    def test_strings_and_ints(self):
        assert as_rational("3/6") == Q(1, 2)
        assert as_rational("0.6") == Q(3, 5)
        assert as_rational(2) == 2

    @pytest.mark.parametrize("bad", [0.5, True, "1/0", "x", None])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            as_rational(bad)

    def test_formatting(self):
        assert format_rational(Q(-6, 4)) == "-3/2"
        assert format_rational(Q(4, 2)) == "2"
        assert decimal_str(Q(2, 3)) == "0.666666666667"
        assert decimal_str(Q(1, 8)) == "0.125"


def test_identity_from_two_points():
    assert from_points([(0, 0), (1, 1)]) == identity()


def test_interpolation_by_hand():
    assert KINK(Q(1, 8)) == Q(1, 6)
    assert KINK(Q(1, 4)) == Q(1, 3)


def test_errors():
    with pytest.raises(NonMonotone):
        from_points([(0, 0), (Q(1, 2), Q(1, 4)), (Q(1, 4), Q(1, 2)), (1, 1)])
    with pytest.raises(NonMonotone):
        from_points([(0, 0), (Q(1, 2), Q(1, 2)), (1, Q(1, 2))])
    with pytest.raises(TooFewPoints):
        from_points([(0, 0)])
    with pytest.raises(OutOfDomain):
        KINK(Q(3, 2))
    with pytest.raises(DomainMismatch):
        Interval(1, 1)
    with pytest.raises(DomainMismatch):
        compose(KINK, from_points([(0, 0), (1, 2)]))


def test_canonical_merges_collinear():
    f = from_points([(0, 0), (Q(1, 4), Q(1, 4)), (Q(1, 2), Q(1, 2)), (1, 1)])
    assert f.points == ((0, 0), (1, 1))
    assert PLFunction([(0, 0), (1, 0), (2, 0)]).breakpoint_count == 2


def test_eval_examples():
    assert identity()(Q(2, 3)) == Q(2, 3)
    assert sawtooth(4)(Q(1, 16)) == Q(3, 16)


def test_inverse_swaps_coordinates():
    assert inverse(identity()) == identity()
    assert inverse(KINK) == from_points([(0, 0), (Q(1, 3), Q(1, 4)), (1, 1)])


def test_compose_by_hand():
    assert compose(HALF, HALF)(Q(1, 2)) == Q(7, 8)
    assert compose(KINK, identity()) == KINK


def test_affine_conjugate_examples():
    J = Interval(Q(1, 4), Q(1, 2))
    assert affine_conjugate(identity(), J) == identity(J)
    assert affine_conjugate(HALF, Interval(0, 2)) == from_points([(0, 0), (1, Q(3, 2)), (2, 2)])


def test_power_small_cases():
    assert power(HALF, 0) == identity()
    assert power(HALF, 1) == HALF
    assert power(HALF, 3) == compose(HALF, compose(HALF, HALF))
    with pytest.raises(BreakpointBudgetExceeded):
        power(sawtooth(7), 40, budget=50)


def test_json_round_trip_is_exact():
    data = KINK.to_json()
    assert data == {"domain": ["0", "1"], "codomain": ["0", "1"],
                    "points": [["0", "0"], ["1/4", "1/3"], ["1", "1"]]}
    assert pl_from_json(data) == KINK
    with pytest.raises(ParseError):
        pl_from_json({"points": [["0", "0"], ["1", 0.5]]})
    with pytest.raises(ParseError):
        pl_from_json({"domain": ["0", "2"], "points": [["0", "0"], ["1", "1"]]})


@given(pl_maps())
def test_inverse_is_two_sided(f):
    assert compose(f, inverse(f)) == identity()
    assert compose(inverse(f), f) == identity()


@given(pl_maps(), pl_maps(), pl_maps())
def test_associativity(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(pl_maps(), pl_maps(), rationals())
def test_compose_pointwise_and_breakpoint_law(f, g, x):
    fg = compose(f, g)
    assert fg(x) == f(g(x))
    assert fg.breakpoint_count <= f.breakpoint_count + g.breakpoint_count - 1


@given(pl_maps(max_pieces=3))
def test_negative_power(f):
    assert power(f, -2) == inverse(power(f, 2))


@given(pl_maps(), pl_maps())
def test_affine_conjugation_is_a_homomorphism(f, g):
    J = Interval(Q(1, 3), Q(7, 5))
    assert affine_conjugate(compose(f, g), J) == compose(affine_conjugate(f, J),
                                                         affine_conjugate(g, J))


@given(pl_maps(), rationals(), rationals())
def test_strictly_increasing(f, x, y):
    if x < y:
        assert f(x) < f(y)


@given(pl_maps())
def test_canonical_form_is_idempotent(f):
    assert PLHomeo(f.points).points == f.points
    assert pl_from_json(f.to_json()) == f
    assert f.domain == UNIT == f.codomain


def naive_eval(f, x):
    for (x0, y0), (x1, y1) in zip(f.points, f.points[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    return None


@given(pl_maps(), rationals(-1, 2, denominator=3 * 4096))
def test_eval_matches_naive_interpolation(f, x):
    expected = naive_eval(f, x)
    if expected is None:
        with pytest.raises(OutOfDomain):
            f(x)
    else:
        assert f(x) == expected


def test_eval_at_domain_edges_of_odd_interval():
    f = from_points([(Q(1, 3), Q(1, 7)), (Q(2, 5), Q(1, 5)), (Q(5, 7), Q(2, 3))])
    assert f(Q(1, 3)) == Q(1, 7) and f(Q(5, 7)) == Q(2, 3)
    for bad in (Q(1, 3) - Q(1, 10**9), Q(5, 7) + Q(1, 10**9)):
        with pytest.raises(OutOfDomain):
            f(bad)
