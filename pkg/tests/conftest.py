import random

from hypothesis import settings, strategies as st

from achomeo.sampling import random_pl_homeo

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def pl_maps(draw, max_pieces=6):
    rng = random.Random(draw(seeds))
    return random_pl_homeo(rng, pieces=draw(st.integers(1, max_pieces)))


@st.composite
def rationals(draw, lo=0, hi=1, denominator=4096):
    from fractions import Fraction
    k = draw(st.integers(0, denominator))
    return Fraction(lo) + (Fraction(hi) - Fraction(lo)) * Fraction(k, denominator)
