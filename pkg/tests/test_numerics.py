import math
from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from mertens_lab.numerics import (
    UNIT_EXP,
    ExtendedReal,
    exact_sum,
    fixed_from_float,
    fixed_to_float,
    two_prod,
    two_sum,
)

# values that sit exactly on the fixed grid: |t| < 256, no bits below 2**-152
grid_floats = st.floats(min_value=-255.0, max_value=255.0, allow_nan=False).map(
    lambda v: math.ldexp(round(math.ldexp(v, 40)), -40)
)
term_lists = st.lists(grid_floats, min_size=0, max_size=60)


def as_fraction_units(total: int) -> Fraction:
    return Fraction(total) * Fraction(2) ** UNIT_EXP


@given(term_lists)
def test_exact_sum_matches_rational_sum(terms):
    exact = sum((Fraction(t) for t in terms), Fraction(0))
    assert as_fraction_units(exact_sum(np.array(terms))) == exact


@given(term_lists, st.randoms(use_true_random=False))
def test_exact_sum_is_order_and_split_independent(terms, rnd):
    whole = exact_sum(np.array(terms))
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    cut = rnd.randint(0, len(shuffled))
    parts = exact_sum(np.array(shuffled[:cut])) + exact_sum(np.array(shuffled[cut:]))
    assert whole == parts


def test_exact_sum_on_real_terms_is_split_independent():
    rng = np.random.default_rng(5)
    t = 1.0 / rng.integers(2, 10**9, size=50_000).astype(float)
    a = exact_sum(t)
    b = sum(exact_sum(c) for c in np.array_split(t, 37))
    assert a == b == exact_sum(t[::-1])


def test_exact_sum_rejects_out_of_range():
    for bad in ([math.nan], [math.inf], [300.0]):
        try:
            exact_sum(np.array(bad))
        except ValueError:
            continue
        raise AssertionError(f"accepted {bad}")


@given(grid_floats)
def test_fixed_roundtrip(v):
    assert fixed_to_float(fixed_from_float(v)) == v


@given(st.lists(grid_floats, min_size=1, max_size=30))
def test_extended_real_is_correctly_rounded(terms):
    n = exact_sum(np.array(terms))
    e = ExtendedReal.from_fixed(n)
    exact = as_fraction_units(n)
    assert e.hi == float(exact)
    assert abs(Fraction(e.lo)) <= Fraction(math.ulp(e.hi)) / 2
    # hi + lo carries ~106 bits; the remainder is below ulp(lo)
    assert abs(Fraction(e.hi) + Fraction(e.lo) - exact) <= Fraction(math.ulp(e.lo)) if e.lo else True


@given(st.floats(-1e12, 1e12), st.floats(-1e12, 1e12))
def test_two_sum_is_error_free(a, b):
    s, err = two_sum(a, b)
    assert Fraction(s) + Fraction(err) == Fraction(a) + Fraction(b)


# away from underflow, where Dekker's product is exact
moderate = st.one_of(st.just(0.0), st.floats(1e-100, 1e12), st.floats(-1e12, -1e-100))


@given(moderate, moderate)
def test_two_prod_is_error_free(a, b):
    p, err = two_prod(a, b)
    assert Fraction(p) + Fraction(err) == Fraction(a) * Fraction(b)


@settings(max_examples=50)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_extended_real_addition_close_to_exact(a, b):
    x = ExtendedReal(a) + ExtendedReal(b)
    assert float(x) == a + b
    assert (-ExtendedReal(a)).hi == -a


def test_extended_exp():
    v = ExtendedReal.from_fixed(exact_sum(np.array([math.log(2.0), math.log(1.5)])))
    assert abs(v.exp() - 3.0) <= 2 * math.ulp(3.0)
