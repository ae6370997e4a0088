from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs import ffpoly, polyutil
from arithfuchs.errors import DiscriminantMismatch, DivisionByZero, NotTotallyReal, Reducible
from arithfuchs.numfield import UnitSystem, embed, nf_new, signs_at_places

K7_POLY = [1, -2, -1, 1]  # a^3 - a^2 - 2a + 1
K7_ROOTS = [-1.2469796037174670, 0.4450418679126288, 1.8019377358048383]


@pytest.fixture(scope="module")
def k7():
    return nf_new(K7_POLY, 49, name="k7")


def test_discriminant_and_sturm():
    assert polyutil.discriminant(K7_POLY) == 49
    assert polyutil.discriminant([1, 2, -4, -1, 1]) == 3981
    intervals = polyutil.isolate_real_roots(K7_POLY)
    assert len(intervals) == 3
    for (lo, hi), r in zip(intervals, K7_ROOTS):
        assert lo < r < hi


def test_refine_root_width():
    lo, hi = polyutil.isolate_real_roots([-2, 0, 1])[1]
    lo, hi = polyutil.refine_root([-2, 0, 1], lo, hi, Fraction(1, 10**12))
    assert hi - lo <= Fraction(1, 10**12)
    assert lo <= Fraction(2**0.5) <= hi


def test_nf_new_rejects_bad_input():
    with pytest.raises(DiscriminantMismatch):
        nf_new(K7_POLY, 50)
    with pytest.raises(NotTotallyReal):
        nf_new([1, 0, 1], -4)
    with pytest.raises(Reducible):
        nf_new([-1, 0, 1], 4)
    with pytest.raises(ValueError):
        nf_new([1, 2], 1)


def test_field_arithmetic(k7):
    a = k7.gen
    assert a**3 == a**2 + 2 * a - 1
    assert a.norm() == -1
    assert a.trace() == 1
    assert (a * a.inverse()) == 1
    assert (a + 1) / (a + 1) == 1
    with pytest.raises(DivisionByZero):
        k7.zero.inverse()


def test_certified_embeddings(k7):
    a = k7.gen
    for place, r in enumerate(K7_ROOTS):
        iv = embed(a, place, 60)
        assert iv.hi - iv.lo <= Fraction(1, 2**60)
        assert abs(float(iv) - r) < 1e-15
    assert signs_at_places(a) == (-1, 1, 1)
    assert signs_at_places(2 * a - 3) == (-1, -1, 1)


def test_unit_system_validation(k7):
    a = k7.gen
    UnitSystem((a, 1 - a * a)).validate()
    with pytest.raises(ValueError):
        UnitSystem((a, a * a)).validate()
    with pytest.raises(ValueError):
        UnitSystem((a, k7(2))).validate()


coords = st.lists(st.integers(-20, 20), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(coords, coords)
def test_norm_is_multiplicative(k7, x, y):
    X, Y = k7(x), k7(y)
    assert (X * Y).norm() == X.norm() * Y.norm()
    assert (X + Y).trace() == X.trace() + Y.trace()


@settings(max_examples=60, deadline=None)
@given(coords)
def test_inverse_round_trip(k7, x):
    X = k7(x)
    if X.is_zero():
        return
    assert X * X.inverse() == 1
    embeddings = X.embeddings_float()
    assert abs(embeddings[0] * embeddings[1] * embeddings[2] - float(X.norm())) <= 1e-6 * max(1.0, abs(float(X.norm())))


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([2, 3, 5, 7, 11, 13]),
    st.lists(st.integers(0, 12), min_size=2, max_size=7),
)
def test_finite_field_factorization(p, coeffs):
    f = ffpoly.monic(ffpoly.norm(coeffs + [1], p), p)
    factors = ffpoly.factor(f, p, seed=1)
    prod = [1]
    for g, k in factors:
        assert ffpoly.is_irreducible(g, p)
        for _ in range(k):
            prod = ffpoly.mul(prod, g, p)
    assert prod == f
