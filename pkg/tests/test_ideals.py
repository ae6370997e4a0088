import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs.classify import resolve_prime_ref
from arithfuchs.errors import PeriodNotSupported
from arithfuchs.ideals import (
    Inert,
    Ramified,
    Split,
    admissible_periods,
    cyclotomic_real_element,
    factor_element,
    factor_prime,
    primes_of_norm_up_to,
    primes_up_to,
    splitting_in_cm_extension,
)


def test_k7_decomposition(catalog):
    k7 = catalog.field("k7")
    (P2,) = factor_prime(k7, 2)
    assert (P2.norm, P2.e, P2.f) == (8, 1, 3)
    (P7,) = factor_prime(k7, 7)
    assert (P7.norm, P7.e, P7.f) == (7, 3, 1)
    assert [P.norm for P in factor_prime(k7, 13)] == [13, 13, 13]


def test_prime_references(catalog):
    K = catalog.field("d3981")
    assert [(P.norm, P.e) for P in primes_of_norm_up_to(K, 10)] == [(3, 2), (5, 1), (9, 1)]
    assert resolve_prime_ref(K, "P3").norm == 3
    assert resolve_prime_ref(K, "P3'").norm == 9
    K = catalog.field("d1957")
    assert resolve_prime_ref(K, "P3").norm == 3
    assert resolve_prime_ref(K, "P3'").norm == 27
    with pytest.raises(ValueError):
        resolve_prime_ref(K, "P3''")


def test_factor_element(catalog):
    k7 = catalog.field("k7")
    a = k7.gen
    fac = factor_element(2 * (2 * a - 3))
    assert sorted((P.norm, e) for P, e in fac.items()) == [(7, 1), (8, 1)]
    assert factor_element(a) == {}


def test_admissible_periods(catalog):
    assert admissible_periods(catalog.field("k7")) == [2, 3, 7]
    assert admissible_periods(catalog.field("q")) == [2, 3]
    assert admissible_periods(catalog.field("d2304")) == [2, 3, 4, 6, 12]
    assert admissible_periods(catalog.field("d2000")) == [2, 3, 5, 10]


def test_cyclotomic_element(catalog):
    k7 = catalog.field("k7")
    lam = cyclotomic_real_element(k7, 7)
    assert lam is not None
    expected = sorted(2 * math.cos(k * math.pi / 7) for k in (1, 3, 5))
    assert sorted(lam.embeddings_float()) == pytest.approx(expected, abs=1e-12)
    assert cyclotomic_real_element(k7, 5) is None


@pytest.mark.parametrize(
    "field,ref,m,expected",
    [
        ("k7", "P2", 2, Ramified),
        ("k7", "P2", 3, Inert),
        ("k7", "P7", 2, Inert),
        ("k7", "P7", 3, Split),
        ("k7", "P13", 2, Split),
        ("k7", "P13", 3, Split),
        ("d3981", "P3", 2, Inert),
        ("d3981", "P3", 3, Split),
        ("d3981", "P5", 2, Split),
        ("d1957", "P3", 2, Inert),
        ("d1957", "P3", 3, Ramified),
        ("d1957", "P7", 3, Split),
    ],
)
def test_splitting_in_cm_extensions(catalog, field, ref, m, expected):
    K = catalog.field(field)
    assert splitting_in_cm_extension(K, resolve_prime_ref(K, ref), m) is expected


def test_unsupported_period(catalog):
    k7 = catalog.field("k7")
    with pytest.raises(PeriodNotSupported):
        splitting_in_cm_extension(k7, resolve_prime_ref(k7, "P13"), 5)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(primes_up_to(400)), st.sampled_from(["k7", "d3981", "d1957", "d38569"]))
def test_fundamental_identity(catalog, p, field):
    K = catalog.field(field)
    primes = factor_prime(K, p)
    assert sum(P.e * P.f for P in primes) == K.degree
    ramified = any(P.e > 1 for P in primes)
    assert ramified == (K.field_disc % p == 0)
