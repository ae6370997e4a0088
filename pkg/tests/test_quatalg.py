import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs.classify import prime_ref
from arithfuchs.errors import ParityViolation
from arithfuchs.quatalg import (
    QuaternionAlgebra,
    RamificationData,
    algebras_isomorphic,
    hilbert_symbol,
    quat_mul,
    ramification_set,
)


def _ram(A):
    R = ramification_set(A)
    return sorted(R.real_places), sorted(P.p for P in R.finite_primes)


@pytest.mark.parametrize(
    "a,b,real,finite",
    [
        (-1, -1, [0], [2]),
        (-1, 3, [], [2, 3]),
        (2, 5, [], [2, 5]),
        (3, 5, [], [3, 5]),
        (-1, -3, [0], [3]),
        (1, 7, [], []),
    ],
)
def test_rational_algebras(catalog, a, b, real, finite):
    q = catalog.field("q")
    assert _ram(QuaternionAlgebra(q, q(a), q(b))) == (real, finite)


@pytest.mark.parametrize(
    "field,algebra,real,finite",
    [
        ("k7", "ram-2-7", [0, 1], ["P2", "P7"]),
        ("d3981", "ram-3", [0, 2, 3], ["P3"]),
        ("d4752", "ram-2", [1, 2, 3], ["P2"]),
    ],
)
def test_catalog_algebra_ramification(catalog, field, algebra, real, finite):
    A = catalog.algebra(field, algebra)
    R = ramification_set(A)
    assert sorted(R.real_places) == real
    assert sorted(prime_ref(A.base, P) for P in R.finite_primes) == finite


def test_dyadic_hilbert_symbol_k7(catalog):
    k7 = catalog.field("k7")
    a = k7.gen
    (P2,) = [P for P in ramification_set(catalog.algebra("k7", "ram-2-7")).finite_primes if P.p == 2]
    assert hilbert_symbol(2 * (2 * a - 3), k7(-1), P2) == -1
    # the local degree at P2 is odd, so the Hamilton quaternions stay ramified there
    assert hilbert_symbol(k7(-1), k7(-1), P2) == -1
    assert _ram(QuaternionAlgebra(k7, k7(-1), k7(-1))) == ([0, 1, 2], [2])


def test_parity_is_enforced():
    with pytest.raises(ParityViolation):
        RamificationData(frozenset({0}), ())


def test_isomorphism_by_ramification(catalog):
    q = catalog.field("q")
    A = QuaternionAlgebra(q, q(-1), q(3))
    assert algebras_isomorphic(A, QuaternionAlgebra(q, q(3), q(-1)))
    assert algebras_isomorphic(A, QuaternionAlgebra(q, q(-1), q(3) * q(-1) * q(-1)))
    assert not algebras_isomorphic(A, QuaternionAlgebra(q, q(-1), q(-1)))


def test_basis_relations(catalog):
    A = catalog.algebra("k7", "ram-2-7")
    i, j, ij = A.i, A.j, A.ij
    assert i * i == A.element(A.a)
    assert j * j == A.element(A.b)
    assert i * j == ij == -(j * i)


small = st.lists(st.integers(-4, 4), min_size=12, max_size=12)


@settings(max_examples=50, deadline=None)
@given(small, small)
def test_norm_and_conjugation(catalog, x, y):
    A = catalog.algebra("k7", "ram-2-7")
    K = A.base
    p = A.element(*(K(x[3 * k : 3 * k + 3]) for k in range(4)))
    q = A.element(*(K(y[3 * k : 3 * k + 3]) for k in range(4)))
    assert quat_mul(p, q).norm() == p.norm() * q.norm()
    assert p * p.conj() == A.element(p.norm())
    assert (p * q).conj() == q.conj() * p.conj()
    assert (p + q).trace() == p.trace() + q.trace()
