from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs import lattice
from arithfuchs.errors import HypothesisFails
from arithfuchs.ideals import factor_element, primes_of_norm_up_to
from arithfuchs.orders import (
    QuaternionOrder,
    build_maximal_order_nice,
    build_maximal_order_search,
    is_maximal,
    is_order,
    maximal_order,
    membership_congruences,
    order_from_congruences,
    principal_generator,
    solve_quadratic_mod4,
    standard_order,
)

ALGEBRAS = [("k7", "ram-2-7"), ("d3981", "ram-3"), ("d4752", "ram-2")]


@pytest.fixture(scope="module")
def orders(catalog):
    return {key: maximal_order(catalog.algebra(*key)) for key in ALGEBRAS}


@pytest.mark.parametrize("key", ALGEBRAS)
def test_maximal_orders(orders, key):
    O = orders[key]
    assert is_order(O)
    assert is_maximal(O)
    S = standard_order(O.algebra)
    assert not is_maximal(S)
    index = S.index_in(O)
    assert index.denominator == 1 and index > 1


@pytest.mark.parametrize("key", ALGEBRAS)
def test_congruence_round_trip(orders, key):
    O = orders[key]
    system = membership_congruences(O)
    back = order_from_congruences(O.algebra, system)
    assert back.same_lattice(O)
    for q in O.z_basis():
        assert system.contains(q)
    assert not system.contains(O.algebra.element(O.algebra.base(Fraction(1, 3))))


def test_serialization_round_trip(orders):
    O = orders[("d3981", "ram-3")]
    again = QuaternionOrder.from_dict(O.to_dict(), O.algebra)
    assert again.same_lattice(O)
    assert again.r_basis == O.r_basis


def test_nice_construction_needs_its_hypotheses(catalog):
    A = catalog.algebra("d4752", "ram-2")
    with pytest.raises(HypothesisFails):
        build_maximal_order_nice(A)
    assert is_maximal(build_maximal_order_search(A))


def test_quadratic_mod4(catalog):
    A = catalog.algebra("d3981", "ram-3")
    x, y = solve_quadratic_mod4(A.base, A.a, A.b)
    assert ((x * x - A.a * y * y - A.b) / 4).is_integral_coords()
    k7 = catalog.algebra("k7", "ram-2-7")
    with pytest.raises(HypothesisFails):
        solve_quadratic_mod4(k7.base, k7.a, k7.b, strict=True)


@pytest.mark.parametrize("field", ["k7", "d3981", "d1957", "d4752"])
def test_principal_generators(catalog, field):
    K = catalog.field(field)
    for P in primes_of_norm_up_to(K, 30):
        g = principal_generator(P)
        assert factor_element(g) == {P: 1}


vectors = st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=4, max_size=7)


@settings(max_examples=60, deadline=None)
@given(vectors)
def test_hnf_congruence_duality(gens):
    d = 4
    gens = gens + [[5 if i == j else 0 for j in range(d)] for i in range(d)]  # full rank
    H = lattice.hnf(gens, d)
    assert lattice.hnf(H, d) == H
    for g in gens:
        assert lattice.contains(H, g)
    assert lattice.lattice_from_congruences(lattice.congruences_from_hnf(H), d) == H
    assert lattice.determinant(H) == abs(lattice.determinant(H))


def test_parse_congruence():
    c = lattice.parse_congruence("4x0 - x1 + 3v2", 6, ["x0", "x1", "v2"])
    assert c.coeffs == (4, -1, 3) and c.modulus == 6
    assert c.holds([0, 3, 1])
    with pytest.raises(ValueError):
        lattice.parse_congruence("4x0 * x1", 6, ["x0", "x1"])
