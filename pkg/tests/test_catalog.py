import copy

import pytest

from arithfuchs.catalog import (
    Catalog,
    is_square_in_field,
    load_catalog,
    minkowski_bound,
    relative_class_number_estimate,
    roots_of_unity_order,
    verify_class_number_one,
)
from arithfuchs.errors import BasisHypothesisFails


def test_aliases(catalog):
    assert catalog.resolve("k7") == catalog.resolve("d49") == catalog.resolve("49") == "k7"
    assert catalog.resolve("3981") == "d3981"
    assert catalog.resolve("d1") == "q"
    with pytest.raises(KeyError):
        catalog.resolve("d50")
    with pytest.raises(KeyError):
        catalog.algebra_record("k7", "no-such-algebra")


def test_every_entry_is_sourced(catalog):
    for rec in catalog.fields.values():
        assert rec.poly_source and rec.class_number.source and rec.units.source
        assert all(v.source for v in rec.h_minus.values())
    for rec in catalog.algebras.values():
        assert rec.source
    assert [s.field_key for s in catalog.screens] == ["d106069", "d361", "d5744", "d722000"]


def test_fields_build_and_units_validate(catalog):
    for key, rec in catalog.fields.items():
        K = rec.field()
        assert K.field_disc == rec.disc and K.degree == rec.degree
        rec.unit_system().validate()


def test_split_place_is_checked(catalog):
    raw = copy.deepcopy(catalog.raw)
    for alg in raw["algebras"]:
        if alg["id"] == "ram-2-7":
            alg["split_place"] = 0
    with pytest.raises(ValueError, match="split real places"):
        Catalog(raw).algebra("k7", "ram-2-7")
    raw["version"] = -1
    with pytest.raises(ValueError):
        Catalog(raw)


@pytest.mark.parametrize("field", ["k7", "d3981", "d1957", "d4752", "d2304"])
def test_class_number_one(catalog, field):
    K = catalog.field(field)
    assert catalog.field_record(field).class_number.value == 1
    assert verify_class_number_one(K)
    assert minkowski_bound(K) > 1


def test_squares(catalog):
    k7 = catalog.field("k7")
    a = k7.gen
    assert is_square_in_field((a + 2) * (a + 2))
    assert not is_square_in_field(a + 2)
    assert not is_square_in_field(k7(-1))


@pytest.mark.parametrize("field,m,w", [("k7", 2, 4), ("k7", 3, 6), ("d3981", 2, 4), ("d2304", 2, 24), ("d2304", 3, 24)])
def test_roots_of_unity(catalog, field, m, w):
    assert roots_of_unity_order(catalog.field(field), m) == w


@pytest.mark.parametrize("field,m", [("k7", 2), ("k7", 3), ("d3981", 2), ("d1957", 2), ("d1957", 3)])
def test_relative_class_numbers_agree_with_catalog(catalog, field, m):
    est = relative_class_number_estimate(catalog.field(field), m)
    assert est.rounded == catalog.field_record(field).h_minus[m].value
    assert est.distance < 0.01


def test_relative_class_number_needs_unramified_prime(catalog):
    with pytest.raises(BasisHypothesisFails):
        relative_class_number_estimate(catalog.field("d3981"), 3)


def test_default_catalog_loads():
    assert load_catalog().resolve("k7") == "k7"
