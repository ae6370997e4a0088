import dataclasses
from fractions import Fraction

import pytest

from arithfuchs.classify import (
    check_row,
    classification_table,
    conjugacy_class_count,
    derive_solution,
    enumerate_solutions,
    field_automorphisms,
    field_coarea,
    is_galois,
    load_table,
    negative_screen,
    parity_ok,
    render_table,
    resolve_prime_ref,
    unlisted_solutions,
    verify_row,
)
from arithfuchs.errors import RowMismatch
from arithfuchs.volume import Signature


@pytest.fixture(scope="module")
def table():
    return load_table()


@pytest.fixture(scope="module")
def cubic_reports(catalog, table):
    return classification_table(3, catalog, table=table)


def test_table_shape(table):
    assert len(table) == 53
    assert sum(r.degree >= 3 for r in table) == 30
    for row in table:
        if row.printed_index is None:
            assert row.area_consistent, row.label
        else:
            assert row.label in {"2000/P5", "4352/P2"}
            assert row.index == 3 and row.printed_index != 3
            assert not dataclasses.replace(row, index=row.printed_index).area_consistent
            assert row.note


def test_parity():
    assert parity_ok(3, 0) and parity_ok(3, 2) and not parity_ok(3, 1)
    assert parity_ok(4, 1) and not parity_ok(4, 2)


def test_k7_solutions(catalog):
    rec = catalog.field_record("k7")
    K = rec.field()
    mu = field_coarea(K)
    assert mu == Fraction(1, 21)
    found = []
    for M, S in enumerate_solutions(K, mu):
        sol = derive_solution(K, rec, M, S, mu)
        found.append((M, sol.refs, tuple(map(str, sol.signatures))))
    assert found == [
        (84, (), ("(0;2,3,7)",)),
        (2, ("P7", "P2"), ("(1;2,2)",)),
        (1, ("P2", "P13"), ("(2;-)",)),
        (1, ("P2", "P13'"), ("(2;-)",)),
        (1, ("P2", "P13''"), ("(2;-)",)),
    ]


def test_automorphisms(catalog):
    counts = {k: len(field_automorphisms(catalog.field(k))) for k in ("k7", "d3981", "d1957", "d2304", "d2000")}
    assert counts == {"k7": 3, "d3981": 1, "d1957": 1, "d2304": 4, "d2000": 4}
    assert is_galois(catalog.field("k7")) and not is_galois(catalog.field("d1957"))


def test_conjugacy_counts(catalog):
    rec = catalog.field_record("k7")
    assert conjugacy_class_count(rec.field(), rec, []).method == "galois"
    assert conjugacy_class_count(rec.field(), rec, []).count == 1
    rec = catalog.field_record("d1957")
    K = rec.field()
    report = conjugacy_class_count(K, rec, [resolve_prime_ref(K, "P3")])
    assert report.count == 4 and report.method == "sign-table"


def test_cubic_rows(cubic_reports):
    assert cubic_reports and all(r.passed for r in cubic_reports)
    text = render_table(cubic_reports)
    assert "FAIL" not in text
    unlisted = [(d, s.ram_text, str(s.signature)) for d, s in unlisted_solutions(cubic_reports)]
    assert (49, "P2P13", "(2;-)") in unlisted
    assert (49, "P2P13'", "(2;-)") in unlisted
    assert (49, "P2P13''", "(2;-)") in unlisted


def test_quadratic_rows_are_arithmetic_only(catalog, table):
    reports = classification_table(2, catalog, table=table)
    assert reports and all(r.arithmetic_only and r.passed for r in reports)


def test_perturbed_row_is_reported(catalog, table):
    row = next(r for r in table if r.disc == 49 and r.ram)
    bad = dataclasses.replace(row, index=row.index + 1)
    with pytest.raises(RowMismatch) as exc:
        verify_row(bad, catalog)
    assert "index" in exc.value.details
    bad = dataclasses.replace(row, signature=Signature(0, (2, 2, 2, 2, 2, 2)))
    report = check_row(bad, catalog)
    assert not report.passed and "signature" in report.diff()
    assert report.record()["status"] == "FAIL"


@pytest.mark.parametrize(
    "key,minimal_area,indices",
    [
        ("d106069", None, [1]),
        ("d361", None, [4]),
        ("d5744", Fraction(5), []),
        ("d722000", Fraction(21, 5), []),
    ],
)
def test_negative_screens(catalog, key, minimal_area, indices):
    report = negative_screen(key, catalog)
    assert report.eliminated
    assert report.minimal_area == minimal_area
    assert [s.index for s in report.solutions] == indices
    assert report.reason
