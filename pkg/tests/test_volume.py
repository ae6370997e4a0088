import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs.errors import AmbiguousRecognition, BasisHypothesisFails, NonHyperbolic
from arithfuchs.ideals import Inert, Ramified, Split
from arithfuchs.volume import (
    Signature,
    coarea,
    dedekind_zeta2,
    enumerate_genus2_supersignatures,
    minimal_torsionfree_index,
    recognize_pi_multiple,
    rh_area,
    solve_signature,
    torsion_count,
)


def test_signature_parsing():
    s = Signature.parse("(0;2,2,2,2,2,2)")
    assert s == Signature.parse("(0;2^6)") == Signature(0, (2,) * 6)
    assert str(Signature.parse("(2;-)")) == "(2;-)"
    assert Signature(0, (3, 2, 7)).periods == (2, 3, 7)
    with pytest.raises(ValueError):
        Signature(0, (1,))


@pytest.mark.parametrize(
    "sig,area,index",
    [
        ("(0;2,3,7)", Fraction(1, 21), 84),
        ("(0;2,3,8)", Fraction(1, 12), 48),
        ("(1;2,2)", Fraction(2), 2),
        ("(0;2,2,2,2,2,2)", Fraction(2), 2),
        ("(0;3,3,3,3)", Fraction(4, 3), 3),
        ("(0;2,2,3,3)", Fraction(2, 3), 6),
        ("(1;2)", Fraction(1), 4),
        ("(2;-)", Fraction(4), 1),
        ("(0;2,5,6)", Fraction(4, 15), 30),
    ],
)
def test_area_and_torsion_free_index(sig, area, index):
    s = Signature.parse(sig)
    assert rh_area(s) == area
    assert minimal_torsionfree_index(s) == index


def test_non_hyperbolic():
    with pytest.raises(NonHyperbolic):
        rh_area(Signature(0, (2, 2, 2, 2)))
    with pytest.raises(NonHyperbolic):
        rh_area(Signature(1, ()))


def test_solve_signature():
    sigs = solve_signature(Fraction(2), [2, 3])
    assert Signature(1, (2, 2)) in sigs
    assert Signature(0, (2,) * 6) in sigs
    assert solve_signature(Fraction(2), [2, 3], forced_zero=[2, 3]) == []
    assert solve_signature(Fraction(4), [2, 3], forced_zero=[3]) == [
        Signature(0, (2,) * 8),
        Signature(1, (2,) * 4),
        Signature(2, ()),
    ]
    assert solve_signature(Fraction(2), [2, 3], counts={2: 2}) == [
        Signature(0, (2, 2, 3, 3, 3)),
        Signature(1, (2, 2)),
    ]


def test_supersignature_list():
    sigs = enumerate_genus2_supersignatures()
    assert len(sigs) == 33
    assert Signature.parse("(0;2,3,18)") in sigs
    assert Signature.parse("(0;2,5,6)") not in sigs
    for s in sigs:
        M = Fraction(4) / rh_area(s)
        assert M.denominator == 1 and M >= 2 and M.numerator % minimal_torsionfree_index(s) == 0


def test_recognition():
    assert recognize_pi_multiple(math.pi / 21, 1e-9) == Fraction(1, 21)
    assert recognize_pi_multiple(math.pi * 0.123456789, 1e-12) is None
    with pytest.raises(AmbiguousRecognition):
        recognize_pi_multiple(math.pi / 2, 0.05)


def test_torsion_count_formula():
    assert torsion_count(3, 1, [Inert]) == 6
    assert torsion_count(1, 1, [Ramified, Inert]) == 2
    assert torsion_count(2, 1, [Split]) == 0
    assert torsion_count(4, 2, []) == 2
    with pytest.raises(BasisHypothesisFails):
        torsion_count(1, 1, [], field_disc=2304, m=2)
    with pytest.raises(BasisHypothesisFails):
        torsion_count(1, 1, [], field_disc=3981, m=3)


@pytest.mark.parametrize("field,expected", [("k7", Fraction(1, 21)), ("d3981", Fraction(1)), ("d1957", Fraction(1, 3))])
def test_coarea(catalog, field, expected):
    K = catalog.field(field)
    z = dedekind_zeta2(K, 10**5)
    a = coarea(K, [], z)
    assert abs(a.value - float(expected) * math.pi) <= a.error + 1e-9
    assert a.error < 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1), st.lists(st.sampled_from([2, 3, 4, 5, 6, 7]), max_size=5))
def test_solver_recovers_signature(genus, periods):
    s = Signature(genus, tuple(periods))
    try:
        area = rh_area(s)
    except NonHyperbolic:
        return
    assert s in solve_signature(area, set(periods) | {2, 3})
