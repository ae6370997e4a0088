import math
from fractions import Fraction
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithfuchs.ford import (
    closure_radius,
    cyclic_reduce,
    disk_to_klein,
    generator_table,
    generator_vector,
    invert_word,
    klein_to_disk,
    reduce_word,
    render_svg,
    substitute,
    tiling_check,
    torsion_order,
    verify_presentation,
    word_str,
)
from arithfuchs.orders import is_order
from arithfuchs.volume import Signature


@pytest.fixture(scope="module")
def k7_result(ford_run):
    return ford_run("k7", "ram-2-7")[0]


def test_closure_radius():
    assert closure_radius(0.15) == pytest.approx(math.sqrt(1 + 0.15**2) - 0.15)
    assert closure_radius(0.15) > closure_radius(0.15, sharp=False) == pytest.approx(0.85)
    assert closure_radius(0.075) > closure_radius(0.15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 0.999), st.floats(0, 2 * math.pi))
def test_klein_disk_round_trip(r, theta):
    p = r * complex(math.cos(theta), math.sin(theta))
    assert abs(klein_to_disk(disk_to_klein(p)) - p) < 1e-9
    assert abs(disk_to_klein(p)) >= abs(p) - 1e-15


letters = st.lists(st.tuples(st.sampled_from("abc"), st.sampled_from([1, -1])), max_size=12)


@settings(max_examples=100, deadline=None)
@given(letters, letters)
def test_word_helpers(w, v):
    assert reduce_word(tuple(w) + invert_word(w)) == ()
    assert invert_word(invert_word(w)) == tuple(w)
    r = reduce_word(w)
    assert all(not (x[0] == y[0] and x[1] == -y[1]) for x, y in zip(r, r[1:]))
    c = cyclic_reduce(w)
    assert len(c) <= len(r)
    assert substitute(w, {}) == r
    assert substitute(w, {"a": tuple(v)}) == reduce_word(
        [z for s, e in w for z in ((tuple(v) if e == 1 else invert_word(v)) if s == "a" else ((s, e),))]
    )


def test_word_str():
    assert word_str(()) == "1"
    assert word_str((("a", 1), ("b", -1))) == "a b^-1"


def test_k7_domain(k7_result):
    res = k7_result
    assert res.signature == Signature(1, (2, 2))
    assert res.domain.area == pytest.approx(2 * math.pi, abs=1e-6)
    assert res.eps == 0.15
    assert res.standard.verify()
    assert verify_presentation(res.standard.values, res.standard.all_relations())
    for c, m in res.standard.cones:
        assert torsion_order(res.standard.values[c]) == m
    for a, b in res.standard.hyperbolic:
        assert torsion_order(res.standard.values[a], 50) == 0


def test_k7_genus_two_subgroups(k7_result):
    subs = k7_result.subgroups
    assert len(subs) == 4
    for sub in subs:
        sp = sub.presentation
        assert sp.signature == Signature(2, ())
        assert sp.verify()
    characters = {tuple(sorted(sub.character.items())) for sub in subs}
    assert len(characters) == 4


def test_generators_lie_in_the_order(k7_result):
    O = k7_result.order
    assert is_order(O)
    for q in k7_result.standard.values.values():
        assert q.norm() == 1
        assert O.contains(q)


def test_tiling(k7_result):
    lengths = tiling_check(k7_result.domain, points=50, seed=3)
    assert len(lengths) == 50 and min(lengths) >= 0


def test_render_is_deterministic(k7_result, tmp_path):
    path = tmp_path / "k7.svg"
    text = render_svg(k7_result.domain, str(path), size=400)
    assert path.read_text() == text == render_svg(k7_result.domain, size=400)
    root = ET.fromstring(text)
    assert root.tag.endswith("svg") and root.get("width") == "400"


def test_generator_table(k7_result):
    O = k7_result.order
    table = generator_table(k7_result.standard.values, O.denominator)
    lines = table.splitlines()
    assert len(lines) == len(k7_result.standard.values)
    for line, (name, q) in zip(lines, k7_result.standard.values.items()):
        assert line.split()[0] == name
        assert [int(x) for x in line.split()[1:]] == generator_vector(q, O.denominator)
    with pytest.raises(ValueError):
        generator_vector(O.algebra.element(O.algebra.base(Fraction(1, 7))), 1)
