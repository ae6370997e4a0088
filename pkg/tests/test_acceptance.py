"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is repeated in the pytest terminal
summary under "acceptance criteria".
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest

from arithfuchs import lattice
from arithfuchs.classify import CHECKED_COUNTS, classification_table, derive_solution, field_coarea, resolve_prime_ref
from arithfuchs.errors import NotIntegral
from arithfuchs.ford import evaluate_word, tiling_check, torsion_order
from arithfuchs.ideals import SplittingBehavior, admissible_periods, primes_of_norm_up_to, splitting_in_cm_extension
from arithfuchs.orders import (
    CongruenceSystem,
    check_order,
    coordinate_names,
    discriminant_squared_target,
    ideal_equals,
    is_integral,
    maximal_order,
    order_discriminant,
    order_from_congruences,
    standard_order,
)
from arithfuchs.quatalg import QuaternionAlgebra, ramification_set
from arithfuchs.volume import (
    Signature,
    coarea,
    dedekind_zeta2,
    degree_bound_report,
    enumerate_genus2_supersignatures,
    has_order_m_elements,
    torsion_count,
)
from reference_data import COAREAS, CORRECTIONS, PRINTED_CONGRUENCES, PRINTED_SUPERSIGNATURES, corrected_congruences

FORD_EXAMPLES = [("k7", "ram-2-7"), ("d3981", "ram-3"), ("d4752", "ram-2")]


def test_criterion_1_coareas(catalog, record_criterion):
    worst_err, worst_time, bad = 0.0, 0.0, []
    for disc, expected in COAREAS.items():
        K = catalog.field(str(disc))
        t0 = time.perf_counter()
        area = coarea(K, [], dedekind_zeta2(K, 10**6))
        elapsed = time.perf_counter() - t0
        target = float(expected) * math.pi
        rel = abs(area.value - target) / target
        worst_err, worst_time = max(worst_err, rel), max(worst_time, elapsed)
        if rel >= 1e-5 or elapsed >= 60:
            bad.append(disc)
    ok = not bad
    record_criterion(1, ok, f"7 fields, worst relative error {worst_err:.2e}, slowest {worst_time:.1f}s; bad {bad}")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="the printed list has (0;2,5,6), which needs a torsion-free subgroup of index 15 but has "
    "minimal torsion-free index 30, and omits (0;2,3,18); see notes/decisions.md",
)
def test_criterion_2_supersignatures(record_criterion):
    t0 = time.perf_counter()
    found = {str(s) for s in enumerate_genus2_supersignatures()}
    elapsed = time.perf_counter() - t0
    printed = set(PRINTED_SUPERSIGNATURES)
    ok = found == printed and elapsed < 5
    detail = (
        f"{len(found)} found in {elapsed:.2f}s; only found {sorted(found - printed)}, "
        f"only printed {sorted(printed - found)}"
    )
    record_criterion(2, ok, detail)
    assert ok


def test_criterion_3_degree_bounds(record_criterion):
    rep = degree_bound_report()
    ok = (
        abs(rep.degree7_value - 15.1925) <= 1e-3
        and abs(rep.degree8_value - 20.2036) <= 1e-3
        and rep.degree6_strict_bound == 1_263_165
        and rep.degree6_ceiling < rep.degree6_strict_bound
    )
    record_criterion(
        3,
        ok,
        f"{rep.degree7_value:.4f} / {rep.degree8_value:.4f}, degree-6 ceiling {rep.degree6_ceiling:.3f} "
        f"< {rep.degree6_strict_bound}",
    )
    assert ok


def test_criterion_4_torsion_counts(catalog, record_criterion):
    rec = catalog.field_record("d3981")
    K = rec.field()
    a2_3981 = derive_solution(K, rec, 2, [resolve_prime_ref(K, "P3")], field_coarea(K)).counts[2]
    rec7 = catalog.field_record("k7")
    k7 = rec7.field()
    S = [resolve_prime_ref(k7, "P2"), resolve_prime_ref(k7, "P7")]
    a2_k7 = derive_solution(k7, rec7, 2, S, field_coarea(k7)).counts[2]
    # a_3 vanishes whenever a ramified prime splits in k(omega)
    split_cases, nonzero = 0, []
    for key, frec in catalog.fields.items():
        F = frec.field()
        if not 3 <= F.degree <= 5 or 3 not in frec.h_minus or 3 not in admissible_periods(F):
            continue
        for P in primes_of_norm_up_to(F, 60):
            if splitting_in_cm_extension(F, P, 3) is not SplittingBehavior.SPLIT:
                continue
            split_cases += 1
            a3 = torsion_count(frec.h_minus[3].value, 1, [splitting_in_cm_extension(F, P, 3)], field_disc=F.field_disc, m=3)
            if a3 != 0 or has_order_m_elements(F, [P], 3):
                nonzero.append((key, P.label()))
    ok = a2_3981 == 6 and a2_k7 == 2 and not nonzero and split_cases > 0
    record_criterion(
        4, ok, f"a2(3981, P3) = {a2_3981}, a2(k7, P2 P7) = {a2_k7}, a3 = 0 in {split_cases} split cases"
    )
    assert ok


def test_criterion_5_classification_rows(catalog, record_criterion):
    t0 = time.perf_counter()
    reports = [rep for d in (3, 4, 5) for rep in classification_table(d, catalog)]
    elapsed = time.perf_counter() - t0
    failed = [rep.row.label for rep in reports if not rep.passed]
    checked = [rep for rep in reports if rep.row.disc in CHECKED_COUNTS]
    counts_ok = all(rep.conjugacy_checked and rep.conjugacy_ok for rep in checked)
    flagged = [rep.row.label for rep in reports if rep.conjugacy is None]
    corrected = [rep.row.label for rep in reports if rep.row.printed_index is not None]
    ok = not failed and counts_ok and len(checked) == 6 and elapsed < 600
    record_criterion(
        5,
        ok,
        f"{len(reports) - len(failed)}/{len(reports)} rows in {elapsed:.0f}s; exact class counts for "
        f"{len(checked)} rows; flagged {flagged}; index corrected for {corrected}",
    )
    assert ok


def _system(K, scale, forms):
    names = coordinate_names(K.degree)
    s = K(2) * (1 + K.gen) if scale is None else K(scale)
    return CongruenceSystem(s, tuple(lattice.parse_congruence(t, m, names) for t, m in forms), names)


def test_criterion_6_maximal_orders(catalog, record_criterion):
    details, ok = [], True
    for key in PRINTED_CONGRUENCES:
        A = catalog.algebra(*key)
        K = A.base
        O = maximal_order(A)
        disc_ok = ideal_equals(order_discriminant(O), discriminant_squared_target(A))
        scale, forms = corrected_congruences(key)
        system = _system(K, scale, forms)
        same = O.scaled_hnf(system.scale) == system.lattice_hnf()
        literal_rejected = True
        if key in CORRECTIONS:
            try:
                order_from_congruences(A, _system(K, *PRINTED_CONGRUENCES[key]))
                literal_rejected = False
            except NotIntegral:
                pass
        moduli = sorted({m for _, m in forms}, reverse=True)
        ok = ok and disc_ok and same and literal_rejected
        details.append(f"{key[0]}: Delta^2 {disc_ok}, lattice equal {same} ({len(forms)} relations mod {moduli})")
    record_criterion(6, ok, "; ".join(details) + "; uncorrected printed systems are not orders")
    assert ok


def _commutator_times(a, b, x):
    return ((a, 1), (b, 1), (a, -1), (b, -1), (x, 1))


def test_criterion_7_ford_pipeline(ford_run, catalog, record_criterion):
    notes, ok = [], True
    for key in FORD_EXAMPLES:
        res, elapsed = ford_run(*key)
        A = res.order.algebra
        one = A.one
        sp = res.standard
        mu = field_coarea(A.base)
        expected = mu
        for P in ramification_set(A).finite_primes:
            expected *= P.norm - 1
        area_ok = abs(res.domain.area / math.pi - float(expected)) < 1e-4
        this = area_ok and elapsed < 900 and sp.verify()
        if key[0] == "k7":
            (a, b), = sp.hyperbolic
            x = sp.cones[0][0]
            w = _commutator_times(a, b, x)
            rel1 = evaluate_word(w + w, sp.values, one) == -one
            rel2 = evaluate_word(((x, 1), (x, 1)), sp.values, one) == -one
            subs = [s for s in res.subgroups if s.presentation.signature == Signature(2, ()) and s.presentation.verify()]
            this = this and res.signature == Signature(1, (2, 2)) and rel1 and rel2 and len(subs) == 4 == len(res.subgroups)
            notes.append(f"k7 {res.signature}, ([A,B]X)^2 = -1 {rel1}, X^2 = -1 {rel2}, {len(subs)} subgroups")
        elif key[0] == "d3981":
            order2 = [c for c in res.domain.cycles if c.order == 2]
            this = this and res.signature == Signature(0, (2,) * 6) and len(order2) == 6 and len(res.subgroups) == 1
            notes.append(f"3981 {res.signature}, {len(order2)} order-2 cycles, {len(res.subgroups)} subgroup")
        else:
            torsion_free = all(torsion_order(q) == 0 for q in sp.values.values())
            this = this and res.signature == Signature(2, ()) and torsion_free and len(sp.all_relations()) == 1
            notes.append(f"4752 {res.signature}, torsion free {torsion_free}, {len(sp.all_relations())} relation")
        notes[-1] += f", area {res.domain.area / math.pi:.6f} vs {expected}, {elapsed:.0f}s"
        ok = ok and this
    record_criterion(7, ok, "; ".join(notes))
    assert ok


def _random_quaternion(A, rng, bound=3):
    n = A.base.degree
    return A.element(*(A.base([rng.randint(-bound, bound) for _ in range(n)]) for _ in range(4)))


def test_criterion_8_property_suites(catalog, ford_run, record_criterion):
    rng = random.Random(8)
    algebras = [catalog.algebra(*key) for key in FORD_EXAMPLES]
    # order closure and integrality, including norms and traces of basis products
    orders = [maximal_order(A) for A in algebras] + [standard_order(A) for A in algebras if is_integral(A.a)]
    products_ok = True
    for O in orders:
        check_order(O)
        if O.r_basis is not None:
            for e in O.r_basis:
                for f in O.r_basis:
                    p = e * f
                    products_ok = products_ok and is_integral(p.norm()) and is_integral(p.trace())
    # norm multiplicativity and conjugation identity
    quat_ok, trials = True, 0
    for k in range(10**4):
        A = algebras[k % len(algebras)]
        p, q = _random_quaternion(A, rng), _random_quaternion(A, rng)
        pq = p * q
        quat_ok = quat_ok and pq.norm() == p.norm() * q.norm() and p * p.conj() == A.element(p.norm())
        trials += 1
    # ramification parity on the catalog algebras and on random ones over k7
    k7 = catalog.field("k7")
    parity = [ramification_set(A) for A in algebras]
    for _ in range(10):
        a = k7([rng.randint(-5, 5) for _ in range(3)])
        b = k7([rng.randint(-5, 5) for _ in range(3)])
        if a.is_zero() or b.is_zero():
            continue
        parity.append(ramification_set(QuaternionAlgebra(k7, a, b)))
    parity_ok = all((len(r.real_places) + len(r.finite_primes)) % 2 == 0 for r in parity)
    # truncation consistency: the value at 10B lies in the certified interval at B
    zeta_ok = True
    for key in ("k7", "d3981"):
        K = catalog.field(key)
        z1, z2 = dedekind_zeta2(K, 10**5), dedekind_zeta2(K, 10**6)
        zeta_ok = zeta_ok and z1.value <= z2.value + 1e-12 and z2.value + z2.error_bound <= z1.value + z1.error_bound + 1e-12
    # tiling spot check
    tiling_points = 0
    for key in FORD_EXAMPLES:
        tiling_points += len(tiling_check(ford_run(*key)[0].domain, points=100))
    ok = products_ok and quat_ok and parity_ok and zeta_ok and tiling_points == 300
    record_criterion(
        8,
        ok,
        f"{len(orders)} orders closed and integral, {trials} quaternion pairs, {len(parity)} algebras with even "
        f"ramification, zeta intervals nested {zeta_ok}, {tiling_points} tiling points",
    )
    assert ok
