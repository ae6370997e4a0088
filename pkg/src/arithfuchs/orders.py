"""Orders in quaternion algebras: discriminants, maximality and explicit maximal orders.

An order is stored twice: as a free ``R``-basis (when known) and as a
``Z``-lattice ``(1/D) L`` where ``L`` is given by an upper triangular HNF
over the ``4n`` rational coordinates ``x_0..x_{n-1}, y_.., u_.., v_..``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import lattice
from .errors import HypothesisFails, MaximalityCheckFailed, NotIntegral, SearchExhausted
from .ideals import PrimeIdeal, completion, factor_element
from .lattice import Congruence
from .numfield import FieldElement, NumberField
from .quatalg import QuaternionAlgebra, QuaternionElement, ramification_set


# ---------------------------------------------------------------------------
# helpers on the base ring


def is_integral(x: FieldElement) -> bool:
    return x.is_integral_coords()


def ideal_equals(x: FieldElement, factorization: dict[PrimeIdeal, int]) -> bool:
    """Does the principal ideal ``xR`` equal ``prod P^e``?"""
    if x.is_zero():
        return False
    target = 1
    for P, e in factorization.items():
        target *= P.norm**e
    if abs(x.norm()) != target:
        return False
    return all(completion(P).valuation(x) == e for P, e in factorization.items())


def structure_tensor(K: NumberField) -> np.ndarray:
    """``T[i, j] = coordinates of alpha^(i+j)`` (integral for a monic integer polynomial)."""
    n = K.degree
    T = np.zeros((n, n, n), dtype=np.int64)
    powers = [K.gen**k for k in range(2 * n - 1)]
    for i in range(n):
        for j in range(n):
            T[i, j] = [int(c) for c in powers[i + j].coords]
    return T


def residue_classes(K: NumberField, m: int) -> np.ndarray:
    """All coordinate vectors in ``{0..m-1}^n`` (representatives of ``R/mR``)."""
    n = K.degree
    grids = np.meshgrid(*[np.arange(m)] * n, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def _mul_mod(T: np.ndarray, x: np.ndarray, y: np.ndarray, m: int) -> np.ndarray:
    return np.einsum("ai,aj,ijk->ak", x, y, T) % m


def principal_generator(P: PrimeIdeal, coord_bound: int = 3) -> FieldElement:
    """A generator of the (assumed principal) prime ``P``, smallest coordinates first."""
    K = P.field
    n = K.degree
    V = np.array(K.vandermonde, dtype=float)
    rng = np.arange(-coord_bound, coord_bound + 1)
    grids = np.meshgrid(*[rng] * n, indexing="ij")
    cands = np.stack([g.ravel() for g in grids], axis=1)
    norms = np.prod(cands @ V.T, axis=1)
    idx = np.nonzero(np.abs(np.abs(norms) - P.norm) < 1e-6)[0]
    order = sorted(idx.tolist(), key=lambda k: (int(np.abs(cands[k]).max()), int(np.abs(cands[k]).sum()), tuple(-cands[k])))
    comp = completion(P)
    for k in order:
        x = K([int(c) for c in cands[k]])
        if abs(x.norm()) == P.norm and comp.valuation(x) == 1:
            return x
    raise SearchExhausted(f"no generator of {P} with coordinates bounded by {coord_bound}")


def det_field(M: Sequence[Sequence[FieldElement]]) -> FieldElement:
    A = [list(row) for row in M]
    n = len(A)
    K = A[0][0].field
    det = K.one
    for c in range(n):
        piv = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if piv is None:
            return K.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = A[c][c].inverse()
        for r in range(c + 1, n):
            if A[r][c].is_zero():
                continue
            f = A[r][c] * inv
            A[r] = [A[r][k] - f * A[c][k] for k in range(n)]
    return det


# ---------------------------------------------------------------------------
# orders


def _coords(q: QuaternionElement) -> list[Fraction]:
    return q.coordinates()


def _from_coords(A: QuaternionAlgebra, w: Sequence[Fraction]) -> QuaternionElement:
    n = A.base.degree
    K = A.base
    return QuaternionElement(A, *(K(list(w[k * n : (k + 1) * n])) for k in range(4)))


@dataclass(frozen=True, eq=False)
class QuaternionOrder:
    algebra: QuaternionAlgebra
    r_basis: tuple[QuaternionElement, ...] | None
    denominator: int
    hnf: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return 4 * self.algebra.base.degree

    def z_basis(self) -> list[QuaternionElement]:
        D = self.denominator
        return [_from_coords(self.algebra, [Fraction(x, D) for x in row]) for row in self.hnf]

    def numerators(self, q: QuaternionElement) -> list[int] | None:
        w = [x * self.denominator for x in _coords(q)]
        if any(x.denominator != 1 for x in w):
            return None
        return [int(x) for x in w]

    def contains(self, q: QuaternionElement) -> bool:
        w = self.numerators(q)
        return w is not None and lattice.contains([list(r) for r in self.hnf], w)

    def same_lattice(self, other: "QuaternionOrder") -> bool:
        return self.numerator_hnf(lcm(self.denominator, other.denominator)) == other.numerator_hnf(
            lcm(self.denominator, other.denominator)
        )

    def numerator_hnf(self, D: int) -> list[list[int]]:
        """HNF of ``D * O`` as an integer lattice (``D`` must be a multiple of the denominator)."""
        if D % self.denominator:
            raise ValueError("D must be a multiple of the order denominator")
        s = D // self.denominator
        return lattice.hnf([[s * x for x in row] for row in self.hnf], self.dimension)

    def scaled_hnf(self, scale: FieldElement | int) -> list[list[int]]:
        """HNF of the integer coordinates of ``scale * O`` (``scale`` must clear all denominators)."""
        K = self.algebra.base
        s = K(scale)
        rows = []
        for q in self.z_basis():
            w = [c for p in q.parts for c in (p * s).coords]
            if any(c.denominator != 1 for c in w):
                raise NotIntegral(f"scale {s} does not clear the denominators of the order")
            rows.append([int(c) for c in w])
        return lattice.hnf(rows, self.dimension)

    def index_in(self, other: "QuaternionOrder") -> Fraction:
        """``[other : self]`` as a ratio of covolumes."""
        D = lcm(self.denominator, other.denominator)
        return Fraction(lattice.determinant(self.numerator_hnf(D)), lattice.determinant(other.numerator_hnf(D)))

    def to_dict(self) -> dict:
        K = self.algebra.base
        enc = lambda x: [str(c) for c in x.coords]
        return {
            "field": {"min_poly": list(K.min_poly), "disc": K.field_disc},
            "algebra": {"a": enc(self.algebra.a), "b": enc(self.algebra.b)},
            "denominator": self.denominator,
            "hnf": [list(r) for r in self.hnf],
            "r_basis": None
            if self.r_basis is None
            else [[enc(p) for p in q.parts] for q in self.r_basis],
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, algebra: QuaternionAlgebra) -> "QuaternionOrder":
        K = algebra.base
        dec = lambda c: K([Fraction(x) for x in c])
        r_basis = None
        if data.get("r_basis") is not None:
            r_basis = tuple(QuaternionElement(algebra, *(dec(p) for p in q)) for q in data["r_basis"])
        return cls(algebra, r_basis, int(data["denominator"]), tuple(tuple(r) for r in data["hnf"]))


def order_from_r_basis(A: QuaternionAlgebra, basis: Sequence[QuaternionElement], check: bool = True) -> QuaternionOrder:
    """The ``R``-span of ``basis``; with ``check`` it must be a ring containing 1 with integral elements."""
    K = A.base
    n = K.degree
    powers = [K.gen**k for k in range(n)]
    gens = [_coords(e * p) for e in basis for p in powers]
    D, ints = lattice.scale_to_integers(gens)
    H = lattice.hnf(ints, 4 * n)
    O = QuaternionOrder(A, tuple(basis), D, tuple(tuple(r) for r in H))
    if check:
        check_order(O)
    return O


def check_order(O: QuaternionOrder) -> None:
    """Raise ``NotIntegral`` unless ``O`` contains 1, is closed under products and integral."""
    A = O.algebra
    if not O.contains(A.one):
        raise NotIntegral("lattice does not contain 1")
    basis = list(O.r_basis) if O.r_basis is not None else O.z_basis()
    for e in basis:
        if not (is_integral(e.trace()) and is_integral(e.norm())):
            raise NotIntegral(f"element {e} is not integral")
    for e, f in itertools.product(basis, repeat=2):
        if not O.contains(e * f):
            raise NotIntegral("lattice is not closed under multiplication", {"product": repr(e * f)})


def is_order(O: QuaternionOrder) -> bool:
    try:
        check_order(O)
    except NotIntegral:
        return False
    return True


def standard_order(A: QuaternionAlgebra) -> QuaternionOrder:
    if not (is_integral(A.a) and is_integral(A.b)):
        raise NotIntegral("standard order needs integral a and b")
    return order_from_r_basis(A, A.basis())


def order_discriminant(O: QuaternionOrder) -> FieldElement:
    """Generator ``det(tr(e_i e_j))`` of the discriminant ideal (free ``R``-basis required)."""
    if O.r_basis is None:
        raise ValueError("discriminant needs a free R-basis")
    e = O.r_basis
    gram = [[(e[i] * e[j]).trace() for j in range(4)] for i in range(4)]
    return det_field(gram)


def discriminant_squared_target(A: QuaternionAlgebra) -> dict[PrimeIdeal, int]:
    return {P: 2 for P in ramification_set(A).finite_primes}


def is_maximal(O: QuaternionOrder) -> bool:
    return ideal_equals(order_discriminant(O), discriminant_squared_target(O.algebra))


# ---------------------------------------------------------------------------
# the quadratic congruence x^2 - a y^2 = b (mod 4R)


@dataclass(frozen=True)
class SolmodHypotheses:
    coprime: bool
    a_square_mod4: bool
    b_square_mod4: bool
    b_is_minus_one: bool

    @property
    def satisfied(self) -> bool:
        return self.coprime and self.a_square_mod4 and (self.b_square_mod4 or self.b_is_minus_one)

    def failures(self) -> list[str]:
        out = []
        if not self.coprime:
            out.append("(i) a and b are not coprime")
        if not self.a_square_mod4:
            out.append("a is not a square mod 4R")
        if not (self.b_square_mod4 or self.b_is_minus_one):
            out.append("b is neither -1 nor a square mod 4R")
        return out


def _int_vec(x: FieldElement) -> np.ndarray:
    if not x.is_integral_coords():
        raise NotIntegral(f"{x} is not integral")
    return np.array([int(c) for c in x.coords], dtype=np.int64)


def _is_square_mod4(K: NumberField, x: FieldElement) -> bool:
    T = structure_tensor(K)
    reps = residue_classes(K, 4)
    sq = _mul_mod(T, reps, reps, 4)
    target = _int_vec(x) % 4
    return bool(np.any(np.all(sq == target, axis=1)))


def solmod_hypotheses(K: NumberField, a: FieldElement, b: FieldElement) -> SolmodHypotheses:
    common = set(factor_element(a)) & set(factor_element(b)) if not (a.norm() in (1, -1) or b.norm() in (1, -1)) else set()
    return SolmodHypotheses(
        coprime=not common,
        a_square_mod4=_is_square_mod4(K, a),
        b_square_mod4=_is_square_mod4(K, b),
        b_is_minus_one=(b == -1),
    )


def _candidate_key(v: Sequence[int]) -> tuple:
    return (sum(1 for c in v if c), max(v, default=0), tuple(v))


def solve_quadratic_mod4(
    K: NumberField, a: FieldElement, b: FieldElement, strict: bool = False
) -> tuple[FieldElement, FieldElement] | None:
    """``(x, y)`` with ``x^2 - a y^2 - b`` in ``4R``.

    Only ``x, y`` modulo ``2R`` matter, so the search over ``(R/2R)^2`` is
    exhaustive.  With ``strict`` the solvability hypotheses (coprimality
    and square roots modulo 4) are enforced first.  Without a solution,
    ``HypothesisFails`` names the failed hypotheses.
    """
    hyp = solmod_hypotheses(K, a, b)
    if strict and not hyp.satisfied:
        raise HypothesisFails("; ".join(hyp.failures()), {"hypotheses": hyp})
    T = structure_tensor(K)
    reps = residue_classes(K, 2)
    order = sorted(range(len(reps)), key=lambda k: _candidate_key(reps[k].tolist()))
    reps = reps[order]
    av, bv = _int_vec(a), _int_vec(b)
    sq = _mul_mod(T, reps, reps, 4)
    a_sq = _mul_mod(T, np.broadcast_to(av, sq.shape), sq, 4)
    # pairs (x, y): x^2 - a y^2 - b == 0 mod 4, iterate in candidate order (total weight first)
    pairs = []
    for ix in range(len(reps)):
        diff = (sq[ix][None, :] - a_sq - bv[None, :]) % 4
        for iy in np.nonzero(~diff.any(axis=1))[0]:
            pairs.append((ix, int(iy)))
    if not pairs:
        if hyp.satisfied:
            raise MaximalityCheckFailed("no solution although the solvability hypotheses hold")
        raise HypothesisFails("; ".join(hyp.failures()) or "no solution modulo 4", {"hypotheses": hyp})
    pairs.sort(key=lambda p: _candidate_key(reps[p[0]].tolist() + reps[p[1]].tolist()))
    ix, iy = pairs[0]
    x = K([int(c) for c in reps[ix]])
    y = K([int(c) for c in reps[iy]])
    check = (x * x - a * y * y - b) / 4
    assert check.is_integral_coords()
    return x, y


# ---------------------------------------------------------------------------
# maximal orders


def _nice_beta(A: QuaternionAlgebra, x: FieldElement, y: FieldElement) -> QuaternionElement:
    return A.element(x / 2, y / 2, Fraction(1, 2))


def build_maximal_order_nice(A: QuaternionAlgebra) -> QuaternionOrder:
    """``R[1, i, beta, i beta]`` with ``beta = (x + y i + j)/2`` when ``Delta(A) = abR``."""
    ram = ramification_set(A)
    if not ideal_equals(A.a * A.b, {P: 1 for P in ram.finite_primes}):
        raise HypothesisFails("Delta(A) differs from abR")
    x, y = solve_quadratic_mod4(A.base, A.a, A.b)
    beta = _nice_beta(A, x, y)
    i = A.i
    O = order_from_r_basis(A, [A.one, i, beta, i * beta])
    if not is_maximal(O):
        raise MaximalityCheckFailed("nice construction produced a non-maximal order")
    return O


def denominator_bound(A: QuaternionAlgebra) -> FieldElement:
    """``r``: 1 if ``Delta(A) = abR``, else the product of generators of primes dividing ``ab`` but not ``Delta``."""
    K = A.base
    ab = A.a * A.b
    facs = factor_element(ab)
    if any(e > 1 for e in facs.values()):
        raise HypothesisFails("ab is not square-free", {"factorization": facs})
    ram = set(ramification_set(A).finite_primes)
    if not ram <= set(facs):
        raise HypothesisFails("Delta(A) does not divide abR")
    r = K.one
    for P in sorted(facs, key=lambda P: (P.p, P.factor_poly)):
        if P not in ram:
            r = r * principal_generator(P)
    return r


def _ideal_reps(K: NumberField, r: FieldElement) -> list[FieldElement]:
    """Coset representatives of ``R / rR`` via the HNF of ``rR``."""
    n = K.degree
    rows = [[int(c) for c in (r * K.gen**k).coords] for k in range(n)]
    H = lattice.hnf(rows, n)
    # vectors sum t_i e_i with 0 <= t_i < H_ii form a complete set of representatives
    ranges = [range(H[i][i]) for i in range(n)]
    return [K(list(t)) for t in itertools.product(*ranges)]


def _numerator_key(q: QuaternionElement) -> tuple:
    D, ints = lattice.scale_to_integers([_coords(q)])
    v = ints[0]
    return (max(abs(c) for c in v), sum(abs(c) for c in v), tuple(-c for c in v))


def build_maximal_order_search(
    A: QuaternionAlgebra,
    r: FieldElement | None = None,
    intermediate: tuple[FieldElement, FieldElement] | None = None,
) -> QuaternionOrder:
    """Search for a maximal order ``R[1, i, beta, i beta]`` or ``R[1, j, beta, j beta]``.

    Start from the standard order, enlarge it to an intermediate order
    ``R[1, i, gamma, i gamma]`` with ``gamma = (x + y i + j)/2`` when such
    ``(x, y)`` exist, then test the integral elements of ``(1/r) O`` modulo
    ``O`` in ascending numerator size.
    """
    K = A.base
    O = standard_order(A)
    if is_maximal(O):
        return O
    if r is None:
        r = denominator_bound(A)
    if intermediate is None:
        try:
            intermediate = solve_quadratic_mod4(K, A.a, A.b)
        except HypothesisFails:
            intermediate = None
    if intermediate is not None:
        gamma = _nice_beta(A, *intermediate)
        cand = order_from_r_basis(A, [A.one, A.i, gamma, A.i * gamma], check=False)
        if is_order(cand):
            O = cand
            if is_maximal(O):
                return O
    if r == 1:
        raise SearchExhausted("denominator 1 leaves nothing to search")
    basis = list(O.r_basis)
    reps = _ideal_reps(K, r)
    rinv = r.inverse()
    candidates = []
    for coeffs in itertools.product(reps, repeat=4):
        if all(c.is_zero() for c in coeffs):
            continue
        w = basis[0] * coeffs[0] + basis[1] * coeffs[1] + basis[2] * coeffs[2] + basis[3] * coeffs[3]
        beta = w * rinv
        if not (is_integral(beta.trace()) and is_integral(beta.norm())):
            continue
        candidates.append(beta)
    candidates.sort(key=_numerator_key)
    tried = 0
    for beta in candidates:
        for g in (A.i, A.j):
            tried += 1
            cand = order_from_r_basis(A, [A.one, g, beta, g * beta], check=False)
            if is_order(cand) and is_maximal(cand):
                return cand
    raise SearchExhausted(f"no maximal order among {tried} candidates", {"integral_candidates": len(candidates)})


def maximal_order(A: QuaternionAlgebra, r: FieldElement | None = None) -> QuaternionOrder:
    try:
        return build_maximal_order_nice(A)
    except HypothesisFails:
        return build_maximal_order_search(A, r)


# ---------------------------------------------------------------------------
# congruence systems


@dataclass(frozen=True)
class CongruenceSystem:
    """Membership test for ``O``: ``q`` lies in ``O`` iff the coordinates of ``scale * q`` are
    integers satisfying every congruence."""

    scale: FieldElement
    congruences: tuple[Congruence, ...]
    names: tuple[str, ...]

    def holds(self, w: Sequence[int]) -> bool:
        return all(c.holds(w) for c in self.congruences)

    def lattice_hnf(self) -> list[list[int]]:
        return lattice.lattice_from_congruences(self.congruences, len(self.names))

    def render(self) -> str:
        return "\n".join(c.render(self.names) for c in self.congruences)

    def contains(self, q: QuaternionElement) -> bool:
        w = [c for p in q.parts for c in (p * self.scale).coords]
        return all(c.denominator == 1 for c in w) and self.holds([int(c) for c in w])


def coordinate_names(n: int) -> tuple[str, ...]:
    return tuple(f"{s}{k}" for s in "xyuv" for k in range(n))


def membership_congruences(O: QuaternionOrder, scale: FieldElement | int | None = None) -> CongruenceSystem:
    """Congruences on the coordinates of ``scale * q`` characterizing ``q`` in ``O``.

    The default scale is the rational denominator of the ``Z``-basis.
    """
    K = O.algebra.base
    s = K(O.denominator if scale is None else scale)
    H = O.scaled_hnf(s)
    return CongruenceSystem(s, tuple(lattice.congruences_from_hnf(H)), coordinate_names(K.degree))


def order_from_congruences(A: QuaternionAlgebra, system: CongruenceSystem) -> QuaternionOrder:
    """The lattice cut out by ``system`` as a ``QuaternionOrder`` (checked to be an order)."""
    K = A.base
    H = lattice.lattice_from_congruences(system.congruences, 4 * K.degree)
    inv = system.scale.inverse()
    elems = [_from_coords(A, row) * inv for row in H]
    D, ints = lattice.scale_to_integers([_coords(q) for q in elems])
    O = QuaternionOrder(A, None, D, tuple(tuple(r) for r in lattice.hnf(ints, 4 * K.degree)))
    check_order(O)
    return O
