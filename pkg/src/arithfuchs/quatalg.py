"""Quaternion algebras ``(a, b / k)`` and their ramification.

``i^2 = a``, ``j^2 = b``, ``ij = -ji``; elements are written
``x + y i + u j + v ij`` with coordinates in the base field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ParityViolation, PrecisionExhausted
from .ideals import PrimeIdeal, completion, factor_element, factor_prime
from .numfield import FieldElement, NumberField, signs_at_places


@dataclass(frozen=True)
class QuaternionAlgebra:
    base: NumberField
    a: FieldElement
    b: FieldElement

    def __post_init__(self) -> None:
        if self.a.is_zero() or self.b.is_zero():
            raise ValueError("a and b must be nonzero")

    def __repr__(self) -> str:
        return f"QuaternionAlgebra(a={self.a}, b={self.b}, base={self.base.name})"

    def element(self, x=0, y=0, u=0, v=0) -> "QuaternionElement":
        K = self.base
        return QuaternionElement(self, K(x), K(y), K(u), K(v))

    @property
    def one(self) -> "QuaternionElement":
        return self.element(1)

    @property
    def i(self) -> "QuaternionElement":
        return self.element(0, 1)

    @property
    def j(self) -> "QuaternionElement":
        return self.element(0, 0, 1)

    @property
    def ij(self) -> "QuaternionElement":
        return self.element(0, 0, 0, 1)

    def basis(self) -> list["QuaternionElement"]:
        return [self.one, self.i, self.j, self.ij]


@dataclass(frozen=True)
class QuaternionElement:
    algebra: QuaternionAlgebra
    x: FieldElement
    y: FieldElement
    u: FieldElement
    v: FieldElement

    def __repr__(self) -> str:
        return f"({self.x}) + ({self.y})i + ({self.u})j + ({self.v})ij"

    @property
    def parts(self) -> tuple[FieldElement, FieldElement, FieldElement, FieldElement]:
        return (self.x, self.y, self.u, self.v)

    def coordinates(self) -> list[Fraction]:
        """The ``4n`` rational coordinates ``x_0..x_{n-1}, y_.., u_.., v_..``."""
        out: list[Fraction] = []
        for part in self.parts:
            out.extend(part.coords)
        return out

    def __add__(self, other: "QuaternionElement") -> "QuaternionElement":
        return QuaternionElement(self.algebra, *(p + q for p, q in zip(self.parts, other.parts)))

    def __sub__(self, other: "QuaternionElement") -> "QuaternionElement":
        return QuaternionElement(self.algebra, *(p - q for p, q in zip(self.parts, other.parts)))

    def __neg__(self) -> "QuaternionElement":
        return QuaternionElement(self.algebra, *(-p for p in self.parts))

    def __mul__(self, other):
        if isinstance(other, QuaternionElement):
            return quat_mul(self, other)
        return QuaternionElement(self.algebra, *(p * other for p in self.parts))

    def __rmul__(self, other):
        return QuaternionElement(self.algebra, *(other * p for p in self.parts))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuaternionElement):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self) -> int:
        return hash(tuple(p.coords for p in self.parts))

    def conj(self) -> "QuaternionElement":
        return quat_conj(self)

    def norm(self) -> FieldElement:
        return quat_norm(self)

    def trace(self) -> FieldElement:
        return quat_trace(self)

    def inverse(self) -> "QuaternionElement":
        return self.conj() * self.norm().inverse()

    def __pow__(self, k: int) -> "QuaternionElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = self.algebra.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_scalar(self) -> bool:
        return self.y.is_zero() and self.u.is_zero() and self.v.is_zero()


def quat_mul(p: QuaternionElement, q: QuaternionElement) -> QuaternionElement:
    A = p.algebra
    a, b = A.a, A.b
    x1, y1, u1, v1 = p.parts
    x2, y2, u2, v2 = q.parts
    ab = a * b
    x = x1 * x2 + a * (y1 * y2) + b * (u1 * u2) - ab * (v1 * v2)
    y = x1 * y2 + y1 * x2 + b * (v1 * u2 - u1 * v2)
    u = x1 * u2 + u1 * x2 + a * (y1 * v2 - v1 * y2)
    v = x1 * v2 + v1 * x2 + y1 * u2 - u1 * y2
    return QuaternionElement(A, x, y, u, v)


def quat_conj(p: QuaternionElement) -> QuaternionElement:
    return QuaternionElement(p.algebra, p.x, -p.y, -p.u, -p.v)


def quat_norm(p: QuaternionElement) -> FieldElement:
    a, b = p.algebra.a, p.algebra.b
    return p.x * p.x - a * (p.y * p.y) - b * (p.u * p.u) + (a * b) * (p.v * p.v)


def quat_trace(p: QuaternionElement) -> FieldElement:
    return p.x * 2


# ---------------------------------------------------------------------------
# ramification


@dataclass(frozen=True)
class RamificationData:
    real_places: frozenset[int]
    finite_primes: tuple[PrimeIdeal, ...]

    def __post_init__(self) -> None:
        if (len(self.real_places) + len(self.finite_primes)) % 2:
            raise ParityViolation(
                f"odd number of ramified places: {sorted(self.real_places)} + {len(self.finite_primes)} primes"
            )

    @property
    def discriminant_norm(self) -> int:
        out = 1
        for P in self.finite_primes:
            out *= P.norm
        return out

    def key(self) -> tuple:
        return (tuple(sorted(self.real_places)), tuple(sorted((P.p, P.factor_poly) for P in self.finite_primes)))

    def unramified_real_places(self, n: int) -> list[int]:
        return [i for i in range(n) if i not in self.real_places]


def ramified_at_real_place(A: QuaternionAlgebra, place: int) -> bool:
    """Real place ramifies iff both ``sigma(a) < 0`` and ``sigma(b) < 0``."""
    sa = signs_at_places(A.a)[place]
    sb = signs_at_places(A.b)[place]
    return sa < 0 and sb < 0


def hilbert_symbol_finite(A: QuaternionAlgebra, P: PrimeIdeal) -> int:
    """Local Hilbert symbol ``(a, b)_P``: ``-1`` exactly when ``A`` ramifies at ``P``."""
    return hilbert_symbol(A.a, A.b, P)


def hilbert_symbol(a: FieldElement, b: FieldElement, P: PrimeIdeal) -> int:
    comp = completion(P)
    va = comp.valuation(a)
    vb = comp.valuation(b)
    if P.p != 2:
        c = (a**vb) * (b ** (-va))
        if (va * vb) % 2:
            c = -c
        return 1 if comp.is_residue_square(c) else -1
    return _dyadic_hilbert(a, b, P, va, vb)


def _dyadic_hilbert(a: FieldElement, b: FieldElement, P: PrimeIdeal, va: int, vb: int) -> int:
    """Isotropy of ``x^2 - a y^2 - b z^2`` over a dyadic completion.

    After removing even powers of a uniformizer, ``v(a), v(b)`` lie in
    ``{0, 1}``.  A primitive zero has a unit coordinate; scaling it to 1,
    Hensel's lemma in that variable needs ``v(Q) > 2 v(2) + 2 v(coeff)``,
    so searching residues modulo ``P^N`` with ``N = 2e + 1 + 2 max(v)``
    decides the question exactly.
    """
    comp = completion(P)
    pi = comp.uniformizer()
    a1 = a / pi ** (2 * (va // 2))
    b1 = b / pi ** (2 * (vb // 2))
    va1, vb1 = va % 2, vb % 2
    N = 2 * P.e + 1 + 2 * max(va1, vb1)
    ring = comp.residue_ring(N)
    elems = ring.all_elements()
    sq = ring.mul(elems, elems)
    A_ = ring.element(a1)
    B_ = ring.element(b1)
    x2 = set(ring.keys(sq).tolist())
    ay2 = ring.mul(sq, A_)
    bz2 = ring.mul(sq, B_)
    # x = 1:  a y^2 = 1 - b z^2
    one = np.zeros((1, ring.d), dtype=np.int64)
    one[0, 0] = 1
    ay_keys = set(ring.keys(ay2).tolist())
    if any(k in ay_keys for k in ring.keys(one - bz2).tolist()):
        return 1
    # y = 1:  x^2 = a + b z^2
    if any(k in x2 for k in ring.keys(bz2 + A_).tolist()):
        return 1
    # z = 1:  x^2 = a y^2 + b
    if any(k in x2 for k in ring.keys(ay2 + B_).tolist()):
        return 1
    return -1


def _candidate_primes(A: QuaternionAlgebra) -> list[PrimeIdeal]:
    K = A.base
    cands: dict = {}
    for P in factor_prime(K, 2):
        cands[(P.p, P.factor_poly)] = P
    for x in (A.a, A.b):
        for P in factor_element(x):
            cands[(P.p, P.factor_poly)] = P
    return [cands[k] for k in sorted(cands)]


def ramification_set(A: QuaternionAlgebra) -> RamificationData:
    """Ramified real places and finite primes (candidates: primes dividing ``2ab``)."""
    n = A.base.degree
    sa, sb = signs_at_places(A.a), signs_at_places(A.b)
    real = frozenset(i for i in range(n) if sa[i] < 0 and sb[i] < 0)
    finite = tuple(P for P in _candidate_primes(A) if hilbert_symbol(A.a, A.b, P) == -1)
    return RamificationData(real, finite)


def algebras_isomorphic(A: QuaternionAlgebra, B: QuaternionAlgebra) -> bool:
    if A.base != B.base:
        raise ValueError("algebras over different fields")
    return ramification_set(A).key() == ramification_set(B).key()
