"""Exact arithmetic in monogenic totally real number fields.

A field is ``Q[x]/(f)`` for a monic irreducible integer polynomial ``f``
whose roots are all real.  Elements are stored by their rational
coordinates in the power basis ``1, a, ..., a^(n-1)`` where ``a`` is the
class of ``x``.  Real places are indexed by the roots of ``f`` sorted in
ascending order, and every sign decision is made with certified rational
intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

import mpmath

from . import polyutil
from .errors import (
    DiscriminantMismatch,
    DivisionByZero,
    NotTotallyReal,
    PrecisionExhausted,
    Reducible,
)

Rational = Union[int, Fraction]

# Sign decisions give up beyond this many bits; a nonzero element of a
# field of small height never needs anywhere near this much.
MAX_SIGN_BITS = 4096


@dataclass(frozen=True)
class CertifiedReal:
    """A closed rational interval known to contain a real number."""

    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x: Rational) -> bool:
        return self.lo <= x <= self.hi

    def sign(self) -> int | None:
        """Certified sign, or ``None`` while the interval straddles 0."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None


def _imul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(prods), max(prods)


def _interval_horner(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coeffs):
        acc = _imul(acc, (lo, hi))
        acc = (acc[0] + c, acc[1] + c)
    return acc


class NumberField:
    """A monogenic totally real field ``Q[x]/(f)``.

    Use :func:`nf_new` to construct one with validation.
    """

    def __init__(self, min_poly: Sequence[int], field_disc: int, name: str | None = None) -> None:
        self.min_poly: tuple[int, ...] = tuple(int(c) for c in min_poly)
        self.degree: int = len(self.min_poly) - 1
        self.field_disc: int = int(field_disc)
        self.name = name or f"Q[x]/({poly_to_str(self.min_poly)})"
        n = self.degree
        # reduction table: power a^k for k < 2n-1 as coordinate tuples
        table: list[tuple[Fraction, ...]] = []
        for k in range(max(2 * n - 1, 1)):
            if k < n:
                table.append(tuple(Fraction(int(i == k)) for i in range(n)))
            else:
                prev = table[k - 1]
                # a * prev: shift then reduce the a^n term
                shifted = [Fraction(0)] + list(prev[:-1])
                top = prev[-1]
                for i in range(n):
                    shifted[i] -= top * self.min_poly[i]
                table.append(tuple(shifted))
        self._power_table = table
        self._int_table = [tuple(int(c) for c in row) for row in table]
        self._root_cache: dict[int, list[tuple[Fraction, Fraction]]] = {}
        self._mp_cache: dict[int, list] = {}

    # -- identity ---------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, NumberField) and other.min_poly == self.min_poly

    def __hash__(self) -> int:
        return hash(self.min_poly)

    def __repr__(self) -> str:
        return f"NumberField({list(self.min_poly)}, disc={self.field_disc})"

    # -- elements ---------------------------------------------------------
    def element(self, coords: Iterable[Rational]) -> "FieldElement":
        c = [Fraction(x) for x in coords]
        if len(c) > self.degree:
            return self.from_poly(c)
        c += [Fraction(0)] * (self.degree - len(c))
        return FieldElement(self, tuple(c))

    def from_poly(self, poly: Sequence[Rational]) -> "FieldElement":
        """Reduce an arbitrary polynomial in the generator modulo ``f``."""
        n = self.degree
        _, r = polyutil.divmod_poly([Fraction(c) for c in poly], list(self.min_poly))
        r = list(r) + [Fraction(0)] * (n - len(r))
        return FieldElement(self, tuple(r[:n]))

    def __call__(self, value: Union[Rational, Sequence[Rational], "FieldElement"]) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError("element of a different field")
            return value
        if isinstance(value, (int, Fraction)):
            return self.element([value])
        return self.element(value)

    @property
    def one(self) -> "FieldElement":
        return self.element([1])

    @property
    def zero(self) -> "FieldElement":
        return self.element([])

    @property
    def gen(self) -> "FieldElement":
        if self.degree == 1:
            return self.element([-self.min_poly[0]])
        return self.element([0, 1])

    # -- real places ------------------------------------------------------
    @cached_property
    def _root_intervals(self) -> list[tuple[Fraction, Fraction]]:
        return polyutil.isolate_real_roots(list(self.min_poly))

    def root_interval(self, place: int, bits: int) -> tuple[Fraction, Fraction]:
        """Isolating interval of the ``place``-th root with width <= 2^-bits."""
        cache = self._root_cache.setdefault(bits, [])
        if not cache:
            width = Fraction(1, 2**bits)
            for lo, hi in self._root_intervals:
                cache.append(polyutil.refine_root(list(self.min_poly), lo, hi, width))
        return cache[place]

    @property
    def real_roots(self) -> list[CertifiedReal]:
        return [CertifiedReal(*self.root_interval(i, 60)) for i in range(self.degree)]

    def roots_mp(self, dps: int = 40) -> list:
        """Roots as ``mpmath.mpf`` values accurate to about ``dps`` digits."""
        if dps not in self._mp_cache:
            bits = int(dps * 3.33) + 20
            with mpmath.workdps(dps + 10):
                vals = []
                for i in range(self.degree):
                    lo, hi = self.root_interval(i, bits)
                    vals.append(mpmath.mpf(lo.numerator) / lo.denominator / 2
                                + mpmath.mpf(hi.numerator) / hi.denominator / 2)
            self._mp_cache[dps] = vals
        return self._mp_cache[dps]

    def roots_float(self) -> list[float]:
        return [float(r) for r in self.roots_mp(30)]

    @cached_property
    def vandermonde(self):
        """Matrix ``V`` with ``V[i][k] = sigma_i(a)^k`` as floats (numpy array)."""
        import numpy as np

        r = self.roots_float()
        return np.array([[ri**k for k in range(self.degree)] for ri in r])


@dataclass(frozen=True)
class FieldElement:
    field: NumberField = dc_field(repr=False)
    coords: tuple[Fraction, ...]

    # -- helpers ----------------------------------------------------------
    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element([other])
        return NotImplemented  # type: ignore[return-value]

    def __repr__(self) -> str:
        return f"FieldElement({poly_to_str(self.coords, var='a')})"

    def __str__(self) -> str:
        return poly_to_str(self.coords, var="a")

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, tuple(a * other for a in self.coords))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = self.field.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        prod[i + j] += a * b
        out = list(prod[:n])
        table = self.field._power_table
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                row = table[k]
                for i in range(n):
                    if row[i]:
                        out[i] += c * row[i]
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.coords[0] == other and all(c == 0 for c in self.coords[1:])
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coords == other.coords
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coords)

    def __bool__(self) -> bool:
        return any(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral_coords(self) -> bool:
        """True when all power-basis coordinates are integers (membership in Z[a])."""
        return all(c.denominator == 1 for c in self.coords)

    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coords))

    # -- linear algebra ---------------------------------------------------
    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by ``self``; column k is ``self * a^k``."""
        n = self.field.degree
        cols = []
        power = self.field.one
        gen = self.field.gen if n > 1 else None
        for k in range(n):
            cols.append((self * power).coords)
            if gen is not None:
                power = power * gen
        return [[cols[k][i] for k in range(n)] for i in range(n)]

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        m = self.mult_matrix()
        n = self.field.degree
        rhs = [Fraction(int(i == 0)) for i in range(n)]
        return FieldElement(self.field, tuple(solve_rational(m, rhs)))

    def charpoly(self) -> list[Fraction]:
        return charpoly(self.mult_matrix())

    def trace(self) -> Fraction:
        return trace_norm(self)[0]

    def norm(self) -> Fraction:
        return trace_norm(self)[1]

    def as_poly(self) -> list[Fraction]:
        return polyutil.trim(self.coords)

    # -- real embeddings --------------------------------------------------
    def embed(self, place: int, bits: int = 53) -> CertifiedReal:
        return embed(self, place, bits)

    def embed_mp(self, place: int, dps: int = 40):
        root = self.field.roots_mp(dps)[place]
        with mpmath.workdps(dps + 10):
            acc = mpmath.mpf(0)
            for c in reversed(self.coords):
                acc = acc * root + mpmath.mpf(c.numerator) / c.denominator
        return acc

    def embeddings_float(self) -> list[float]:
        return [float(v) for v in (self.embed_mp(i, 30) for i in range(self.field.degree))]

    def signs(self) -> tuple[int, ...]:
        return signs_at_places(self)


# ---------------------------------------------------------------------------
# exact linear algebra helpers


def solve_rational(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly by Gaussian elimination."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col] / pv
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def det_rational(matrix: Sequence[Sequence[Rational]]) -> Fraction:
    n = len(matrix)
    a = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col]
        det *= pv
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / pv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def charpoly(matrix: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Characteristic polynomial ``det(xI - M)`` (ascending) by Faddeev-LeVerrier."""
    n = len(matrix)
    m = [[Fraction(v) for v in row] for row in matrix]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]  # M_0 = I
    for k in range(1, n + 1):
        am = [[sum(m[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        ck = -sum(am[i][i] for i in range(n)) / k
        coeffs[n - k] = ck
        mk = [[am[i][j] + (ck if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


# ---------------------------------------------------------------------------
# public operations


def nf_new(coeffs: Sequence[int], expected_disc: int, name: str | None = None) -> NumberField:
    """Build a validated monogenic totally real field from ascending coefficients.

    Raises :class:`Reducible` when ``f`` factors over Q,
    :class:`NotTotallyReal` when ``f`` has non-real roots, and
    :class:`DiscriminantMismatch` when ``disc(f)`` differs from
    ``expected_disc`` (a wrong catalog entry or a non-monogenic presentation).
    """
    coeffs = [int(c) for c in coeffs]
    if not coeffs or coeffs[-1] != 1:
        raise ValueError("minimal polynomial must be monic")
    n = len(coeffs) - 1
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n > 1:
        import sympy

        x = sympy.Symbol("x")
        _, factors = sympy.factor_list(sum(c * x**i for i, c in enumerate(coeffs)), x)
        if len(factors) != 1 or factors[0][1] != 1:
            raise Reducible(f"{poly_to_str(coeffs)} is reducible over Q")
        seq = polyutil.sturm_sequence(coeffs)
        bound = polyutil.cauchy_bound(coeffs) + 1
        real = polyutil.sturm_count(seq, -bound, bound)
        if real != n:
            raise NotTotallyReal(f"{poly_to_str(coeffs)} has only {real} real roots out of {n}")
    disc = polyutil.discriminant(coeffs)
    if disc != expected_disc:
        raise DiscriminantMismatch(
            f"disc({poly_to_str(coeffs)}) = {disc}, expected {expected_disc}",
            details={"computed": int(disc), "expected": int(expected_disc)},
        )
    return NumberField(coeffs, int(disc), name=name)


def elem_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def elem_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def elem_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def trace_norm(x: FieldElement) -> tuple[Fraction, Fraction]:
    """Field trace and norm read off the characteristic polynomial of ``x``."""
    cp = x.charpoly()
    n = x.field.degree
    trace = -cp[n - 1]
    norm = cp[0] if n % 2 == 0 else -cp[0]
    return trace, norm


def embed(x: FieldElement, place: int, bits: int = 53) -> CertifiedReal:
    """Interval of width at most ``2^-bits`` containing ``sigma_place(x)``."""
    K = x.field
    if not 0 <= place < K.degree:
        raise IndexError("place out of range")
    poly = polyutil.trim(x.coords)
    if len(poly) <= 1:
        c = poly[0] if poly else Fraction(0)
        return CertifiedReal(c, c)
    target = Fraction(1, 2**bits)
    work = bits + 8
    while True:
        lo, hi = K.root_interval(place, work)
        ilo, ihi = _interval_horner(poly, lo, hi)
        if ihi - ilo <= target:
            return CertifiedReal(ilo, ihi)
        work += 16


def signs_at_places(x: FieldElement) -> tuple[int, ...]:
    """Certified sign of ``sigma_i(x)`` at each real place (ascending roots)."""
    if x.is_zero():
        raise PrecisionExhausted("sign of zero requested")
    out = []
    for place in range(x.field.degree):
        bits = 32
        while True:
            s = embed(x, place, bits).sign()
            if s is not None:
                out.append(s)
                break
            bits *= 2
            if bits > MAX_SIGN_BITS:
                raise PrecisionExhausted(f"could not certify sign at place {place}")
    return tuple(out)


@dataclass(frozen=True)
class UnitSystem:
    """Fundamental units of ``R`` (torsion is just ``-1`` for a real field)."""

    fundamental_units: tuple[FieldElement, ...]
    includes_minus_one: bool = True

    def validate(self) -> None:
        if not self.fundamental_units:
            return
        K = self.fundamental_units[0].field
        n = K.degree
        for u in self.fundamental_units:
            if abs(u.norm()) != 1:
                raise ValueError(f"{u} is not a unit")
        if len(self.fundamental_units) != n - 1:
            raise ValueError("expected n-1 fundamental units")
        if n > 1:
            logs = mpmath.matrix(
                [[mpmath.log(abs(u.embed_mp(i))) for i in range(n - 1)] for u in self.fundamental_units]
            )
            if abs(mpmath.det(logs)) < mpmath.mpf(10) ** -20:
                raise ValueError("units are multiplicatively dependent")

    def sign_vectors(self) -> list[tuple[int, ...]]:
        vecs = [u.signs() for u in self.fundamental_units]
        if self.includes_minus_one and self.fundamental_units:
            n = self.fundamental_units[0].field.degree
            vecs = [tuple([-1] * n)] + vecs
        return vecs


def poly_to_str(coeffs: Sequence[Rational], var: str = "x") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        if k == 0:
            body = str(abs(c))
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text
