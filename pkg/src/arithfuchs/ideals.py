"""Prime ideals of monogenic rings of integers and local behaviour at them.

Primes above ``p`` come from the factorization of the minimal polynomial
modulo ``p`` (Dedekind's criterion, unconditional for ``R = Z[a]``).  For
local questions each prime ``P`` gets a :class:`Completion`: the matching
``p``-adic factor ``G`` of ``f`` obtained by Hensel lifting, so that
``Z_p[t]/(G)`` is the valuation ring of ``k_P`` with the integral basis
``1, t, ..., t^(d-1)``.  Valuations, residues and square classes are all
computed there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import ffpoly
from .errors import PeriodNotSupported, PrecisionExhausted
from .lattice import hnf
from .numfield import FieldElement, NumberField, poly_to_str

DEFAULT_SEED = 20240601

# Enumerating residues modulo P^N is refused beyond this many classes.
MAX_RESIDUE_CLASSES = 1 << 22


class SplittingBehavior(enum.Enum):
    SPLIT = "Split"
    INERT = "Inert"
    RAMIFIED = "Ramified"

    @property
    def artin(self) -> int:
        """Artin symbol value: 1 split, 0 ramified, -1 inert."""
        return {"Split": 1, "Ramified": 0, "Inert": -1}[self.value]


Split = SplittingBehavior.SPLIT
Inert = SplittingBehavior.INERT
Ramified = SplittingBehavior.RAMIFIED


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime ``P = (p, g(a))`` of ``R = Z[a]``."""

    field: NumberField
    rational_prime: int
    residue_degree: int
    ramification_index: int
    factor_poly: tuple[int, ...]

    @property
    def norm(self) -> int:
        return self.rational_prime**self.residue_degree

    @property
    def p(self) -> int:
        return self.rational_prime

    @property
    def e(self) -> int:
        return self.ramification_index

    @property
    def f(self) -> int:
        return self.residue_degree

    def label(self) -> str:
        return f"P{self.norm}[{poly_to_str(self.factor_poly, 't')}]"

    def __repr__(self) -> str:
        return (
            f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, norm={self.norm}, "
            f"g={poly_to_str(self.factor_poly, 't')})"
        )

    def generator_lift(self) -> FieldElement:
        """The element ``g(a)`` with ``g`` lifted to small integer coefficients."""
        p = self.p
        coeffs = [c if c <= p // 2 else c - p for c in self.factor_poly]
        return self.field.from_poly(coeffs)

    # convenient pass-throughs to the completion
    def completion(self) -> "Completion":
        return completion(self)

    def valuation(self, x: FieldElement) -> int:
        return completion(self).valuation(x)

    def contains(self, x: FieldElement) -> bool:
        return x.is_zero() or completion(self).valuation(x) > 0


def finite_field_factor(g: Sequence[int], p: int, seed: int = DEFAULT_SEED) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of ``g`` over F_p with multiplicities."""
    return ffpoly.factor(g, p, seed=seed)


def factor_prime(K: NumberField, p: int, seed: int = DEFAULT_SEED) -> list[PrimeIdeal]:
    """All primes of ``R`` above the rational prime ``p`` (Dedekind)."""
    return list(_factor_prime_cached(K, p, seed))


@lru_cache(maxsize=4096)
def _factor_prime_cached(K: NumberField, p: int, seed: int) -> tuple[PrimeIdeal, ...]:
    facs = finite_field_factor(list(K.min_poly), p, seed)
    primes = tuple(PrimeIdeal(K, p, len(g) - 1, k, tuple(g)) for g, k in facs)
    assert sum(P.e * P.f for P in primes) == K.degree
    return primes


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(x) for x in np.nonzero(sieve)[0]]


def primes_of_norm_up_to(K: NumberField, bound: int) -> list[PrimeIdeal]:
    """All primes of ``R`` with norm at most ``bound``, sorted by (norm, p, g)."""
    out = []
    for p in primes_up_to(bound):
        for P in factor_prime(K, p):
            if P.norm <= bound:
                out.append(P)
    out.sort(key=lambda P: (P.norm, P.p, P.factor_poly[::-1]))
    return out


def factor_element(x: FieldElement) -> dict[PrimeIdeal, int]:
    """Prime factorization of the fractional ideal ``xR`` (nonzero ``x``)."""
    if x.is_zero():
        raise ValueError("cannot factor zero")
    nm = abs(x.norm())
    den = x.denominator()
    cand = set(_prime_factors(nm.numerator)) | set(_prime_factors(nm.denominator)) | set(_prime_factors(den))
    out = {}
    for p in sorted(cand):
        for P in factor_prime(x.field, p):
            v = P.valuation(x)
            if v:
                out[P] = v
    return out


def _prime_factors(n: int) -> list[int]:
    n = abs(int(n))
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# integer polynomials modulo p^k


def _zmod(poly: Sequence[int], m: int) -> list[int]:
    out = [c % m for c in poly]
    while out and out[-1] == 0:
        out.pop()
    return out


def _zmul(a: Sequence[int], b: Sequence[int], m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _zmod(out, m)


def _zrem_monic(a: Sequence[int], g: Sequence[int], m: int) -> list[int]:
    """Remainder of ``a`` by the monic polynomial ``g`` with coefficients mod ``m``."""
    r = [c % m for c in a]
    dg = len(g) - 1
    for k in range(len(r) - 1 - dg, -1, -1):
        c = r[k + dg]
        if c:
            for j in range(dg + 1):
                r[k + j] = (r[k + j] - c * g[j]) % m
    r = r[:dg] if len(r) > dg else r
    return r + [0] * (dg - len(r))


def _zdiv_monic(a: Sequence[int], g: Sequence[int], m: int) -> list[int]:
    r = [c % m for c in a]
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return []
    q = [0] * (len(r) - dg)
    for k in range(len(r) - 1 - dg, -1, -1):
        c = r[k + dg]
        q[k] = c
        if c:
            for j in range(dg + 1):
                r[k + j] = (r[k + j] - c * g[j]) % m
    return _zmod(q, m)


def hensel_factor(f: Sequence[int], a: Sequence[int], p: int, precision: int) -> list[int]:
    """Lift the monic factor ``a`` (mod p) of ``f``, coprime to its cofactor, to mod p^precision.

    Returns the coefficient list (ascending, length ``deg a + 1``) of the
    unique monic ``A`` with ``A = a (mod p)`` and ``A | f`` over Z/p^precision.
    """
    f = [int(c) for c in f]
    a = ffpoly.monic(a, p)
    b, r = ffpoly.divmod_(f, a, p)
    if r:
        raise ValueError("not a factor modulo p")
    g, s, t = ffpoly.xgcd(a, b, p)
    if g != [1]:
        raise ValueError("factor and cofactor are not coprime modulo p")
    A, B = list(a), list(b)
    mod_k = p
    for _ in range(1, precision):
        big = mod_k * p
        err = [
            ((f[i] if i < len(f) else 0) - c) % big
            for i, c in enumerate(_zmul(A, B, big) + [0] * max(0, len(f) - len(_zmul(A, B, big))))
        ]
        err = [c // mod_k for c in err]
        e = ffpoly.norm(err, p)
        if e:
            # dA = t*e mod a ; dB = (e - dA*B) / A   (all mod p)
            dA = ffpoly.mod(ffpoly.mul(t, e, p), a, p)
            dB = ffpoly.divmod_(ffpoly.sub(e, ffpoly.mul(dA, b, p), p), a, p)[0]
            A = [
                ((A[i] if i < len(A) else 0) + mod_k * (dA[i] if i < len(dA) else 0)) % big
                for i in range(len(A))
            ]
            B = [
                ((B[i] if i < len(B) else 0) + mod_k * (dB[i] if i < len(dB) else 0)) % big
                for i in range(max(len(B), len(dB)))
            ]
        mod_k = big
    return A


def _det_int(matrix: list[list[int]]) -> int:
    """Exact integer determinant (Bareiss fraction-free elimination)."""
    n = len(matrix)
    m = [row[:] for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def _vp(n: int, p: int) -> int:
    n = abs(n)
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class Completion:
    """The completion ``k_P`` realised as ``Q_p[t]/(G)``."""

    def __init__(self, P: PrimeIdeal) -> None:
        self.P = P
        self.p = P.p
        self.e = P.e
        self.f = P.f
        self.d = P.e * P.f
        self._lifts: dict[int, list[int]] = {}
        self._uniformizer: FieldElement | None = None

    # -- lifted factor ----------------------------------------------------
    def factor_mod(self, precision: int) -> list[int]:
        """Monic ``G`` modulo ``p^precision`` (ascending coefficients)."""
        precision = max(precision, 1)
        best = min((k for k in self._lifts if k >= precision), default=None)
        if best is None:
            target = max(precision, 8)
            g_pow = [1]
            for _ in range(self.e):
                g_pow = ffpoly.mul(g_pow, list(self.P.factor_poly), self.p)
            self._lifts[target] = hensel_factor(self.P.field.min_poly, g_pow, self.p, target)
            best = target
        m = self.p**precision
        return [c % m for c in self._lifts[best]]

    # -- maps into the local ring ------------------------------------------
    def local_image(self, x: FieldElement, precision: int) -> list[int]:
        """Coordinates of ``x`` in ``Z_p[t]/(G)`` modulo ``p^precision``.

        Raises ``ValueError`` when ``x`` is not integral at ``P``.
        """
        den = x.denominator()
        k = _vp(den, self.p) if den % self.p == 0 else 0
        unit_den = den // self.p**k
        num = [int(c * den) for c in x.coords]
        total = precision + k
        G = self.factor_mod(total)
        m = self.p**total
        loc = _zrem_monic(num, G, m)
        if k:
            pk = self.p**k
            if any(c % pk for c in loc):
                raise ValueError("element is not integral at P")
            loc = [c // pk for c in loc]
        mm = self.p**precision
        inv = pow(unit_den, -1, mm)
        return [c * inv % mm for c in loc]

    def valuation(self, x: FieldElement) -> int:
        if x.is_zero():
            raise ValueError("valuation of zero")
        den = x.denominator()
        num_elem = x * den
        k = _vp(den, self.p) if den % self.p == 0 else 0
        nm = abs(num_elem.norm())
        bound = _vp(int(nm), self.p) if nm % self.p == 0 else 0
        if bound == 0:
            return -self.e * k
        prec = bound + 2
        loc = self.local_image(num_elem, prec)
        G = self.factor_mod(prec)
        m = self.p**prec
        cols = []
        cur = loc
        for _ in range(self.d):
            cols.append(cur)
            cur = _zrem_monic([0] + cur, G, m)
        mat = [[cols[j][i] for j in range(self.d)] for i in range(self.d)]
        det = _det_int(mat) % m
        if det == 0:
            raise PrecisionExhausted("local norm vanished at working precision")
        vnorm = _vp(det, self.p)
        assert vnorm % self.f == 0
        return vnorm // self.f - self.e * k

    def uniformizer(self) -> FieldElement:
        """A global element of valuation exactly one at ``P``."""
        if self._uniformizer is None:
            K = self.P.field
            if self.e == 1:
                cands = [K(self.p)]
            else:
                g = self.P.generator_lift()
                cands = [g, g + self.p, g - self.p, g + 2 * self.p]
            for c in cands:
                if not c.is_zero() and self.valuation(c) == 1:
                    self._uniformizer = c
                    break
            else:  # pragma: no cover - Dedekind guarantees one of the candidates
                raise RuntimeError("no uniformizer found")
        return self._uniformizer

    def unit_part(self, x: FieldElement) -> tuple[int, FieldElement]:
        v = self.valuation(x)
        return v, x / self.uniformizer() ** v

    def residue(self, x: FieldElement) -> list[int]:
        """Image of a ``P``-integral ``x`` in ``F_p[t]/(g)`` (ascending coefficients)."""
        loc = self.local_image(x, 1)
        g = list(self.P.factor_poly)
        r = ffpoly.mod(loc, g, self.p)
        return r + [0] * (self.f - len(r))

    def is_residue_square(self, x: FieldElement) -> bool:
        """Quadratic residue test for a ``P``-unit (odd residue characteristic)."""
        r = ffpoly.norm(self.residue(x), self.p)
        if not r:
            raise ValueError("not a unit at P")
        q = self.p**self.f
        if self.p == 2:
            return True
        pw = ffpoly.powmod(r, (q - 1) // 2, list(self.P.factor_poly), self.p)
        return pw == [1]

    # -- residues modulo P^N ------------------------------------------------
    def residue_ring(self, N: int) -> "ResidueRing":
        return ResidueRing(self, N)


class ResidueRing:
    """``O_P / P^N`` with vectorised arithmetic, used for dyadic square classes.

    Elements are coordinate vectors in ``Z/p^M [t]/(G)`` with ``M = ceil(N/e)``;
    ``P^N`` is the lattice spanned by ``pi^N t^i`` together with ``p^M``, and
    every vector is reduced to its canonical representative with respect to
    the Hermite normal form of that lattice.
    """

    def __init__(self, comp: Completion, N: int) -> None:
        self.comp = comp
        self.N = N
        self.M = -(-N // comp.e)
        self.mod = comp.p**self.M
        d = comp.d
        self.d = d
        self.G = comp.factor_mod(self.M)
        # reduction tensor: t^(i+j) mod G
        red = np.zeros((2 * d - 1, d), dtype=np.int64)
        for k in range(2 * d - 1):
            mono = [0] * k + [1]
            red[k] = _zrem_monic(mono, self.G, self.mod) if k >= d else [int(i == k) for i in range(d)]
        self.red = red
        # generators of P^N
        pi_loc = comp.local_image(comp.uniformizer(), self.M)
        pow_n = [1] + [0] * (d - 1)
        for _ in range(N):
            pow_n = self._mul_list(pow_n, pi_loc)
        gens = []
        cur = pow_n
        for _ in range(d):
            gens.append(cur)
            cur = _zrem_monic([0] + cur, self.G, self.mod)
        gens += [[self.mod if i == j else 0 for i in range(d)] for j in range(d)]
        self.hnf = hnf(gens, d)
        self.size = 1
        for i in range(d):
            self.size *= self.hnf[i][i]
        if self.size != comp.p ** (comp.f * N):
            raise PrecisionExhausted("residue lattice has unexpected index")

    def _mul_list(self, a: list[int], b: list[int]) -> list[int]:
        return _zrem_monic(_zmul(a, b, self.mod), self.G, self.mod)

    def all_elements(self) -> np.ndarray:
        if self.size > MAX_RESIDUE_CLASSES:
            raise PrecisionExhausted(f"residue ring of size {self.size} too large to enumerate")
        radices = [self.hnf[i][i] for i in range(self.d)]
        grids = np.meshgrid(*[np.arange(r, dtype=np.int64) for r in radices], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        prod = np.zeros((max(a.shape[0], b.shape[0]), 2 * self.d - 1), dtype=np.int64)
        for i in range(self.d):
            for j in range(self.d):
                prod[:, i + j] += a[:, i] * b[:, j] % self.mod
        prod %= self.mod
        out = np.zeros((prod.shape[0], self.d), dtype=np.int64)
        for k in range(2 * self.d - 1):
            out += (prod[:, k : k + 1] * self.red[k][None, :]) % self.mod
        return out % self.mod

    def canon(self, v: np.ndarray) -> np.ndarray:
        v = np.atleast_2d(np.array(v, dtype=np.int64)) % self.mod
        v = v.copy()
        for i in range(self.d):
            h = self.hnf[i][i]
            q = v[:, i] // h
            row = np.array(self.hnf[i], dtype=np.int64)
            v = (v - q[:, None] * row[None, :]) % self.mod
        return v

    def keys(self, v: np.ndarray) -> np.ndarray:
        c = self.canon(v)
        key = np.zeros(c.shape[0], dtype=np.int64)
        for i in range(self.d):
            key = key * self.hnf[i][i] + c[:, i]
        return key

    def element(self, x: FieldElement) -> np.ndarray:
        return np.array([self.comp.local_image(x, self.M)], dtype=np.int64)


_COMPLETIONS: dict[PrimeIdeal, Completion] = {}


def completion(P: PrimeIdeal) -> Completion:
    c = _COMPLETIONS.get(P)
    if c is None:
        c = Completion(P)
        _COMPLETIONS[P] = c
    return c


# ---------------------------------------------------------------------------
# quadratic extensions and cyclotomic subfields


def local_square(P: PrimeIdeal, x: FieldElement) -> bool:
    """Is the nonzero ``x`` a square in ``k_P``?"""
    comp = completion(P)
    v, u = comp.unit_part(x)
    if v % 2:
        return False
    if P.p != 2:
        return comp.is_residue_square(u)
    ring = comp.residue_ring(2 * P.e + 1)
    return _is_square_mod(ring, u)


def _is_square_mod(ring: ResidueRing, u: FieldElement) -> bool:
    elems = ring.all_elements()
    sq = ring.keys(ring.mul(elems, elems))
    target = ring.keys(ring.element(u))[0]
    return bool(np.any(sq == target))


def quadratic_behavior(P: PrimeIdeal, u: FieldElement) -> SplittingBehavior:
    """Decomposition of ``P`` in ``k(sqrt(u))|k`` for a nonzero ``u``."""
    comp = completion(P)
    v, w = comp.unit_part(u)
    if v % 2:
        return Ramified
    if P.p != 2:
        return Split if comp.is_residue_square(w) else Inert
    if _is_square_mod(comp.residue_ring(2 * P.e + 1), w):
        return Split
    # a unit generates an unramified extension iff it is a square modulo 4
    if _is_square_mod(comp.residue_ring(2 * P.e), w):
        return Inert
    return Ramified


@lru_cache(maxsize=None)
def cyclotomic_real_minpoly(m: int) -> tuple[int, ...]:
    """Minimal polynomial of ``2cos(pi/m)`` over Q (ascending integer coefficients)."""
    import mpmath

    if m < 2:
        raise ValueError("m must be at least 2")
    with mpmath.workdps(60):
        roots = [2 * mpmath.cos(mpmath.pi * j / m) for j in range(1, m) if math.gcd(j, 2 * m) == 1]
        poly = [mpmath.mpf(1)]
        for r in roots:
            nxt = [mpmath.mpf(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= r * c
            poly = nxt
        out = []
        for c in poly:
            ci = int(mpmath.nint(c))
            if abs(c - ci) > mpmath.mpf(10) ** -30:
                raise ArithmeticError("non-integral cyclotomic coefficient")
            out.append(ci)
    return tuple(out)


def cyclotomic_real_degree(m: int) -> int:
    return len(cyclotomic_real_minpoly(m)) - 1


def cyclotomic_real_element(K: NumberField, m: int) -> FieldElement | None:
    """An element ``lam`` of ``K`` conjugate to ``2cos(pi/m)``, or ``None``.

    Candidates are found from the real embeddings (each embedding of ``lam``
    must be one of the conjugates ``2cos(j pi/m)``), then confirmed by an
    exact evaluation of the minimal polynomial.
    """
    import itertools

    psi = cyclotomic_real_minpoly(m)
    d = len(psi) - 1
    n = K.degree
    if n % d:
        return None
    if d == 1:
        return K(-psi[0])
    vals = sorted(
        float(2 * math.cos(math.pi * j / m)) for j in range(1, m) if math.gcd(j, 2 * m) == 1
    )
    V = K.vandermonde
    Vinv = np.linalg.inv(V)
    found = []
    for choice in itertools.product(range(d), repeat=n):
        counts = [choice.count(i) for i in range(d)]
        if any(c != n // d for c in counts):
            continue
        target = np.array([vals[c] for c in choice])
        x = Vinv @ target
        xr = np.round(x)
        if np.max(np.abs(x - xr)) > 1e-6:
            continue
        lam = K.element([int(c) for c in xr])
        acc = K.zero
        for c in reversed(psi):
            acc = acc * lam + c
        if acc.is_zero():
            found.append(lam)
    if not found:
        return None
    found.sort(key=lambda e: (sum(abs(c) for c in e.coords), e.coords))
    return found[0]


def admissible_periods(K: NumberField, max_m: int = 60) -> list[int]:
    """All ``m >= 2`` with ``Q(cos(pi/m))`` contained in ``K``."""
    out = []
    for m in range(2, max_m + 1):
        d = cyclotomic_real_degree(m)
        if K.degree % d:
            continue
        if d > 1:
            from .polyutil import discriminant

            dm = int(discriminant(list(cyclotomic_real_minpoly(m))))
            if K.field_disc % dm:
                continue
        if cyclotomic_real_element(K, m) is not None:
            out.append(m)
    return out


def splitting_in_cm_extension(K: NumberField, P: PrimeIdeal, m: int) -> SplittingBehavior:
    """Decomposition of ``P`` in ``k(zeta_2m)|k``.

    ``k(zeta_2m) = k(sqrt(lam^2 - 4))`` where ``lam`` is a conjugate of
    ``2cos(pi/m)`` in ``k``; ``m = 2`` gives ``k(i)`` and ``m = 3`` gives
    ``k(omega)``.
    """
    lam = cyclotomic_real_element(K, m)
    if lam is None:
        raise PeriodNotSupported(f"Q(cos(pi/{m})) is not a subfield of {K.name}")
    return quadratic_behavior(P, lam * lam - 4)
