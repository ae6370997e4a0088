"""Areas, zeta values, torsion counts and signature arithmetic.

Areas are handled as exact rational multiples of pi wherever the group
theory makes them rational (Riemann-Hurwitz), and as floating values with
rigorous error bounds where they come from ``zeta_k(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbiguousRecognition, BasisHypothesisFails, NonHyperbolic
from .ideals import (
    PrimeIdeal,
    SplittingBehavior,
    admissible_periods,
    factor_prime,
    primes_up_to,
    splitting_in_cm_extension,
)
from .numfield import NumberField

DEFAULT_ZETA_BOUND = 10**6


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True, order=True)
class Signature:
    """Signature ``(g; m_1, ..., m_r)`` of a cocompact Fuchsian group."""

    genus: int
    periods: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "periods", tuple(sorted(int(m) for m in self.periods)))
        if self.genus < 0 or any(m < 2 for m in self.periods):
            raise ValueError("invalid signature")

    def __str__(self) -> str:
        if not self.periods:
            return f"({self.genus};-)"
        return f"({self.genus};{','.join(str(m) for m in self.periods)})"

    @classmethod
    def parse(cls, text: str) -> "Signature":
        body = text.strip().strip("()")
        g, _, rest = body.partition(";")
        rest = rest.strip()
        periods: list[int] = []
        if rest and rest not in ("-", "−"):
            for tok in rest.split(","):
                tok = tok.strip()
                if "^" in tok:
                    base, exp = tok.split("^")
                    periods += [int(base)] * int(exp)
                else:
                    periods.append(int(tok))
        return cls(int(g), tuple(periods))

    def period_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for m in self.periods:
            out[m] = out.get(m, 0) + 1
        return out


def rh_area(sig: Signature) -> Fraction:
    """Hyperbolic area divided by pi: ``2(2g - 2 + sum (m_i - 1)/m_i)``."""
    val = 2 * (2 * sig.genus - 2 + sum(Fraction(m - 1, m) for m in sig.periods))
    if val <= 0:
        raise NonHyperbolic(f"{sig} is not hyperbolic (area {val}*pi)")
    return val


def minimal_torsionfree_index(sig: Signature) -> int:
    """Smallest index of a torsion-free subgroup: ``2^eps * lcm(periods)``."""
    if not sig.periods:
        return 1
    lam = reduce(math.lcm, sig.periods)
    odd_count = sum(1 for m in sig.periods if (lam // m) % 2 == 1)
    eps = 1 if lam % 2 == 0 and odd_count % 2 == 1 else 0
    return 2**eps * lam


def _divisors(n: int) -> list[int]:
    return [d for d in range(2, n + 1) if n % d == 0]


def enumerate_genus2_supersignatures(max_index: int = 84) -> list[Signature]:
    """Cocompact signatures of groups containing a genus-two surface group of index >= 2.

    A signature qualifies when ``M * area = 4 pi`` for an integer ``M >= 2``
    and its minimal torsion-free index divides ``M``.  ``M`` never exceeds 84
    because no Fuchsian group has area below ``pi/21``.  Every period divides
    ``M`` (it divides the lcm, which divides the minimal index), so periods
    are drawn from the divisors of ``M``.
    """
    found: set[Signature] = set()
    for M in range(2, max_index + 1):
        target_area = Fraction(4, M)
        divs = _divisors(M)
        for g in (0, 1):
            max_r = 6 if g == 0 else 2
            need = target_area / 2 - (2 * g - 2)  # required sum of (1 - 1/m)
            for periods in _multisets_with_sum(divs, need, max_r):
                sig = Signature(g, periods)
                if minimal_torsionfree_index(sig) and M % minimal_torsionfree_index(sig) == 0:
                    found.add(sig)
    return sorted(found, key=lambda s: (s.genus, len(s.periods), s.periods))


def _multisets_with_sum(
    allowed: Sequence[int], need: Fraction, max_len: int, start: int = 0
) -> Iterable[tuple[int, ...]]:
    """Nondecreasing tuples from ``allowed`` with ``sum(1 - 1/m) == need``."""
    if need == 0:
        yield ()
        return
    if need < 0 or max_len == 0:
        return
    for idx in range(start, len(allowed)):
        m = allowed[idx]
        term = 1 - Fraction(1, m)
        if term > need:
            break
        # the remaining terms are at least ``term`` each
        if term * max_len < need and all(1 - Fraction(1, x) < need / max_len for x in allowed[idx:]):
            continue
        for rest in _multisets_with_sum(allowed, need - term, max_len - 1, idx):
            yield (m,) + rest


def solve_signature(
    area: Fraction,
    admissible: Iterable[int],
    forced_nonzero: Iterable[int] = (),
    forced_zero: Iterable[int] = (),
    counts: dict[int, int] | None = None,
) -> list[Signature]:
    """All signatures of the given area (a multiple of pi) with constrained periods.

    Periods come from ``admissible`` minus ``forced_zero``; every period in
    ``forced_nonzero`` must occur.  ``counts`` optionally pins the exact
    number of periods equal to ``m``.
    """
    area = Fraction(area)
    if area <= 0:
        raise ValueError("area must be positive")
    zero = set(forced_zero)
    allowed = sorted(set(m for m in admissible if m >= 2) - zero)
    nonzero = set(forced_nonzero)
    out = []
    g = 0
    while Fraction(2 * (2 * g - 2)) <= area:
        need = area / 2 - (2 * g - 2)
        max_r = int(need * 2) + 1
        for periods in _multisets_with_sum(allowed, need, max_r):
            if not nonzero <= set(periods):
                continue
            sig = Signature(g, periods)
            if counts and any(sig.periods.count(m) != c for m, c in counts.items()):
                continue
            out.append(sig)
        g += 1
    return sorted(out)


# ---------------------------------------------------------------------------
# zeta values and coareas


@dataclass(frozen=True)
class ZetaValue:
    """Truncated Euler product for ``zeta_k(2)``.

    The true value lies in ``[value, value + error_bound]``.
    """

    value: float
    error_bound: float
    truncation: int

    @property
    def midpoint(self) -> float:
        return self.value + self.error_bound / 2


def _frobenius_fixed_counts(f: Sequence[int], primes: np.ndarray) -> np.ndarray:
    """For each prime ``p`` (``p > deg f``, ``p`` not dividing disc) return ``N_k``, k=1..n.

    ``N_k`` is the number of roots of ``f`` in ``F_{p^k}``; it equals the trace
    of the ``k``-th power of the Frobenius matrix on ``F_p[x]/(f)``, which
    is read modulo ``p`` and is exact because ``N_k <= n < p``.
    """
    n = len(f) - 1
    P = primes.astype(np.int64)
    m = P.shape[0]
    fl = np.array(f[:n], dtype=np.int64)

    def reduce_poly(prod: np.ndarray) -> np.ndarray:
        prod = prod % P[:, None]
        for k in range(prod.shape[1] - 1, n - 1, -1):
            c = prod[:, k].copy()
            prod[:, k - n : k] = (prod[:, k - n : k] - c[:, None] * fl[None, :]) % P[:, None]
            prod[:, k] = 0
        return prod[:, :n]

    def mulmod(A: np.ndarray, B: np.ndarray) -> np.ndarray:
        prod = np.zeros((m, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                prod[:, i + j] = (prod[:, i + j] + A[:, i] * B[:, j]) % P
        return reduce_poly(prod)

    def times_x(A: np.ndarray) -> np.ndarray:
        prod = np.zeros((m, n + 1), dtype=np.int64)
        prod[:, 1:] = A
        return reduce_poly(prod)

    R = np.zeros((m, n), dtype=np.int64)
    R[:, 0] = 1
    nbits = int(P.max()).bit_length()
    for b in range(nbits - 1, -1, -1):
        R = mulmod(R, R)
        mask = ((P >> b) & 1).astype(bool)
        if mask.any():
            R[mask] = times_x(R)[mask]
    # Frobenius matrix: column i is x^(i p) mod f
    cols = []
    cur = np.zeros((m, n), dtype=np.int64)
    cur[:, 0] = 1
    for _ in range(n):
        cols.append(cur)
        cur = mulmod(cur, R)
    Phi = np.stack(cols, axis=2)  # (m, n rows, n cols)
    counts = np.zeros((m, n), dtype=np.int64)
    power = Phi.copy()
    for k in range(n):
        tr = np.trace(power, axis1=1, axis2=2) % P
        counts[:, k] = tr
        if k + 1 < n:
            nxt = np.zeros_like(power)
            for t in range(n):
                nxt = (nxt + power[:, :, t : t + 1] * Phi[:, t : t + 1, :]) % P[:, None, None]
            power = nxt
    return counts


def _mobius(n: int) -> int:
    res, k, d = 1, n, 2
    while d * d <= k:
        if k % d == 0:
            k //= d
            if k % d == 0:
                return 0
            res = -res
        d += 1
    return -res if k > 1 else res


def residue_degree_patterns(f: Sequence[int], primes: np.ndarray) -> np.ndarray:
    """Counts ``r_d`` of degree-``d`` prime factors (column ``d-1``) per prime."""
    n = len(f) - 1
    N = _frobenius_fixed_counts(f, primes)
    r = np.zeros_like(N)
    for d in range(1, n + 1):
        acc = np.zeros(N.shape[0], dtype=np.int64)
        for j in range(1, d + 1):
            if d % j == 0:
                acc += _mobius(d // j) * N[:, j - 1]
        r[:, d - 1] = acc // d
    return r


def prime_ideal_degree_counts(K: NumberField, B: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(p, f, count)``: ``count`` primes of residue degree ``f`` above each ``p <= B``."""
    n = K.degree
    f = list(K.min_poly)
    primes = np.array(primes_up_to(B), dtype=np.int64)
    disc = abs(K.field_disc)
    special = np.array([p <= n or disc % int(p) == 0 for p in primes], dtype=bool)
    ps_out: list[np.ndarray] = []
    fs_out: list[np.ndarray] = []
    cs_out: list[np.ndarray] = []
    for p in primes[special]:
        for P in factor_prime(K, int(p)):
            ps_out.append(np.array([p]))
            fs_out.append(np.array([P.f]))
            cs_out.append(np.array([1]))
    generic = primes[~special]
    if n == 1:
        ps_out.append(generic)
        fs_out.append(np.ones_like(generic))
        cs_out.append(np.ones_like(generic))
    elif generic.size:
        chunk = 20000
        for s in range(0, generic.size, chunk):
            ps = generic[s : s + chunk]
            r = residue_degree_patterns(f, ps)
            for d in range(1, n + 1):
                mask = r[:, d - 1] > 0
                ps_out.append(ps[mask])
                fs_out.append(np.full(int(mask.sum()), d, dtype=np.int64))
                cs_out.append(r[mask, d - 1])
    if not ps_out:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(ps_out), np.concatenate(fs_out), np.concatenate(cs_out)


def dedekind_zeta2(K: NumberField, B: int = DEFAULT_ZETA_BOUND) -> ZetaValue:
    """``zeta_k(2)`` by the Euler product over ``p <= B`` with a rigorous tail bound."""
    if B < 2:
        raise ValueError("B must be at least 2")
    n = K.degree
    ps, fs, cs = prime_ideal_degree_counts(K, B)
    pf = ps.astype(float)
    logs = (cs * -np.log1p(-(pf ** (-2.0 * fs)))).tolist()
    total = math.fsum(logs)
    value = math.exp(total)
    # tail: prod over p > B is at most prod (1 - p^-2)^-n, and
    # sum_{p > B} p^-2 <= sum over odd j > B of j^-2 <= 1 / (2(B - 1))
    tail = n * (1.0 / (2.0 * (B - 1))) / (1.0 - 1.0 / B**2)
    err = value * math.expm1(tail) + value * 1e-13
    return ZetaValue(value, err, B)


@dataclass(frozen=True)
class AreaValue:
    """A real area with an absolute error bound."""

    value: float
    error: float

    @property
    def over_pi(self) -> float:
        return self.value / math.pi


def coarea(K: NumberField, ram_finite: Sequence[PrimeIdeal], zeta: ZetaValue) -> AreaValue:
    """``8 pi d^(3/2) zeta_k(2) prod(N(P) - 1) / (4 pi^2)^n``."""
    n = K.degree
    factor = 1
    for P in ram_finite:
        factor *= P.norm - 1
    scale = 8 * math.pi * abs(K.field_disc) ** 1.5 * factor / (4 * math.pi**2) ** n
    lo = scale * zeta.value
    hi = scale * (zeta.value + zeta.error_bound)
    mid = (lo + hi) / 2
    return AreaValue(mid, (hi - lo) / 2 + abs(mid) * 1e-13)


def recognize_pi_multiple(x: float, err: float, max_denominator: int = 100) -> Fraction | None:
    """The unique ``q = a/b`` with ``b <= max_denominator`` and ``|x - q pi| <= err``.

    Returns ``None`` when nothing fits and raises
    :class:`AmbiguousRecognition` when more than one reduced fraction fits.
    """
    lo = (x - err) / math.pi
    hi = (x + err) / math.pi
    # best rational approximation first (continued fractions), then check uniqueness
    cands: set[Fraction] = set()
    for b in range(1, max_denominator + 1):
        a_lo = math.ceil(lo * b - 1e-12)
        a_hi = math.floor(hi * b + 1e-12)
        for a in range(a_lo, a_hi + 1):
            q = Fraction(a, b)
            if abs(x - float(q) * math.pi) <= err * (1 + 1e-12):
                cands.add(q)
    if not cands:
        return None
    if len(cands) > 1:
        best = Fraction(x / math.pi).limit_denominator(max_denominator)
        raise AmbiguousRecognition(
            f"{len(cands)} rationals fit {x} +- {err}",
            details={"candidates": sorted(cands)[:10], "best": best},
        )
    return cands.pop()


# ---------------------------------------------------------------------------
# torsion


def torsion_count(
    h_minus: int,
    unit_index: int,
    behaviors: Sequence[SplittingBehavior],
    *,
    field_disc: int | None = None,
    m: int | None = None,
) -> int:
    """Number of conjugacy classes of maximal cyclic subgroups of order ``m``.

    ``a_m = (h^- / unit_index) * prod(1 - artin(P))`` over the ramified
    finite primes.  When ``field_disc`` and ``m`` are given, the relative
    integral basis hypothesis (``2`` resp. ``3`` not dividing ``d_k``) is
    checked first.
    """
    if field_disc is not None and m is not None:
        if m == 2 and field_disc % 2 == 0:
            raise BasisHypothesisFails("2 divides d_k; the count formula needs a relative integral basis")
        if m == 3 and field_disc % 3 == 0:
            raise BasisHypothesisFails("3 divides d_k; the count formula needs a relative integral basis")
    val = Fraction(h_minus, unit_index)
    for b in behaviors:
        val *= 1 - b.artin
    if val.denominator != 1:
        raise ValueError(f"non-integral torsion count {val}")
    return int(val)


def has_order_m_elements(K: NumberField, ram_finite: Sequence[PrimeIdeal], m: int) -> bool:
    """Whether the norm-one group of a maximal order has elements of order ``m``."""
    if m not in admissible_periods(K):
        return False
    return all(splitting_in_cm_extension(K, P, m) is not SplittingBehavior.SPLIT for P in ram_finite)


# ---------------------------------------------------------------------------
# degree elimination


ODLYZKO_A = 2.439e-4
ODLYZKO_B = 29.099
MIN_DISC_DEGREE7 = 20_134_393
MIN_DISC_DEGREE8 = 282_300_416


@dataclass
class DegreeBoundReport:
    max_degree_odlyzko: int
    degree7_value: float
    degree8_value: float
    four_pi: float
    degree6_ceiling: float
    degree6_floor: int
    degree6_strict_bound: int  # smallest integer exceeding the ceiling
    lines: list[str] = field(default_factory=list)

    def text(self) -> str:
        return "\n".join(self.lines)


def _area_lower(d: float, n: int) -> float:
    return 8 * math.pi * d**1.5 / (4 * math.pi**2) ** n


def degree_bound_report() -> DegreeBoundReport:
    four_pi = 4 * math.pi
    max_n = 0
    for n in range(1, 40):
        d_min = ODLYZKO_A * ODLYZKO_B**n
        if _area_lower(d_min, n) <= four_pi:
            max_n = n
    v7 = _area_lower(MIN_DISC_DEGREE7, 7)
    v8 = _area_lower(MIN_DISC_DEGREE8, 8)
    ceiling = (3 * (4 * math.pi**2) ** 6 / 8) ** (2.0 / 3.0)
    lines = [
        f"discriminant lower bound {ODLYZKO_A} * {ODLYZKO_B}^n admits degree <= {max_n}",
        f"degree 7: 8 pi {MIN_DISC_DEGREE7}^(3/2) / (4 pi^2)^7 = {v7:.4f} > 4 pi = {four_pi:.4f}",
        f"degree 8: 8 pi {MIN_DISC_DEGREE8}^(3/2) / (4 pi^2)^8 = {v8:.4f} > 4 pi = {four_pi:.4f}",
        f"degree 6: d_k <= (3 (4 pi^2)^6 / 8)^(2/3) = {ceiling:.3f} < {math.floor(ceiling) + 1}",
    ]
    return DegreeBoundReport(max_n, v7, v8, four_pi, ceiling, math.floor(ceiling), math.floor(ceiling) + 1, lines)
