"""Integer lattices: Hermite normal form, membership, and congruence systems."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[int]]


def hnf(gens: Sequence[Sequence[int]], d: int) -> Matrix:
    """Upper triangular Hermite normal form (``d`` rows) of a full-rank row lattice.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``, so two lattices are equal iff their HNFs are equal.
    """
    rows = [list(r) for r in gens if any(r)]
    out: Matrix = []
    for col in range(d):
        pivots = [r for r in rows if r[col] != 0]
        others = [r for r in rows if r[col] == 0]
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[col]))
            base = pivots[0]
            new = [base]
            for r in pivots[1:]:
                q = r[col] // base[col]
                r2 = [x - q * y for x, y in zip(r, base)]
                if r2[col] != 0:
                    new.append(r2)
                elif any(r2):
                    others.append(r2)
            pivots = new
        if not pivots:
            raise ValueError("lattice not of full rank")
        piv = pivots[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        rows = others
    for i in range(d):
        for j in range(i):
            q = out[j][i] // out[i][i]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[i])]
    return out


def reduce_vector(H: Matrix, v: Sequence[int]) -> list[int]:
    """Reduce ``v`` modulo the HNF lattice ``H``; the result is zero iff ``v`` lies in it."""
    w = list(v)
    for i, row in enumerate(H):
        q = w[i] // row[i]
        if q:
            w = [x - q * y for x, y in zip(w, row)]
    return w


def contains(H: Matrix, v: Sequence[int]) -> bool:
    return not any(reduce_vector(H, v))


def determinant(H: Matrix) -> int:
    out = 1
    for i, row in enumerate(H):
        out *= row[i]
    return out


def scale_to_integers(vectors: Sequence[Sequence[Fraction]]) -> tuple[int, Matrix]:
    """Common denominator ``D`` and the integer matrix ``D * vectors``."""
    D = 1
    for v in vectors:
        for x in v:
            D = lcm(D, Fraction(x).denominator)
    return D, [[int(Fraction(x) * D) for x in v] for v in vectors]


@dataclass(frozen=True)
class Congruence:
    """``sum(coeffs[i] * w[i]) == 0 (mod modulus)``."""

    coeffs: tuple[int, ...]
    modulus: int

    def holds(self, w: Sequence[int]) -> bool:
        return sum(c * x for c, x in zip(self.coeffs, w)) % self.modulus == 0

    def render(self, names: Sequence[str]) -> str:
        terms = []
        for c, name in zip(self.coeffs, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else str(abs(c))
            terms.append(f"{sign} {mag}{name}")
        text = " ".join(terms).lstrip("+ ").strip()
        if text.startswith("- "):
            text = "-" + text[2:]
        return f"{text} = 0 mod {self.modulus}"


def congruences_from_hnf(H: Matrix) -> list[Congruence]:
    """Congruences cutting out the lattice ``H`` inside ``Z^d``.

    ``w`` lies in the lattice iff ``w H^{-1}`` is integral; each column of
    ``H^{-1}`` with a nontrivial denominator contributes one congruence.
    """
    d = len(H)
    inv = _upper_inverse(H)
    out: list[Congruence] = []
    for j in range(d):
        col = [inv[i][j] for i in range(d)]
        m = 1
        for x in col:
            m = lcm(m, x.denominator)
        if m == 1:
            continue
        coeffs = tuple(int(x * m) % m for x in col)
        g = m
        for c in coeffs:
            g = gcd(g, c)
        out.append(Congruence(tuple(c // g for c in coeffs), m // g))
    return out


def _upper_inverse(H: Matrix) -> list[list[Fraction]]:
    d = len(H)
    inv = [[Fraction(0)] * d for _ in range(d)]
    for j in range(d):
        # solve H x = e_j by back substitution (upper triangular)
        x = [Fraction(0)] * d
        for i in range(d - 1, -1, -1):
            s = Fraction(1 if i == j else 0) - sum(H[i][k] * x[k] for k in range(i + 1, d))
            x[i] = s / H[i][i]
        for i in range(d):
            inv[i][j] = x[i]
    return inv


def lattice_from_congruences(congruences: Sequence[Congruence], d: int) -> Matrix:
    """HNF of ``{w in Z^d : all congruences hold}``.

    Build the lattice of pairs ``(w, (M/m_k) c_k.w + M t)`` with ``M`` the
    lcm of the moduli; its vectors with vanishing tail project onto the
    solution lattice.
    """
    if not congruences:
        return [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    K = len(congruences)
    M = 1
    for c in congruences:
        M = lcm(M, c.modulus)
    gens = []
    for i in range(d):
        tail = [(M // c.modulus) * c.coeffs[i] for c in congruences]
        gens.append(tail + [1 if i == j else 0 for j in range(d)])
    for k in range(K):
        gens.append([M if k == j else 0 for j in range(K)] + [0] * d)
    H = hnf(gens, K + d)
    return hnf([row[K:] for row in H[K:]], d)


_TERM = re.compile(r"([+-]?)(\d*)([A-Za-z]\w*)")


def parse_congruence(text: str, modulus: int, names: Sequence[str]) -> Congruence:
    """Parse a linear form such as ``"4x0 - x1 + 3v2"`` into a congruence modulo ``modulus``."""
    coeffs = [0] * len(names)
    compact = text.replace(" ", "")
    pos = 0
    for m in _TERM.finditer(compact):
        if m.start() != pos:
            raise ValueError(f"cannot parse linear form {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeffs[list(names).index(m.group(3))] += sign * int(m.group(2) or 1)
    if pos != len(compact):
        raise ValueError(f"cannot parse linear form {text!r}")
    return Congruence(tuple(coeffs), modulus)
