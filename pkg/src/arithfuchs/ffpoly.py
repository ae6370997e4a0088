"""Polynomials over prime fields F_p.

Coefficient lists are ascending, entries reduced to ``0 <= c < p``, and
trimmed so the leading coefficient is nonzero.  Factorization follows the
classical pipeline: squarefree decomposition, distinct-degree splitting,
then Cantor-Zassenhaus equal-degree splitting driven by a seeded RNG so
results are reproducible.
"""

from __future__ import annotations

import random
from typing import Sequence

FPoly = list


def norm(poly: Sequence[int], p: int) -> FPoly:
    out = [c % p for c in poly]
    while out and out[-1] == 0:
        out.pop()
    return out


def add(a: Sequence[int], b: Sequence[int], p: int) -> FPoly:
    n = max(len(a), len(b))
    return norm([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], p)


def sub(a: Sequence[int], b: Sequence[int], p: int) -> FPoly:
    n = max(len(a), len(b))
    return norm([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)], p)


def mul(a: Sequence[int], b: Sequence[int], p: int) -> FPoly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return norm(out, p)


def divmod_(a: Sequence[int], b: Sequence[int], p: int) -> tuple[FPoly, FPoly]:
    b = norm(b, p)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    r = norm(a, p)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(r) - 1 < db:
        return [], r
    q = [0] * (len(r) - db)
    for k in range(len(r) - 1 - db, -1, -1):
        c = r[k + db] * inv % p
        q[k] = c
        if c:
            for j in range(db + 1):
                r[k + j] = (r[k + j] - c * b[j]) % p
    return norm(q, p), norm(r[:db], p)


def mod(a: Sequence[int], b: Sequence[int], p: int) -> FPoly:
    return divmod_(a, b, p)[1]


def monic(a: Sequence[int], p: int) -> FPoly:
    a = norm(a, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def gcd(a: Sequence[int], b: Sequence[int], p: int) -> FPoly:
    a, b = norm(a, p), norm(b, p)
    while b:
        a, b = b, mod(a, b, p)
    return monic(a, p)


def xgcd(a: Sequence[int], b: Sequence[int], p: int) -> tuple[FPoly, FPoly, FPoly]:
    """Return ``(g, s, t)`` with ``s*a + t*b = g`` and ``g`` monic."""
    r0, r1 = norm(a, p), norm(b, p)
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1, p), p)
        t0, t1 = t1, sub(t0, mul(q, t1, p), p)
    if not r0:
        return [], s0, t0
    inv = pow(r0[-1], -1, p)
    return [c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0]


def derivative(a: Sequence[int], p: int) -> FPoly:
    return norm([i * a[i] for i in range(1, len(a))], p)


def powmod(base: Sequence[int], e: int, modulus: Sequence[int], p: int) -> FPoly:
    result: FPoly = [1]
    b = mod(base, modulus, p)
    while e:
        if e & 1:
            result = mod(mul(result, b, p), modulus, p)
        b = mod(mul(b, b, p), modulus, p)
        e >>= 1
    return mod(result, modulus, p)


def degree(a: Sequence[int]) -> int:
    return len(a) - 1


def _pth_root(a: Sequence[int], p: int) -> FPoly:
    # a(x) = b(x^p) over F_p; coefficients are fixed by Frobenius on F_p
    return norm([a[i] for i in range(0, len(a), p)], p)


def squarefree_decomposition(a: Sequence[int], p: int) -> list[tuple[FPoly, int]]:
    """Pairs ``(g, k)`` with ``a = lc * prod g^k`` and the ``g`` squarefree, coprime."""
    a = monic(a, p)
    if len(a) <= 1:
        return []
    out: list[tuple[FPoly, int]] = []
    da = derivative(a, p)
    if not da:
        for g, k in squarefree_decomposition(_pth_root(a, p), p):
            out.append((g, k * p))
        return out
    c = gcd(a, da, p)
    w = divmod_(a, c, p)[0]
    i = 1
    while len(w) > 1:
        y = gcd(w, c, p)
        z = divmod_(w, y, p)[0]
        if len(z) > 1:
            out.append((monic(z, p), i))
        i += 1
        w = y
        c = divmod_(c, y, p)[0]
    if len(c) > 1:
        for g, k in squarefree_decomposition(_pth_root(c, p), p):
            out.append((g, k * p))
    return out


def distinct_degree(a: Sequence[int], p: int) -> list[tuple[FPoly, int]]:
    """Split a squarefree monic polynomial into products of equal-degree factors."""
    out = []
    f = monic(a, p)
    h = [0, 1]
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, f, p)
        g = gcd(f, sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            f = divmod_(f, g, p)[0]
            h = mod(h, f, p)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def equal_degree(a: Sequence[int], d: int, p: int, rng: random.Random) -> list[FPoly]:
    """Cantor-Zassenhaus splitting of a product of distinct degree-``d`` factors."""
    f = monic(a, p)
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        r = norm([rng.randrange(p) for _ in range(n)], p)
        if len(r) <= 1:
            continue
        if p == 2:
            # absolute trace map r + r^2 + ... + r^(2^(d-1))
            t, acc = r, r
            for _ in range(d - 1):
                t = mod(mul(t, t, p), f, p)
                acc = add(acc, t, p)
            g = gcd(f, acc, p)
        else:
            e = (p**d - 1) // 2
            g = gcd(f, sub(powmod(r, e, f, p), [1], p), p)
        if 1 < len(g) < len(f):
            return equal_degree(g, d, p, rng) + equal_degree(divmod_(f, g, p)[0], d, p, rng)


def factor(a: Sequence[int], p: int, seed: int = 0) -> list[tuple[FPoly, int]]:
    """Monic irreducible factors with multiplicity, sorted by (degree, coefficients)."""
    rng = random.Random(seed)
    out = []
    for g, k in squarefree_decomposition(a, p):
        for h, d in distinct_degree(g, p):
            for irr in equal_degree(h, d, p, rng):
                out.append((irr, k))
    out.sort(key=lambda t: (len(t[0]), t[0][::-1], t[1]))
    return out


def is_irreducible(a: Sequence[int], p: int) -> bool:
    fac = factor(a, p)
    return len(fac) == 1 and fac[0][1] == 1
