"""Dense univariate polynomials over the rationals.

Polynomials are lists of coefficients in ascending degree order, so
``[1, -2, 0, 1]`` is ``x^3 - 2x + 1``.  Coefficients may be ``int`` or
``Fraction``; results are trimmed so the last entry is nonzero (the zero
polynomial is ``[]``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = list


def trim(p: Sequence) -> Poly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p: Sequence, c) -> Poly:
    return trim([c * a for a in p])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def divmod_poly(p: Sequence, q: Sequence) -> tuple[Poly, Poly]:
    """Euclidean division over Q; ``q`` must be nonzero."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    dq = len(q) - 1
    lc = Fraction(q[-1])
    if len(r) - 1 < dq:
        return [], trim(r)
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lc
        quot[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def derivative(p: Sequence) -> Poly:
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose(p: Sequence, q: Sequence) -> Poly:
    """Return ``p(q(x))``."""
    acc: Poly = []
    for c in reversed(p):
        acc = add(mul(acc, q), [c])
    return acc


def resultant(p: Sequence, q: Sequence) -> Fraction:
    """Resultant over Q via the Euclidean remainder sequence."""
    p, q = trim(p), trim(q)
    if not p or not q:
        return Fraction(0)
    m, k = len(p) - 1, len(q) - 1
    if k == 0:
        return Fraction(q[0]) ** m
    if m == 0:
        return Fraction(p[0]) ** k
    _, r = divmod_poly(p, q)
    if not r:
        return Fraction(0)
    dr = len(r) - 1
    sign = -1 if (m * k) % 2 else 1
    return sign * Fraction(q[-1]) ** (m - dr) * resultant(q, r)


def discriminant(p: Sequence) -> Fraction:
    p = trim(p)
    n = len(p) - 1
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p, derivative(p)) / Fraction(p[-1])


def gcd(p: Sequence, q: Sequence) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    if not a:
        return []
    lc = Fraction(a[-1])
    return [Fraction(c) / lc for c in a]


def sturm_sequence(p: Sequence) -> list[Poly]:
    seq = [[Fraction(c) for c in trim(p)], [Fraction(c) for c in derivative(p)]]
    while True:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            return seq
        seq.append(scale(r, -1))


def _sign_changes(values) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_count(seq: list[Poly], lo, hi) -> int:
    """Number of distinct real roots in the half open interval ``(lo, hi]``."""
    return _sign_changes([evaluate(s, lo) for s in seq]) - _sign_changes(
        [evaluate(s, hi) for s in seq]
    )


def cauchy_bound(p: Sequence) -> Fraction:
    p = trim(p)
    lc = Fraction(p[-1])
    return 1 + max(abs(Fraction(c) / lc) for c in p[:-1]) if len(p) > 1 else Fraction(1)


def isolate_real_roots(p: Sequence) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals ``(lo, hi)`` each holding exactly one real root.

    ``p`` must be squarefree.  Each interval satisfies ``p(lo) * p(hi) < 0``
    so bisection refinement is always available.  Intervals are returned in
    ascending order.
    """
    seq = sturm_sequence(p)
    bound = cauchy_bound(p)
    # Widen slightly so the endpoints are never roots.
    lo0, hi0 = -bound - 1, bound + 1
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(Fraction(lo0), Fraction(hi0))]
    while stack:
        lo, hi = stack.pop()
        count = sturm_count(seq, lo, hi)
        if count == 0:
            continue
        if count == 1 and evaluate(p, lo) != 0 and evaluate(p, hi) != 0:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if evaluate(p, mid) == 0:
            # nudge the split point off an exact root
            mid = mid + (hi - lo) / 7
        stack.append((lo, mid))
        stack.append((mid, hi))
    out.sort()
    return out


def refine_root(p: Sequence, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect a sign-change interval until its width is at most ``width``."""
    flo = evaluate(p, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = evaluate(p, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi
