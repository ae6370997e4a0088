"""Ford fundamental domains for unit groups of maximal orders.

The norm-one group of an order is embedded in ``SL_2(R)`` at the unique
split real place and conjugated into the disk model.  All group theory is
exact quaternion arithmetic; floating point is only used to locate
isometric circles, vertices and angles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import lattice
from .errors import EmptyEnumeration, RefineEpsilon, UnclosedCycle, WrongPlace, AreaMismatch, NotSupportedIndex
from .numfield import FieldElement
from .orders import QuaternionOrder
from .quatalg import QuaternionAlgebra, QuaternionElement, ramification_set
from .volume import Signature, rh_area

VERTEX_TOL = 1e-9


# ---------------------------------------------------------------------------
# embedding


@dataclass(frozen=True)
class Embedding:
    """``q -> [[x + y sqrt(a), b1 (u + v sqrt(a))], [b2 (u - v sqrt(a)), x - y sqrt(a)]]`` at ``place``."""

    algebra: QuaternionAlgebra
    place: int
    b1: float
    b2: float

    @property
    def sqrt_a(self) -> float:
        return math.sqrt(self.algebra.a.embeddings_float()[self.place])

    def matrix(self, q: QuaternionElement) -> np.ndarray:
        s = self.sqrt_a
        x, y, u, v = (p.embeddings_float()[self.place] for p in q.parts)
        return np.array([[x + y * s, self.b1 * (u + v * s)], [self.b2 * (u - v * s), x - y * s]])


def split_place(A: QuaternionAlgebra) -> int:
    places = ramification_set(A).unramified_real_places(A.base.degree)
    if len(places) != 1:
        raise WrongPlace(f"algebra is split at {len(places)} real places, expected exactly one")
    return places[0]


def default_b_split(A: QuaternionAlgebra, place: int) -> tuple[float, float]:
    """``(b1, b2)`` with ``b1 b2 = b`` at the place: ``(2, -1/2)`` for ``b = -1``, else a symmetric split."""
    b = A.b.embeddings_float()[place]
    if A.b == -1:
        return 2.0, -0.5
    s = math.sqrt(abs(b))
    return s, b / s


def matrix_embedding(q: QuaternionElement, b1: float, b2: float, place: int) -> np.ndarray:
    A = q.algebra
    if A.a.embeddings_float()[place] <= 0:
        raise WrongPlace(f"a is not positive at place {place}")
    bv = A.b.embeddings_float()[place]
    if abs(b1 * b2 - bv) > 1e-9 * max(1.0, abs(bv)):
        raise ValueError("b1 * b2 must equal b at the place")
    return Embedding(A, place, b1, b2).matrix(q)


def isometric_radius(g: np.ndarray) -> float | None:
    """Radius ``2 / sqrt(a^2 + b^2 + c^2 + d^2 - 2)`` of the disk-model isometric circle."""
    (a, b), (c, d) = g
    t = (b + c) ** 2 + (a - d) ** 2
    if t < 1e-24:
        return None
    return 2.0 / math.sqrt(t)


def disk_coefficients(g: np.ndarray) -> tuple[complex, complex]:
    """``(A, B)`` with the disk conjugate acting as ``z -> (A z + B) / (conj(B) z + conj(A))``."""
    (a, b), (c, d) = g
    return complex(a + d, b - c) / 2, complex(b + c, a - d) / 2


def disk_apply(AB: tuple[complex, complex], z: complex) -> complex:
    A, B = AB
    return (A * z + B) / (B.conjugate() * z + A.conjugate())


# ---------------------------------------------------------------------------
# group elements


def canonical_sign(q: QuaternionElement) -> QuaternionElement:
    """The representative of ``{q, -q}`` whose first nonzero coordinate is positive."""
    for c in q.coordinates():
        if c:
            return q if c > 0 else -q
    return q


@dataclass(eq=False)
class GroupElement:
    quat: QuaternionElement
    matrix: np.ndarray

    @property
    def disk(self) -> tuple[complex, complex]:
        return disk_coefficients(self.matrix)

    @property
    def radius(self) -> float | None:
        return isometric_radius(self.matrix)

    def circle(self) -> tuple[complex, float] | None:
        A, B = self.disk
        if abs(B) < 1e-12:
            return None
        return -A.conjugate() / B.conjugate(), 1.0 / abs(B)

    def key(self) -> tuple:
        return tuple(canonical_sign(self.quat).coordinates())


# ---------------------------------------------------------------------------
# enumeration


def _bounded_points(G: np.ndarray, offset: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Integer vectors ``c`` with ``lo <= offset + c G <= hi`` (componentwise).

    Enumerates the ellipsoid circumscribing the box by Fincke-Pohst and
    filters exactly against the box.
    """
    n = G.shape[0]
    mid = (lo + hi) / 2
    half = np.maximum((hi - lo) / 2, 1e-6)
    Gs = G / half  # rows scaled coordinates
    center = np.linalg.solve(Gs.T, (mid - offset) / half)
    bound = float(n) * (1 + 1e-9)
    # Gs Gs^T = L L^T with L lower triangular; QR is stable for ill-conditioned boxes
    _, Rf = np.linalg.qr(Gs.T)
    L = Rf.T * np.sign(np.diag(Rf))
    # quadratic form (c - center) gram (c - center)^T = |(c - center) L|^2
    # enumerate last coordinate first: use upper triangular R = L^T so that
    # |(c - center) L|^2 = sum_k (sum_{i >= k} (c_i - center_i) L_ik)^2
    out: list[np.ndarray] = []
    c = np.zeros(n)

    def rec(k: int, partial: float) -> None:
        # contribution of coordinate k: (sum_{i >= k} (c_i - center_i) L[i, k])^2
        tail = sum((c[i] - center[i]) * L[i, k] for i in range(k + 1, n))
        lkk = L[k, k]
        rem = bound - partial
        if rem < 0:
            return
        r = math.sqrt(rem) / lkk
        mid_k = center[k] - tail / lkk
        for ck in range(math.ceil(mid_k - r - 1e-12), math.floor(mid_k + r + 1e-12) + 1):
            c[k] = ck
            val = ((ck - center[k]) * lkk + tail) ** 2
            if k == 0:
                out.append(c.copy())
            else:
                rec(k - 1, partial + val)

    rec(n - 1, 0.0)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    pts = np.array(out)
    vals = offset + pts @ G
    tol = 1e-9 * (1 + np.abs(vals))
    keep = np.all((vals >= lo - tol) & (vals <= hi + tol), axis=1)
    return np.rint(pts[keep]).astype(np.int64)


@dataclass
class EnumerationStats:
    v_points: int = 0
    vu_points: int = 0
    vuy_points: int = 0
    candidates: int = 0


def _interval_sqrt(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(x, 0.0))


def enumerate_bounded_elements(
    O: QuaternionOrder,
    eps: float,
    place: int | None = None,
    b_split: tuple[float, float] | None = None,
    stats: EnumerationStats | None = None,
) -> list[GroupElement]:
    """All norm-one elements of ``O`` with isometric radius greater than ``eps``.

    One representative per ``{g, -g}``; elements fixing the origin are
    included.  Coordinates are enumerated block by block (``v``, then
    ``u``, then ``y``) inside per-place boxes coming from the isometric
    radius bound at the split place and from positivity of the norm form at
    the ramified places; ``x`` is then solved from the norm equation.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    A = O.algebra
    K = A.base
    n = K.degree
    if place is None:
        place = split_place(A)
    if b_split is None:
        b_split = default_b_split(A, place)
    b1, b2 = b_split
    emb = Embedding(A, place, b1, b2)
    av = np.array(A.a.embeddings_float())
    bv = np.array(A.b.embeddings_float())
    if av[place] <= 0:
        raise WrongPlace(f"a is not positive at place {place}")
    others = [i for i in range(n) if i != place]
    if any(not (av[i] < 0 and bv[i] < 0) for i in others):
        raise WrongPlace("the order's Hilbert symbol must be negative definite at the ramified places")
    M = 2.0 + 4.0 / eps**2
    a_s, b_s = av[place], bv[place]
    alpha = b1 * b1 + b2 * b2
    beta = (b1 * b1 - b2 * b2) * math.sqrt(a_s)
    gamma = a_s * alpha
    lin_u, lin_v = b1 - b2, (b1 + b2) * math.sqrt(a_s)
    slack = 1e-9

    # lattice in block order (v, u, y, x)
    D = O.denominator
    perm = [3 * n + k for k in range(n)] + [2 * n + k for k in range(n)] + [n + k for k in range(n)] + list(range(n))
    rows = [[row[p] for p in perm] for row in O.hnf]
    H = np.array(lattice.hnf(rows, 4 * n), dtype=object)
    Hf = H.astype(float)
    V = np.array(K.vandermonde, dtype=float)  # V[i, j] = root_i ** j
    blocks = [Hf[k * n : (k + 1) * n] for k in range(4)]  # rows whose pivots lie in block k
    # place values of block j coordinates of row set k
    def place_map(k: int, j: int) -> np.ndarray:
        return blocks[k][:, j * n : (j + 1) * n] @ V.T / D

    G = [[place_map(k, j) for j in range(4)] for k in range(4)]
    Vinv_x = None
    st = stats if stats is not None else EnumerationStats()

    big = 1e300
    results: dict[tuple, GroupElement] = {}

    # v block
    vmax_s = math.sqrt(M * alpha / (alpha * gamma - beta * beta))
    lo_v = np.empty(n)
    hi_v = np.empty(n)
    for i in range(n):
        r = vmax_s if i == place else math.sqrt(1.0 / abs(av[i] * bv[i]))
        lo_v[i], hi_v[i] = -r - slack, r + slack
    zero = np.zeros(n)
    cv_all = _bounded_points(G[0][0], zero, lo_v, hi_v)
    st.v_points += len(cv_all)
    Gx_inv = np.linalg.inv(G[3][3])
    for cv in cv_all:
        off = [cv @ G[0][j] for j in range(4)]
        Vp = off[0]
        # u block
        lo_u = np.empty(n)
        hi_u = np.empty(n)
        ok = True
        for i in range(n):
            if i == place:
                vv = Vp[i]
                disc = beta * beta * vv * vv - alpha * (gamma * vv * vv - M)
                if disc < 0:
                    ok = False
                    break
                s = math.sqrt(disc)
                l, h = (-beta * vv - s) / alpha, (-beta * vv + s) / alpha
                if lin_u != 0:
                    w = math.sqrt(max(M - 2, 0.0))
                    l2, h2 = sorted(((-w - lin_v * vv) / lin_u, (w - lin_v * vv) / lin_u))
                    l, h = max(l, l2), min(h, h2)
            else:
                rem = 1.0 - abs(av[i] * bv[i]) * Vp[i] ** 2
                if rem < -slack:
                    ok = False
                    break
                w = math.sqrt(max(rem, 0.0) / abs(bv[i]))
                l, h = -w, w
            if h < l - slack:
                ok = False
                break
            lo_u[i], hi_u[i] = l - slack, h + slack
        if not ok:
            continue
        cu_all = _bounded_points(G[1][1], off[1], lo_u, hi_u)
        st.vu_points += len(cu_all)
        for cu in cu_all:
            off2 = [off[j] + cu @ G[1][j] for j in range(4)]
            Up = off2[1]
            lo_y = np.empty(n)
            hi_y = np.empty(n)
            ok = True
            for i in range(n):
                if i == place:
                    P = alpha * Up[i] ** 2 + 2 * beta * Up[i] * Vp[i] + gamma * Vp[i] ** 2
                    Lq = (lin_u * Up[i] + lin_v * Vp[i]) ** 2
                    rem = min((M - P) / (2 * a_s), (M - 2 - Lq) / (4 * a_s))
                    den = 1.0
                else:
                    rem = (1.0 - abs(bv[i]) * Up[i] ** 2 - abs(av[i] * bv[i]) * Vp[i] ** 2) / abs(av[i])
                if rem < -slack:
                    ok = False
                    break
                w = math.sqrt(max(rem, 0.0))
                lo_y[i], hi_y[i] = -w - slack, w + slack
            if not ok:
                continue
            cy_all = _bounded_points(G[2][2], off2[2], lo_y, hi_y)
            st.vuy_points += len(cy_all)
            for cy in cy_all:
                off3 = [off2[j] + cy @ G[2][j] for j in range(4)]
                Yp = off3[2]
                X2 = 1.0 + av * Yp**2 + bv * Up**2 - av * bv * Vp**2
                if np.any(X2 < -1e-7):
                    continue
                Xabs = np.sqrt(np.maximum(X2, 0.0))
                seen = set()
                for signs in itertools.product((1.0, -1.0), repeat=n):
                    X = Xabs * np.array(signs)
                    cx = (X - off3[3]) @ Gx_inv
                    cr = np.rint(cx)
                    if np.max(np.abs(cx - cr)) > 1e-5:
                        continue
                    key = tuple(int(t) for t in cr)
                    if key in seen:
                        continue
                    seen.add(key)
                    st.candidates += 1
                    coeffs = list(cv) + list(cu) + list(cy) + list(key)
                    g = _element_from_coeffs(O, H, perm, coeffs)
                    if g.norm() != 1:
                        continue
                    g = canonical_sign(g)
                    k = tuple(g.coordinates())
                    if k in results:
                        continue
                    m = emb.matrix(g)
                    r = isometric_radius(m)
                    if r is not None and r <= eps:
                        continue
                    results[k] = GroupElement(g, m)
    out = sorted(results.values(), key=lambda e: (-(e.radius or math.inf), e.key()))
    if len(out) <= 1:
        raise EmptyEnumeration("only the identity was found; decrease eps")
    return out


def _element_from_coeffs(O: QuaternionOrder, H, perm: list[int], coeffs: Sequence[int]) -> QuaternionElement:
    d = len(perm)
    w_perm = [sum(int(c) * H[r][col] for r, c in enumerate(coeffs) if c) for col in range(d)]
    w = [0] * d
    for pos, col in enumerate(perm):
        w[col] = w_perm[pos]
    A = O.algebra
    K = A.base
    n = K.degree
    D = O.denominator
    return QuaternionElement(A, *(K([Fraction(x, D) for x in w[k * n : (k + 1) * n]]) for k in range(4)))


# ---------------------------------------------------------------------------
# the domain


def klein_to_disk(k: complex) -> complex:
    r2 = abs(k) ** 2
    return k / (1 + math.sqrt(max(1 - r2, 0.0)))


def disk_to_klein(p: complex) -> complex:
    return 2 * p / (1 + abs(p) ** 2)


@dataclass
class Side:
    """A boundary side of the domain on the isometric circle of ``element``."""

    element: int  # index into FordDomain.elements
    start: complex  # disk model, counterclockwise orientation
    end: complex
    partner: int = -1  # index of the paired side
    pairing: int = -1  # index of the element mapping this side onto its partner


@dataclass
class Cycle:
    vertices: list[int]  # indices of sides whose start vertex lies in the cycle
    word: list[int]  # side indices s1, s2, ... with transformation T_{s_k} ... T_{s_1}
    angle: float
    order: int  # 1 for accidental cycles


@dataclass
class FordDomain:
    elements: list[GroupElement]
    sides: list[Side]
    angles: list[float]  # interior angle at the start vertex of each side
    eps: float
    embedding: Embedding
    cycles: list[Cycle] = field(default_factory=list)

    @property
    def vertices(self) -> list[complex]:
        return [s.start for s in self.sides]

    @property
    def area(self) -> float:
        s = len(self.sides)
        return (s - 2) * math.pi - sum(self.angles)

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        if abs(z) >= 1:
            return False
        for s in self.sides:
            A, B = self.elements[s.element].disk
            if abs(B.conjugate() * z + A.conjugate()) < 1 - tol:
                return False
        return True


def _clip(poly: list[tuple[complex, int]], c: complex, label: int) -> list[tuple[complex, int]]:
    """Sutherland-Hodgman clip of a convex Klein-model polygon by ``Re(K conj(c)) <= 1``.

    ``poly`` lists (vertex, label of the edge leaving the vertex).
    """
    def val(k: complex) -> float:
        return (k * c.conjugate()).real - 1.0

    out: list[tuple[complex, int]] = []
    m = len(poly)
    for idx in range(m):
        p, lab = poly[idx]
        q, _ = poly[(idx + 1) % m]
        fp, fq = val(p), val(q)
        if fp <= 0:
            out.append((p, lab))
            if fq > 0:
                t = fp / (fp - fq)
                out.append((p + t * (q - p), label))
        elif fq <= 0:
            t = fp / (fp - fq)
            out.append((p + t * (q - p), lab))
    return out


def closure_radius(eps: float, sharp: bool = True) -> float:
    """Radius of a disk about 0 that no isometric circle of radius at most ``eps`` enters.

    A circle orthogonal to the unit circle with radius ``r`` comes within
    ``sqrt(1 + r^2) - r`` of the origin; ``sharp=False`` uses the cruder ``1 - eps``.
    """
    return math.sqrt(1 + eps * eps) - eps if sharp else 1 - eps


def build_ford_domain(
    elements: Sequence[GroupElement], eps: float, embedding: Embedding | None = None, sharp: bool = True
) -> FordDomain:
    """Intersection of the unit disk with the exteriors of all isometric circles.

    Raises ``RefineEpsilon`` unless the domain closes up inside the disk of
    radius ``closure_radius(eps)``, which certifies that circles of radius at
    most ``eps`` cannot cut it further.
    """
    els: list[GroupElement] = []
    seen: set[tuple] = set()
    for e in elements:
        for g in (e.quat, e.quat.conj()):
            k = tuple(canonical_sign(g).coordinates())
            if k in seen:
                continue
            seen.add(k)
            m = e.matrix if g is e.quat else np.array([[e.matrix[1, 1], -e.matrix[0, 1]], [-e.matrix[1, 0], e.matrix[0, 0]]])
            els.append(GroupElement(g, m))
    circles = []
    for idx, e in enumerate(els):
        c = e.circle()
        if c is None:
            if not e.quat.is_scalar():
                raise RefineEpsilon("a nontrivial element fixes the origin; change the embedding", {"element": e.quat})
            continue
        circles.append((c[1], idx, c[0]))
    circles.sort(key=lambda t: -t[0])
    R = 4.0
    poly: list[tuple[complex, int]] = [(complex(R, R), -1), (complex(-R, R), -1), (complex(-R, -R), -1), (complex(R, -R), -1)]
    for _, idx, center in circles:
        poly = _clip(poly, center, idx)
        if not poly:
            raise UnclosedCycle("domain became empty")
    # merge coincident vertices
    merged: list[tuple[complex, int]] = []
    for k, lab in poly:
        if merged and abs(k - merged[-1][0]) < VERTEX_TOL:
            merged[-1] = (merged[-1][0], lab)
            continue
        merged.append((k, lab))
    while len(merged) > 1 and abs(merged[0][0] - merged[-1][0]) < VERTEX_TOL:
        merged.pop()
    if any(lab < 0 for _, lab in merged) or any(abs(k) >= 1 for k, _ in merged):
        raise RefineEpsilon("domain does not close inside the disk", {"eps": eps})
    verts = [klein_to_disk(k) for k, _ in merged]
    if max(abs(p) for p in verts) >= closure_radius(eps, sharp):
        raise RefineEpsilon("domain is not contained in the closure disk", {"eps": eps, "max_radius": max(abs(p) for p in verts)})
    m = len(merged)
    sides = [Side(merged[k][1], verts[k], verts[(k + 1) % m]) for k in range(m)]
    used = sorted({s.element for s in sides})
    remap = {old: new for new, old in enumerate(used)}
    # keep inverses of used elements too
    dom_els = [els[i] for i in used]
    for s in sides:
        s.element = remap[s.element]
    emb = embedding
    domain = FordDomain(dom_els, sides, [], eps, emb)
    _split_and_pair(domain)
    domain.angles = [_interior_angle(domain, k) for k in range(len(domain.sides))]
    return domain


def _circle_of(domain: FordDomain, side: Side) -> tuple[complex, float]:
    c = domain.elements[side.element].circle()
    assert c is not None
    return c


def _interior_angle(domain: FordDomain, k: int) -> float:
    sides = domain.sides
    cur = sides[k]
    prev = sides[k - 1]
    if prev.element == cur.element:
        return math.pi
    p = cur.start
    c1, r1 = _circle_of(domain, prev)
    c2, r2 = _circle_of(domain, cur)
    n1 = (p - c1) / r1
    n2 = (p - c2) / r2
    cosang = max(-1.0, min(1.0, (n1 * n2.conjugate()).real))
    return math.pi - math.acos(cosang)


def _quat_inverse_key(q: QuaternionElement) -> tuple:
    return tuple(canonical_sign(q.conj()).coordinates())


def _split_and_pair(domain: FordDomain) -> None:
    """Pair every side with the side on the isometric circle of the inverse element.

    A side whose element is its own inverse (an involution) is split at
    the fixed point into two halves paired with each other.
    """
    els = domain.elements
    keys = {e.key(): i for i, e in enumerate(els)}
    new_sides: list[Side] = []
    for s in domain.sides:
        g = els[s.element]
        if keys.get(_quat_inverse_key(g.quat)) == s.element:
            mid = _fixed_point_on_arc(g, s)
            new_sides.append(Side(s.element, s.start, mid))
            new_sides.append(Side(s.element, mid, s.end))
        else:
            new_sides.append(s)
    domain.sides = new_sides
    by_element: dict[int, list[int]] = {}
    for idx, s in enumerate(new_sides):
        by_element.setdefault(s.element, []).append(idx)
    for idx, s in enumerate(new_sides):
        g = els[s.element]
        inv = keys.get(_quat_inverse_key(g.quat))
        if inv is None or inv not in by_element:
            raise UnclosedCycle("side has no partner: the inverse circle does not bound the domain", {"side": idx})
        gs, ge = disk_apply(g.disk, s.start), disk_apply(g.disk, s.end)
        match = None
        for j in by_element[inv]:
            t = new_sides[j]
            if abs(gs - t.end) < 1e-7 and abs(ge - t.start) < 1e-7:
                match = j
        if match is None:
            raise UnclosedCycle("side image does not match a side of the domain", {"side": idx})
        s.partner = match
        s.pairing = s.element


def _fixed_point_on_arc(g: GroupElement, s: Side) -> complex:
    A, B = g.disk
    # fixed points of z -> (A z + B) / (conj(B) z + conj(A)): conj(B) z^2 + (conj(A) - A) z - B = 0
    Bc = B.conjugate()
    disc = (A.conjugate() - A) ** 2 + 4 * Bc * B
    roots = [(-(A.conjugate() - A) + sgn * np.sqrt(disc + 0j)) / (2 * Bc) for sgn in (1, -1)]
    z = min(roots, key=lambda r: abs(r))
    if abs(z) >= 1:
        raise UnclosedCycle("involution has no fixed point inside the disk")
    return complex(z)


# ---------------------------------------------------------------------------
# words in free groups

Word = tuple[tuple[str, int], ...]


def reduce_word(w: Sequence[tuple[str, int]]) -> Word:
    out: list[tuple[str, int]] = []
    for s, e in w:
        if out and out[-1][0] == s and out[-1][1] == -e:
            out.pop()
        else:
            out.append((s, e))
    return tuple(out)


def invert_word(w: Sequence[tuple[str, int]]) -> Word:
    return tuple((s, -e) for s, e in reversed(w))


def cyclic_reduce(w: Sequence[tuple[str, int]]) -> Word:
    w = list(reduce_word(w))
    while len(w) >= 2 and w[0][0] == w[-1][0] and w[0][1] == -w[-1][1]:
        w = w[1:-1]
    return tuple(w)


def substitute(w: Sequence[tuple[str, int]], table: dict[str, Word]) -> Word:
    out: list[tuple[str, int]] = []
    for s, e in w:
        if s in table:
            out.extend(table[s] if e == 1 else invert_word(table[s]))
        else:
            out.append((s, e))
    return reduce_word(out)


def word_str(w: Sequence[tuple[str, int]]) -> str:
    if not w:
        return "1"
    return " ".join(s if e == 1 else f"{s}^-1" for s, e in w)


def evaluate_word(w: Sequence[tuple[str, int]], values: dict[str, QuaternionElement], one: QuaternionElement) -> QuaternionElement:
    out = one
    inv_cache: dict[str, QuaternionElement] = {}
    for s, e in w:
        if e == 1:
            out = out * values[s]
        else:
            if s not in inv_cache:
                q = values[s]
                inv_cache[s] = q.conj() * q.norm().inverse()
            out = out * inv_cache[s]
    return out


def is_plus_minus_one(q: QuaternionElement) -> bool:
    return q.is_scalar() and q.parts[0] in (1, -1)


def verify_presentation(gens: dict[str, QuaternionElement], relations: Sequence[Sequence[tuple[str, int]]], target: int | None = None) -> bool:
    """Exact check that every relation evaluates to ``+-1`` (or exactly ``target``)."""
    one = next(iter(gens.values())).algebra.one if gens else None
    for rel in relations:
        if one is None:
            if rel:
                return False
            continue
        q = evaluate_word(rel, gens, one)
        if target is None:
            if not is_plus_minus_one(q):
                return False
        elif q != one * target:
            return False
    return True


def torsion_order(q: QuaternionElement, max_order: int = 200) -> int:
    """Smallest ``m >= 1`` with ``q^m = +-1`` (0 if none up to ``max_order``)."""
    p = q
    for m in range(1, max_order + 1):
        if is_plus_minus_one(p):
            return m
        p = p * q
    return 0


# ---------------------------------------------------------------------------
# cycles and the Poincare presentation


def _side_letters(domain: FordDomain) -> dict[int, tuple[str, int]]:
    letters: dict[int, tuple[str, int]] = {}
    count = 0
    for idx, s in enumerate(domain.sides):
        if idx in letters:
            continue
        count += 1
        name = f"s{count}"
        letters[idx] = (name, 1)
        letters[s.partner] = (name, -1) if s.partner != idx else (name, 1)
    return letters


def vertex_cycles(domain: FordDomain) -> list[Cycle]:
    sides = domain.sides
    m = len(sides)
    done: set[int] = set()
    cycles = []
    for start in range(m):
        if start in done:
            continue
        word = []
        verts = []
        angle = 0.0
        k = start
        steps = 0
        while True:
            done.add(k)
            verts.append(k)
            word.append(k)
            angle += domain.angles[k]
            k = (sides[k].partner + 1) % m
            steps += 1
            if k == start:
                break
            if steps > m:
                raise UnclosedCycle("vertex cycle does not close", {"start": start})
        cycles.append(Cycle(verts, word, angle, 0))
    return cycles


@dataclass
class PoincarePresentation:
    generators: dict[str, QuaternionElement]
    side_letter: dict[int, tuple[str, int]]
    cycles: list[Cycle]
    cycle_words: list[Word]  # transformation of each cycle as a word (left to right product)
    signature: Signature

    def relations(self) -> list[Word]:
        return [w * c.order for w, c in zip(self.cycle_words, self.cycles)]


def side_pairings_and_signature(domain: FordDomain, area_tol: float = 1e-6) -> PoincarePresentation:
    """Generators, cycle relations and signature of the group from its Ford domain."""
    letters = _side_letters(domain)
    gens: dict[str, QuaternionElement] = {}
    for idx, (name, e) in letters.items():
        if e == 1 and name not in gens:
            gens[name] = domain.elements[domain.sides[idx].pairing].quat
    cycles = vertex_cycles(domain)
    words = []
    one = domain.elements[0].quat.algebra.one
    for c in cycles:
        w = reduce_word([letters[k] for k in reversed(c.word)])
        T = evaluate_word(w, gens, one)
        m = torsion_order(T)
        if m == 0:
            raise UnclosedCycle("cycle transformation has infinite order", {"cycle": c.word})
        geo = 2 * math.pi / c.angle
        if abs(geo - m) > 1e-5 * m:
            raise UnclosedCycle("cycle angle disagrees with the exact torsion order", {"angle_order": geo, "exact_order": m})
        c.order = m
        words.append(w)
    pairs = len(domain.sides) // 2
    chi = len(cycles) - pairs + 1
    if (2 - chi) % 2:
        raise UnclosedCycle("odd Euler characteristic defect")
    genus = (2 - chi) // 2
    sig = Signature(genus, tuple(sorted(c.order for c in cycles if c.order > 1)))
    area = float(rh_area(sig)) * math.pi
    if abs(area - domain.area) > area_tol * max(1.0, area):
        raise AreaMismatch(f"domain area {domain.area} disagrees with {sig}", {"expected": area})
    domain.cycles = cycles
    return PoincarePresentation(gens, letters, cycles, words, sig)


# ---------------------------------------------------------------------------
# normal form of surface-group presentations


@dataclass
class StandardPresentation:
    """``prod [a_i, b_i] * prod c_j = +-1`` with ``c_j^{m_j} = +-1``."""

    genus: int
    hyperbolic: list[tuple[str, str]]
    cones: list[tuple[str, int]]
    values: dict[str, QuaternionElement]
    expressions: dict[str, Word]  # in terms of the input generators

    def relation(self) -> Word:
        w: list[tuple[str, int]] = []
        for a, b in self.hyperbolic:
            w += [(a, 1), (b, 1), (a, -1), (b, -1)]
        w += [(c, 1) for c, _ in self.cones]
        return tuple(w)

    def all_relations(self) -> list[Word]:
        return [self.relation()] + [tuple([(c, 1)] * m) for c, m in self.cones]

    @property
    def signature(self) -> Signature:
        return Signature(self.genus, tuple(sorted(m for _, m in self.cones)))

    def verify(self) -> bool:
        return verify_presentation(self.values, self.all_relations())

    def render(self) -> str:
        gens = [x for pair in self.hyperbolic for x in pair] + [c for c, _ in self.cones]
        rels = [word_str(self.relation())] + [f"{c}^{m}" for c, m in self.cones]
        return f"< {', '.join(gens)} | {', '.join(rels)} >"


class SurfaceSystem:
    """Relations ``w = +-1`` in letters with exact values, normalized by Nielsen moves.

    Every non-cone letter must occur exactly twice (with opposite
    exponents) across the relations and every cone letter exactly once.
    """

    def __init__(self, values: dict[str, QuaternionElement], expressions: dict[str, Word], prefix: str = "") -> None:
        self.values = dict(values)
        self.expr = dict(expressions)
        self.cones: dict[str, int] = {}
        self.relations: list[Word] = []
        self.prefix = prefix
        self._fresh = 0
        self.one = next(iter(values.values())).algebra.one

    def fresh(self, stem: str) -> str:
        self._fresh += 1
        return f"{self.prefix}{stem}{self._fresh}"

    def define(self, stem: str, word: Sequence[tuple[str, int]]) -> str:
        name = self.fresh(stem)
        self.values[name] = evaluate_word(word, self.values, self.one)
        self.expr[name] = substitute(word, self.expr)
        return name

    def add_cone(self, word: Sequence[tuple[str, int]], order: int) -> str:
        c = self.define("c", word)
        self.cones[c] = order
        self.relations.append(reduce_word(list(word) + [(c, -1)]))
        return c

    def add_relation(self, word: Sequence[tuple[str, int]]) -> None:
        self.relations.append(reduce_word(word))

    def _occurrences(self, letter: str) -> list[tuple[int, int, int]]:
        return [(r, i, e) for r, w in enumerate(self.relations) for i, (s, e) in enumerate(w) if s == letter]

    def merge(self) -> None:
        while len(self.relations) > 1:
            done = False
            for r1, w1 in enumerate(self.relations):
                for i, (x, e) in enumerate(w1):
                    if x in self.cones:
                        continue
                    occ = self._occurrences(x)
                    if len(occ) != 2:
                        raise UnclosedCycle(f"letter {x} occurs {len(occ)} times")
                    (ra, ia, ea), (rb, ib, eb) = occ
                    if ra == rb:
                        continue
                    r2, i2, e2 = (rb, ib, eb) if ra == r1 else (ra, ia, ea)
                    if e2 != -e:
                        raise UnclosedCycle(f"letter {x} occurs twice with the same exponent")
                    rot = w1[i + 1 :] + w1[:i]  # x^e rot = 1  =>  x^{-e} = rot
                    w2 = self.relations[r2]
                    new = reduce_word(w2[:i2] + rot + w2[i2 + 1 :])
                    self.relations = [w for k, w in enumerate(self.relations) if k not in (r1, r2)] + [new]
                    done = True
                    break
                if done:
                    break
            if not done:
                raise UnclosedCycle("relations cannot be merged into one")
        if self.relations:
            self.relations = [cyclic_reduce(self.relations[0])]

    def _invert_letter(self, x: str, V: list[tuple[str, int]]) -> tuple[str, list[tuple[str, int]]]:
        """Replace ``x`` by a new letter ``x' = x^-1`` everywhere in ``V``."""
        name = self.define("r", [(x, -1)])
        return name, [(name, -e) if s == x else (s, e) for s, e in V]

    def normalize(self) -> StandardPresentation:
        """Bring the merged relation to ``prod [a_i, b_i] * prod c_j``.

        For a linked pair ``V = A x P y Q x^-1 R y^-1 S`` (``A`` holding cone
        letters only) put ``T = R Q P`` and replace ``x, y`` by
        ``a = A x P T^-1 A^-1`` and ``b = A T y Q P T^-1 A^-1``; then
        ``V = [a, b] A T S`` identically in the free group.
        """
        self.merge()
        V = list(self.relations[0]) if self.relations else []
        pairs: list[tuple[str, str]] = []
        while True:
            i = next((k for k, (s, _) in enumerate(V) if s not in self.cones), None)
            if i is None:
                break
            x, e = V[i]
            if e == -1:
                x, V = self._invert_letter(x, V)
            j = next(k for k in range(i + 1, len(V)) if V[k][0] == x)
            inner = [s for s, _ in V[i + 1 : j]]
            ky = next((k for k, s in enumerate(inner) if s not in self.cones and inner.count(s) == 1), None)
            if ky is None:
                raise UnclosedCycle(f"letter {x} is not linked; the group splits as a free product")
            y, ey = V[i + 1 + ky]
            if ey == -1:
                y, V = self._invert_letter(y, V)
            k = next(t for t in range(j + 1, len(V)) if V[t][0] == y)
            A, P, Q = V[:i], V[i + 1 : i + 1 + ky], V[i + 2 + ky : j]
            R, S = V[j + 1 : k], V[k + 1 :]
            T = R + Q + P
            Ainv, Tinv = list(invert_word(A)), list(invert_word(T))
            a = self.define("a", A + [(x, 1)] + P + Tinv + Ainv)
            b = self.define("b", A + T + [(y, 1)] + Q + P + Tinv + Ainv)
            pairs.append((a, b))
            V = list(reduce_word(A + T + S))
        cones = []
        for s, e in V:
            if e == -1:
                c = self.define("c", [(s, -1)])
                self.cones[c] = self.cones[s]
                s = c
            cones.append((s, self.cones[s]))
        names = [n for p in pairs for n in p] + [c for c, _ in cones]
        sp = StandardPresentation(
            len(pairs), pairs, cones, {n: self.values[n] for n in names}, {n: self.expr[n] for n in names}
        )
        if not sp.verify():
            raise UnclosedCycle("normalized relation does not evaluate to +-1")
        return sp


def standard_presentation(pres: PoincarePresentation) -> StandardPresentation:
    values = dict(pres.generators)
    sys = SurfaceSystem(values, {k: ((k, 1),) for k in values})
    for w, c in zip(pres.cycle_words, pres.cycles):
        if c.order > 1:
            sys.add_cone(w, c.order)
        else:
            sys.add_relation(w)
    sp = sys.normalize()
    if sp.signature != pres.signature:
        raise UnclosedCycle("normal form disagrees with the cycle signature")
    return sp


# ---------------------------------------------------------------------------
# torsion-free subgroups of index two


@dataclass
class Genus2Subgroup:
    character: dict[str, int]  # image of each standard generator in Z/2
    presentation: StandardPresentation  # expressions are words in the parent's standard generators


def genus2_subgroups(sp: StandardPresentation) -> list[Genus2Subgroup]:
    """Genus-two subgroups of index at most two, in standard form ``[a, b][c, d]``.

    A kernel of a character to ``Z/2`` is torsion free iff every cone
    generator (all of order two here) maps to the nontrivial element.  The
    kernel is presented by Reidemeister-Schreier with transversal ``{1, t}``,
    ``t`` the first cone generator, and then normalized.
    """
    sig = sp.signature
    if sig.genus == 2 and not sig.periods:
        return [Genus2Subgroup({}, sp)]
    if any(m != 2 for _, m in sp.cones) or rh_area(sig) * 2 != rh_area(Signature(2, ())):
        raise NotSupportedIndex(f"genus-two subgroups of {sig} need index greater than two")
    hyper = [x for pair in sp.hyperbolic for x in pair]
    cones = [c for c, _ in sp.cones]
    t = cones[0]
    out = []
    for bits in itertools.product((0, 1), repeat=len(hyper)):
        phi = dict(zip(hyper, bits)) | {c: 1 for c in cones}
        out.append(Genus2Subgroup(phi, _kernel_presentation(sp, phi, t)))
    return out


def _kernel_presentation(sp: StandardPresentation, phi: dict[str, int], t: str) -> StandardPresentation:
    one = next(iter(sp.values.values())).algebra.one
    rep = {0: (), 1: ((t, 1),)}
    letters = list(sp.values)

    def gamma(e: int, s: str) -> str:
        return f"{s}.{e}"

    values: dict[str, QuaternionElement] = {}
    exprs: dict[str, Word] = {}
    trivial: dict[str, Word] = {}
    for s in letters:
        for e in (0, 1):
            w = reduce_word(list(rep[e]) + [(s, 1)] + list(invert_word(rep[(e + phi[s]) % 2])))
            name = gamma(e, s)
            if not w:
                trivial[name] = ()
                continue
            values[name] = evaluate_word(w, sp.values, one)
            exprs[name] = w

    def lift(word: Sequence[tuple[str, int]], e: int) -> Word:
        out: list[tuple[str, int]] = []
        for s, ex in word:
            if ex == 1:
                out.append((gamma(e, s), 1))
                e = (e + phi[s]) % 2
            else:
                e = (e - phi[s]) % 2
                out.append((gamma(e, s), -1))
        return tuple(out)

    # cone relations c^2: the lift at coset 0 reads gamma(0,c) gamma(1,c) = 1
    for c, m in sp.cones:
        g0, g1 = gamma(0, c), gamma(1, c)
        if g0 in trivial:
            trivial[g1] = ()
        else:
            trivial[g1] = ((g0, -1),)
    for name in trivial:
        values.pop(name, None)
        exprs.pop(name, None)
    rels = [substitute(lift(sp.relation(), e), trivial) for e in (0, 1)]
    system = SurfaceSystem(values, exprs, prefix="k")
    for r in rels:
        system.add_relation(r)
    kernel = system.normalize()
    if kernel.signature != Signature(2, ()):
        raise UnclosedCycle(f"kernel has signature {kernel.signature}")
    return kernel


# ---------------------------------------------------------------------------
# driver, tiling check and output


@dataclass
class FordResult:
    order: QuaternionOrder
    eps: float
    elements: list[GroupElement]
    domain: FordDomain
    presentation: PoincarePresentation
    standard: StandardPresentation
    subgroups: list[Genus2Subgroup]
    attempts: list[tuple[float, str]]

    @property
    def signature(self) -> Signature:
        return self.presentation.signature


def ford_pipeline(
    O: QuaternionOrder,
    eps: float = 0.15,
    eps_floor: float = 0.05,
    b_split: tuple[float, float] | None = None,
    sharp: bool = True,
) -> FordResult:
    """Enumerate, build the domain (halving ``eps`` on ``RefineEpsilon``), read off generators."""
    A = O.algebra
    place = split_place(A)
    if b_split is None:
        b_split = default_b_split(A, place)
    emb = Embedding(A, place, *b_split)
    attempts = []
    e = eps
    while True:
        try:
            elements = enumerate_bounded_elements(O, e, place, b_split)
            domain = build_ford_domain(elements, e, emb, sharp=sharp)
            break
        except (RefineEpsilon, EmptyEnumeration) as err:
            attempts.append((e, str(err)))
            if e / 2 < eps_floor - 1e-12:
                raise RefineEpsilon(f"no certified domain down to eps = {e}", {"attempts": attempts}) from err
            e = e / 2
    attempts.append((e, "ok"))
    pres = side_pairings_and_signature(domain)
    sp = standard_presentation(pres)
    subs = genus2_subgroups(sp) if _index_two_or_less(sp.signature) else []
    return FordResult(O, e, elements, domain, pres, sp, subs, attempts)


def _index_two_or_less(sig: Signature) -> bool:
    target = rh_area(Signature(2, ()))
    return rh_area(sig) == target or (rh_area(sig) * 2 == target and all(m == 2 for m in sig.periods))


def ford_reduce(domain: FordDomain, z: complex, max_steps: int = 200) -> tuple[complex, int]:
    """Move ``z`` into the domain by repeatedly applying side pairings whose circle contains it."""
    steps = 0
    while True:
        best = None
        best_val = 1.0
        for s in domain.sides:
            A, B = domain.elements[s.element].disk
            val = abs(B.conjugate() * z + A.conjugate())
            if val < best_val - 1e-12:
                best_val, best = val, s.element
        if best is None:
            return z, steps
        z = disk_apply(domain.elements[best].disk, z)
        steps += 1
        if steps > max_steps:
            raise UnclosedCycle("Ford reduction did not terminate", {"z": z})


def tiling_check(domain: FordDomain, points: int = 100, radius: float = 0.9, seed: int = 0) -> list[int]:
    """Reduce random disk points into the domain; returns the word lengths used."""
    rng = np.random.default_rng(seed)
    lengths = []
    for _ in range(points):
        r = radius * math.sqrt(rng.random())
        theta = 2 * math.pi * rng.random()
        z = r * complex(math.cos(theta), math.sin(theta))
        w, steps = ford_reduce(domain, z)
        if not domain.contains(w, tol=1e-9):
            raise UnclosedCycle("reduced point lies outside the domain", {"z": z, "image": w})
        lengths.append(steps)
    return lengths


def generator_vector(q: QuaternionElement, r: int) -> list[int]:
    """Integer coordinates of ``r * q`` in the power basis, ordered ``x, y, u, v``."""
    w = [c * r for c in q.coordinates()]
    if any(c.denominator != 1 for c in w):
        raise ValueError(f"{r} does not clear the denominators of {q}")
    return [int(c) for c in w]


def generator_table(values: dict[str, QuaternionElement], r: int) -> str:
    rows = []
    for name, q in values.items():
        rows.append(name.ljust(6) + " ".join(f"{c:5d}" for c in generator_vector(q, r)))
    return "\n".join(rows)


def _arc_path(domain: FordDomain, s: Side, scale: float, origin: float) -> str:
    c, rad = _circle_of(domain, s)
    x1, y1 = origin + scale * s.start.real, origin - scale * s.start.imag
    x2, y2 = origin + scale * s.end.real, origin - scale * s.end.imag
    # the side runs counterclockwise around the domain, i.e. clockwise around its circle center
    cross = ((s.start - c).conjugate() * (s.end - c)).imag
    sweep = 1 if cross < 0 else 0
    return f"A {scale * rad:.6f} {scale * rad:.6f} 0 0 {sweep} {x2:.6f} {y2:.6f}"


def render_svg(domain: FordDomain, path: str | None = None, size: int = 600) -> str:
    """Deterministic SVG of the domain inside the unit disk."""
    scale = size * 0.45
    o = size / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{o:.6f}" cy="{o:.6f}" r="{scale:.6f}" fill="none" stroke="black" stroke-width="1"/>',
    ]
    s0 = domain.sides[0]
    d = [f"M {o + scale * s0.start.real:.6f} {o - scale * s0.start.imag:.6f}"]
    for s in domain.sides:
        d.append(_arc_path(domain, s, scale, o))
    parts.append(f'<path d="{" ".join(d)} Z" fill="#dde8f5" stroke="#1f4e8c" stroke-width="1.5"/>')
    for k, s in enumerate(domain.sides):
        p = s.start
        elliptic = abs(domain.angles[k] - math.pi) < 1e-9
        colour = "#c0392b" if elliptic else "#1f4e8c"
        parts.append(f'<circle cx="{o + scale * p.real:.6f}" cy="{o - scale * p.imag:.6f}" r="2.5" fill="{colour}"/>')
    labelled = 0
    for cyc in domain.cycles:
        if cyc.order > 1:
            labelled += 1
            p = domain.sides[cyc.vertices[0]].start
            parts.append(
                f'<text x="{o + scale * p.real + 4:.6f}" y="{o - scale * p.imag - 4:.6f}" font-size="11">'
                f"v{labelled} (order {cyc.order})</text>"
            )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
