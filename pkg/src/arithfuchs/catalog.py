"""Field and algebra catalog.

Class numbers, relative class numbers and fundamental units are inputs to
the classification, not outputs.  The catalog stores each of them with a
``source`` string saying where the value came from, and the helpers below
re-derive what can be re-derived cheaply (discriminants through ``nf_new``,
class number one through the Minkowski bound, ``h^-`` through the analytic
class number formula) so that a wrong entry fails loudly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import BasisHypothesisFails, SearchExhausted
from .ideals import admissible_periods, cyclotomic_real_element, primes_of_norm_up_to
from .numfield import FieldElement, NumberField, UnitSystem, nf_new
from .quatalg import QuaternionAlgebra
from .volume import DEFAULT_ZETA_BOUND, prime_ideal_degree_counts

CATALOG_VERSION = 1


@dataclass(frozen=True)
class Sourced:
    """A catalog value together with its provenance."""

    value: Any
    source: str


@dataclass(frozen=True)
class FieldRecord:
    key: str
    degree: int
    disc: int
    poly: tuple[int, ...]
    poly_source: str
    class_number: Sourced
    units: Sourced
    h_minus: dict[int, Sourced] = field(default_factory=dict)
    aliases: tuple[str, ...] = ()

    def field(self) -> NumberField:
        return _field(self.key, self.poly, self.disc)

    def unit_system(self) -> UnitSystem:
        K = self.field()
        return UnitSystem(tuple(K.element(c) for c in self.units.value))


@dataclass(frozen=True)
class AlgebraRecord:
    key: str
    field_key: str
    a: tuple[int, ...]
    b: tuple[int, ...]
    split_place: int
    source: str


@dataclass(frozen=True)
class ScreenRecord:
    field_key: str
    source: str


_FIELD_CACHE: dict[tuple, NumberField] = {}


def _field(key: str, poly: tuple[int, ...], disc: int) -> NumberField:
    ck = (key, poly, disc)
    if ck not in _FIELD_CACHE:
        _FIELD_CACHE[ck] = nf_new(list(poly), disc, name=key)
    return _FIELD_CACHE[ck]


class Catalog:
    def __init__(self, raw: dict[str, Any]) -> None:
        if raw.get("version") != CATALOG_VERSION:
            raise ValueError(f"unsupported catalog version {raw.get('version')}")
        self.raw = raw
        self.fields: dict[str, FieldRecord] = {}
        self._alias: dict[str, str] = {}
        for rec in raw["fields"]:
            fr = FieldRecord(
                key=rec["id"],
                degree=int(rec["degree"]),
                disc=int(rec["disc"]),
                poly=tuple(int(c) for c in rec["poly"]),
                poly_source=rec["poly_source"],
                class_number=Sourced(int(rec["class_number"]["value"]), rec["class_number"]["source"]),
                units=Sourced(
                    [tuple(int(c) for c in u) for u in rec["units"]["value"]], rec["units"]["source"]
                ),
                h_minus={int(m): Sourced(int(v["value"]), v["source"]) for m, v in rec.get("h_minus", {}).items()},
                aliases=tuple(rec.get("aliases", ())),
            )
            self.fields[fr.key] = fr
            self._alias[fr.key] = fr.key
            for a in fr.aliases:
                self._alias[a] = fr.key
        self.algebras: dict[tuple[str, str], AlgebraRecord] = {}
        for rec in raw.get("algebras", []):
            ar = AlgebraRecord(
                key=rec["id"],
                field_key=self.resolve(rec["field"]),
                a=tuple(_int_coord(c) for c in rec["a"]),
                b=tuple(_int_coord(c) for c in rec["b"]),
                split_place=int(rec["split_place"]),
                source=rec["source"],
            )
            self.algebras[(ar.field_key, ar.key)] = ar
        self.screens = [ScreenRecord(self.resolve(r["field"]), r["source"]) for r in raw.get("screens", [])]

    def resolve(self, key: str) -> str:
        if key in self._alias:
            return self._alias[key]
        if key.isdigit() and f"d{key}" in self._alias:
            return self._alias[f"d{key}"]
        raise KeyError(f"unknown field {key!r}")

    def field_record(self, key: str) -> FieldRecord:
        return self.fields[self.resolve(key)]

    def field(self, key: str) -> NumberField:
        return self.field_record(key).field()

    def algebra_record(self, field_key: str, algebra_key: str) -> AlgebraRecord:
        fk = self.resolve(field_key)
        try:
            return self.algebras[(fk, algebra_key)]
        except KeyError:
            known = sorted(k for f, k in self.algebras if f == fk)
            raise KeyError(f"unknown algebra {algebra_key!r} over {fk} (known: {known})") from None

    def algebra(self, field_key: str, algebra_key: str) -> QuaternionAlgebra:
        """The algebra, after checking that the recorded split place is the only split real place."""
        from .quatalg import ramification_set

        rec = self.algebra_record(field_key, algebra_key)
        K = self.field(rec.field_key)
        A = QuaternionAlgebra(K, K.element(rec.a), K.element(rec.b))
        ram = ramification_set(A)
        if ram.unramified_real_places(K.degree) != [rec.split_place]:
            raise ValueError(
                f"algebra {algebra_key}: split real places {ram.unramified_real_places(K.degree)}, "
                f"catalog says {rec.split_place}"
            )
        return A


def _int_coord(c: Any) -> int:
    """Catalog algebra coordinates are integers; reject anything else early."""
    if isinstance(c, bool) or int(c) != c:
        raise ValueError(f"non-integral algebra coordinate {c!r}")
    return int(c)


def default_catalog_path() -> Path:
    return Path(str(resources.files("arithfuchs") / "data" / "catalog.json"))


_CATALOG_CACHE: dict[str, Catalog] = {}


def load_catalog(path: str | Path | None = None) -> Catalog:
    p = Path(path) if path is not None else default_catalog_path()
    key = str(p.resolve())
    if key not in _CATALOG_CACHE:
        with open(p, encoding="utf-8") as fh:
            _CATALOG_CACHE[key] = Catalog(json.load(fh))
    return _CATALOG_CACHE[key]


# ---------------------------------------------------------------------------
# checks on catalog inputs


def minkowski_bound(K: NumberField) -> float:
    n = K.degree
    return math.factorial(n) / n**n * math.sqrt(abs(K.field_disc))


def verify_class_number_one(K: NumberField, coord_bound: int = 3) -> bool:
    """True when every prime of norm up to the Minkowski bound is principal.

    Every ideal class contains an integral ideal of norm at most the
    Minkowski bound, so this certifies ``h = 1``.  A ``False`` answer only
    means the bounded generator search failed.
    """
    from .orders import principal_generator

    for P in primes_of_norm_up_to(K, int(math.floor(minkowski_bound(K)))):
        try:
            principal_generator(P, coord_bound)
        except SearchExhausted:
            return False
    return True


def is_square_in_field(c: FieldElement) -> bool:
    """Exact test for ``c = x^2`` with ``x`` in ``Z[a]`` (``c`` an algebraic integer)."""
    K = c.field
    if c.is_zero():
        return True
    vals = c.embeddings_float()
    if any(v < 0 for v in vals):
        return False
    roots = np.sqrt(np.array(vals))
    Vinv = np.linalg.inv(np.array(K.vandermonde, dtype=float))
    for signs in itertools.product((1.0, -1.0), repeat=K.degree):
        x = Vinv @ (roots * np.array(signs))
        xr = np.round(x)
        if np.max(np.abs(x - xr)) > 1e-6:
            continue
        y = K.element([int(v) for v in xr])
        if y * y == c:
            return True
    return False


def _cm_radicand(m: int) -> int:
    if m == 2:
        return -4
    if m == 3:
        return -3
    raise BasisHypothesisFails("only k(i) and k(omega) are supported")


def roots_of_unity_order(K: NumberField, m: int) -> int:
    """Number of roots of unity in ``k(zeta_2m)`` for ``m`` in ``{2, 3}``.

    ``zeta_2j`` lies in ``k(sqrt D)`` exactly when ``Q(cos(pi/j))`` is in
    ``k`` and ``(lam^2 - 4) D`` is a square in ``k``.
    """
    D = _cm_radicand(m)
    w = 2
    for j in sorted(set(admissible_periods(K)) | {m}):
        lam = cyclotomic_real_element(K, j)
        if lam is None:
            continue
        if is_square_in_field((lam * lam - 4) * D):
            w = math.lcm(w, 2 * j)
    return w


@dataclass(frozen=True)
class RelativeClassNumberEstimate:
    m: int
    value: float
    rounded: int
    roots_of_unity: int
    truncation: int

    @property
    def distance(self) -> float:
        return abs(self.value - self.rounded)


def relative_class_number_estimate(K: NumberField, m: int, B: int = DEFAULT_ZETA_BOUND) -> RelativeClassNumberEstimate:
    """``h^-`` of ``k(zeta_2m)|k`` from ``h^- = Q w sqrt(|d_K|/d_k) L(1, chi) / (2 pi)^n``.

    Needs ``p`` (``2`` for ``m = 2``, ``3`` for ``m = 3``) unramified in
    ``k``.  Then the relative discriminant is ``(D)``, the unit index ``Q``
    is 1 (a unit of the form ``zeta eta`` with ``eta`` not in ``k`` would
    make ``p`` a unit times a square in ``k``), and ``chi(P)`` depends only
    on ``N(P)`` modulo 4 or 3.  ``L(1, chi)`` is a truncated Euler product,
    so the value is an estimate and is reported with its distance to the
    nearest integer.
    """
    p = 2 if m == 2 else 3
    D = _cm_radicand(m)
    if K.field_disc % p == 0:
        raise BasisHypothesisFails(f"{p} ramifies in k; the estimate needs it unramified")
    n = K.degree
    modulus = -D
    ps, fs, cs = prime_ideal_degree_counts(K, B)
    logs = []
    for pp, ff, cc in zip(ps.tolist(), fs.tolist(), cs.tolist()):
        if pp == p:
            continue  # ramified in k(zeta_2m), chi = 0
        chi = 1 if pow(pp, ff, modulus) == 1 else -1
        logs.append(-cc * math.log1p(-chi * float(pp) ** (-ff)))
    L = math.exp(math.fsum(logs))
    w = roots_of_unity_order(K, m)
    rel_disc_norm = abs(D) ** n
    value = w * math.sqrt(abs(K.field_disc) * rel_disc_norm) * L / (2 * math.pi) ** n
    return RelativeClassNumberEstimate(m, value, int(round(value)), w, B)
