"""Command-line front end.

Every command prints a plain-text report.  With ``--out DIR`` it also writes
``DIR/<command>.jsonl`` (``ford-<field>-<algebra>.jsonl`` for ``ford``) with
one JSON record per verification, and ``ford`` and ``render`` write their
generator tables and SVG figures there.  Reports
contain no timings or other run-dependent data, so identical options give
byte-identical output.  The exit status is 0 exactly when every requested
verification passes, 1 when one fails and 2 on an error.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

import click

from . import __version__
from .catalog import Catalog, load_catalog
from .classify import (
    classification_table,
    field_coarea,
    negative_screen,
    prime_ref,
    render_table,
    unlisted_solutions,
)
from .errors import ArithFuchsError
from .ideals import DEFAULT_SEED, admissible_periods, factor_prime, primes_up_to
from .numfield import embed, poly_to_str
from .orders import discriminant_squared_target, ideal_equals, maximal_order, order_discriminant
from .volume import DEFAULT_ZETA_BOUND, degree_bound_report, enumerate_genus2_supersignatures, rh_area

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    catalog_path: Path | None = None
    precision: int = 53
    zeta_bound: int = DEFAULT_ZETA_BOUND
    epsilon: float = 0.15
    out: Path | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.precision <= 0 or self.zeta_bound <= 0 or self.epsilon <= 0 or self.seed < 0:
            raise click.BadParameter("precision, zeta bound and epsilon must be positive, seed nonnegative")

    def catalog(self) -> Catalog:
        return load_catalog(self.catalog_path)

    def write(self, name: str, text: str) -> Path | None:
        if self.out is None:
            return None
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text, encoding="utf-8")
        return path

    def write_records(self, command: str, records: Iterable[dict[str, Any]]) -> None:
        lines = [json.dumps(r, sort_keys=True) for r in records]
        self.write(f"{command}.jsonl", "".join(line + "\n" for line in lines))


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--precision", default=53, show_default=True, help="Bits for printed embeddings.")
@click.option("--zeta-bound", default=DEFAULT_ZETA_BOUND, show_default=True, help="Euler product truncation B.")
@click.option("--epsilon", default=0.15, show_default=True, help="Initial Ford enumeration epsilon.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), help="Directory for result files.")
@click.option("--seed", default=DEFAULT_SEED, show_default=True, help="Seed for finite-field factorization.")
@click.pass_context
def main(ctx: click.Context, catalog_path, precision, zeta_bound, epsilon, out, seed) -> None:
    """Arithmetic Fuchsian groups from quaternion algebras over totally real fields."""
    ctx.obj = RunConfig(catalog_path, precision, zeta_bound, epsilon, out, seed)


def _finish(ok: bool) -> None:
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


def _run(fn):
    """Turn library errors into a one-line message and exit status 2."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ArithFuchsError, KeyError) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_ERROR)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# field-info


@main.command("field-info")
@click.argument("field_id")
@click.option("--primes", "prime_bound", default=50, show_default=True, help="List primes of norm up to this.")
@click.pass_obj
@_run
def field_info(cfg: RunConfig, field_id: str, prime_bound: int) -> None:
    """Discriminant, embeddings, small primes and admissible periods of a catalog field."""
    cat = cfg.catalog()
    rec = cat.field_record(field_id)
    K = rec.field()
    digits = max(1, math.floor(cfg.precision * math.log10(2)) - 2)
    roots = [embed(K.gen, i, cfg.precision + 4).mid for i in range(K.degree)]
    primes = []
    for p in primes_up_to(prime_bound):
        for P in factor_prime(K, p, seed=cfg.seed):
            if P.norm <= prime_bound:
                primes.append(P)
    primes.sort(key=lambda P: (P.norm, P.p, P.factor_poly))
    periods = admissible_periods(K)
    lines = [
        f"field {rec.key}: Q[a]/({poly_to_str(K.min_poly, 'a')})",
        f"degree {K.degree}",
        f"disc {K.field_disc}",
        "embeddings " + " ".join(f"{float(r):.{min(digits, 15)}f}" for r in roots),
        f"class number {rec.class_number.value} ({rec.class_number.source})",
        "units " + (", ".join(str(u) for u in rec.unit_system().fundamental_units) or "-") + f" ({rec.units.source})",
        "periods {" + ",".join(map(str, periods)) + "}",
        f"primes of norm <= {prime_bound}:",
    ]
    for P in primes:
        lines.append(f"  {prime_ref(K, P):<6} norm {P.norm:<5} e={P.e} f={P.f} g={poly_to_str(P.factor_poly, 't')}")
    click.echo("\n".join(lines))
    cfg.write_records(
        "field-info",
        [
            {
                "field": rec.key,
                "degree": K.degree,
                "disc": K.field_disc,
                "poly": list(K.min_poly),
                "periods": periods,
                "primes": [{"ref": prime_ref(K, P), "norm": P.norm, "e": P.e, "f": P.f} for P in primes],
            }
        ],
    )


# ---------------------------------------------------------------------------
# classify


@main.command("classify")
@click.option("--degree", type=click.IntRange(1, 5), help="Only rows over fields of this degree.")
@click.option("--table", "full_table", is_flag=True, help="Print the full comparison table.")
@click.option("--screens/--no-screens", default=None, help="Also eliminate the screened fields.")
@click.pass_obj
@_run
def classify_cmd(cfg: RunConfig, degree: int | None, full_table: bool, screens: bool | None) -> None:
    """Recompute the genus-two classification rows and compare."""
    cat = cfg.catalog()
    reports = classification_table(degree, cat, cfg.zeta_bound)
    if full_table:
        click.echo(render_table(reports))
    else:
        for rep in reports:
            r = rep.row
            diff = rep.diff() if not rep.passed else {}
            extra = f" {json.dumps(diff, sort_keys=True)}" if diff else ""
            click.echo(f"{_status(rep.passed)} degree {r.degree} d_k {r.disc} Ram_f {r.ram_text} {r.index} {r.signature}{extra}")
    for rep in reports:
        if rep.row.printed_index is not None:
            click.echo(f"note: {rep.row.label} uses index {rep.row.index}; {rep.row.note}")
    extra_solutions = unlisted_solutions(reports)
    for disc, sol in extra_solutions:
        click.echo(
            f"unlisted: d_k {disc} Ram_f {sol.ram_text} index {sol.index} "
            + " ".join(str(s) for s in sol.signatures)
        )
    records = [rep.record() for rep in reports]
    ok = all(rep.passed for rep in reports)
    if screens or (screens is None and degree is None):
        for scr in cat.screens:
            sr = negative_screen(scr.field_key, cat, cfg.zeta_bound)
            click.echo(f"{_status(sr.eliminated)} screen d_k {sr.disc}: mu = {sr.mu} pi; {sr.reason}")
            records.append(
                {"screen": sr.field_key, "disc": sr.disc, "mu_over_pi": str(sr.mu), "reason": sr.reason,
                 "status": _status(sr.eliminated)}
            )
            ok = ok and sr.eliminated
    passed = sum(1 for rep in reports if rep.passed)
    click.echo(f"{passed}/{len(reports)} rows PASS")
    cfg.write_records("classify", records)
    _finish(ok)


# ---------------------------------------------------------------------------
# ford and render


def _ford_run(cfg: RunConfig, field_id: str, algebra_id: str):
    cat = cfg.catalog()
    rec = cat.algebra_record(field_id, algebra_id)
    A = cat.algebra(field_id, algebra_id)
    O = maximal_order(A)
    from .ford import ford_pipeline

    return rec, A, O, ford_pipeline(O, eps=cfg.epsilon)


@main.command("ford")
@click.argument("field_id")
@click.argument("algebra_id")
@click.pass_obj
@_run
def ford_cmd(cfg: RunConfig, field_id: str, algebra_id: str) -> None:
    """Maximal order, Ford domain, presentation and genus-two subgroups for a catalog algebra."""
    from .ford import generator_table, render_svg, tiling_check

    rec, A, O, res = _ford_run(cfg, field_id, algebra_id)
    K = A.base
    mu = field_coarea(K, cfg.zeta_bound)
    ram = list(discriminant_squared_target(A))
    expected_area = mu
    for P in ram:
        expected_area *= P.norm - 1
    disc_ok = ideal_equals(order_discriminant(O), discriminant_squared_target(A))
    area_ok = abs(res.domain.area / math.pi - float(expected_area)) < 1e-4
    sig_area_ok = rh_area(res.signature) == expected_area
    rel_ok = res.standard.verify()
    sub_ok = all(s.presentation.verify() for s in res.subgroups) and bool(res.subgroups)
    tiling = tiling_check(res.domain, seed=cfg.seed)
    checks = {
        "discriminant": disc_ok,
        "domain area": area_ok,
        "signature area": sig_area_ok,
        "relation check": rel_ok,
        "genus-two subgroups": sub_ok,
        "tiling": True,
    }
    stem = f"{rec.field_key}-{rec.key}"
    lines = [
        f"algebra {rec.key} over {rec.field_key}: a = {A.a}, b = {A.b}",
        f"Ram_f {' '.join(prime_ref(K, P) for P in ram) or '-'}",
        f"order denominator {O.denominator}, discriminant {'Delta^2' if disc_ok else 'wrong'}",
        f"epsilon {res.eps} ({len(res.attempts)} attempt{'s' if len(res.attempts) > 1 else ''})",
        f"elements {len(res.elements)}, sides {len(res.domain.sides)}",
        f"domain area {res.domain.area / math.pi:.6f} pi, coarea {expected_area} pi",
        f"signature {res.signature}",
        f"presentation {res.standard.render()}",
        f"genus-two subgroups of index <= 2: {len(res.subgroups)}",
    ]
    for k, sub in enumerate(res.subgroups, 1):
        lines.append(f"  H{k}: {sub.presentation.render()}")
    lines.append(f"tiling check: {len(tiling)} points reduced, longest word {max(tiling)}")
    lines += [f"{name}: {_status(ok)}" for name, ok in checks.items()]
    click.echo("\n".join(lines))
    tables = [f"# {stem}: coordinates x, y, u, v times {O.denominator}", generator_table(res.standard.values, O.denominator)]
    for k, sub in enumerate(res.subgroups, 1):
        tables += [f"# H{k}", generator_table(sub.presentation.values, O.denominator)]
    cfg.write(f"{stem}-generators.txt", "\n".join(tables) + "\n")
    cfg.write(f"{stem}.svg", render_svg(res.domain))
    cfg.write_records(
        f"ford-{stem}",
        [
            {
                "field": rec.field_key,
                "algebra": rec.key,
                "check": name,
                "status": _status(ok),
                "signature": str(res.signature),
                "subgroups": len(res.subgroups),
                "epsilon": res.eps,
            }
            for name, ok in checks.items()
        ],
    )
    _finish(all(checks.values()))


@main.command("render")
@click.argument("field_id")
@click.argument("algebra_id")
@click.option("--size", default=600, show_default=True)
@click.pass_obj
@_run
def render_cmd(cfg: RunConfig, field_id: str, algebra_id: str, size: int) -> None:
    """Write the Ford domain as SVG (to --out, or to standard output)."""
    from .ford import render_svg

    rec, _, _, res = _ford_run(cfg, field_id, algebra_id)
    svg = render_svg(res.domain, size=size)
    path = cfg.write(f"{rec.field_key}-{rec.key}.svg", svg)
    click.echo(str(path) if path is not None else svg, nl=path is not None)


# ---------------------------------------------------------------------------
# areas and bounds


@main.command("degree-bounds")
@click.pass_obj
@_run
def degree_bounds(cfg: RunConfig) -> None:
    """Area lower bounds that rule out fields of degree 7 and more."""
    rep = degree_bound_report()
    ok = rep.degree7_value > rep.four_pi and rep.degree8_value > rep.four_pi
    click.echo(rep.text())
    click.echo(f"degrees 7 and 8 exceed 4 pi: {_status(ok)}")
    cfg.write_records(
        "degree-bounds",
        [
            {
                "degree7": round(rep.degree7_value, 4),
                "degree8": round(rep.degree8_value, 4),
                "degree6_bound": rep.degree6_strict_bound,
                "status": _status(ok),
            }
        ],
    )
    _finish(ok)


@main.command("signatures")
@click.pass_obj
@_run
def signatures_cmd(cfg: RunConfig) -> None:
    """Signatures of groups containing a genus-two surface group with index at least two."""
    sigs = enumerate_genus2_supersignatures()
    for s in sigs:
        click.echo(f"{str(s):<18} area {rh_area(s)} pi, index {4 / rh_area(s)}")
    click.echo(f"{len(sigs)} signatures")
    cfg.write_records("signatures", [{"signature": str(s), "area_over_pi": str(rh_area(s))} for s in sigs])


@main.command("areas")
@click.argument("field_ids", nargs=-1)
@click.pass_obj
@_run
def areas_cmd(cfg: RunConfig, field_ids: tuple[str, ...]) -> None:
    """Coarea of the norm-one group of a maximal order with no finite ramification."""
    cat = cfg.catalog()
    keys = [cat.resolve(f) for f in field_ids] or [k for k, r in cat.fields.items() if r.degree >= 2]
    records = []
    for key in keys:
        K = cat.field(key)
        mu = field_coarea(K, cfg.zeta_bound)
        click.echo(f"{key:<8} degree {K.degree} d_k {K.field_disc:<7} mu = {mu} pi")
        records.append({"field": key, "disc": K.field_disc, "mu_over_pi": str(mu)})
    cfg.write_records("areas", records)


if __name__ == "__main__":
    main()
