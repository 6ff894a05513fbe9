"""Command-line front end.

Exit codes: 0 verified/passed, 1 failed or inconclusive, 2 usage error.
"""

from __future__ import annotations

import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from .interval import Interval, validate_precision
from .gaussian import BellmanParams, j_deriv, j_value, verify_j_lower_bound
from .bellman import B_value, G1_value, G2_value, G_value, L_value, Q_value
from .report import Report
from . import analytic, cube, partition

_F = Fraction


def _parse_rational(_ctx, _param, value):
    if value is None:
        return None
    if "." in value or "e" in value.lower():
        raise click.BadParameter("exact rational required (NUM/DEN), decimals are rejected")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(str(exc))


def _default_precision() -> int:
    env = os.environ.get("ISOPERIM_PRECISION")
    if env:
        try:
            return validate_precision(int(env))
        except (ValueError, TypeError) as exc:
            raise click.ClickException(f"bad ISOPERIM_PRECISION: {exc}")
    return 64


def _parse_ladder(_ctx, _param, value):
    if value is None:
        return None
    try:
        ladder = tuple(validate_precision(int(v)) for v in value.split(","))
    except (ValueError, TypeError) as exc:
        raise click.BadParameter(str(exc))
    if not ladder:
        raise click.BadParameter("empty precision ladder")
    return ladder


def _emit(report: Report, report_out: str | None) -> None:
    click.echo(report.render())
    if report_out:
        Path(report_out).write_text(report.to_json() + "\n")


def _params(w: Fraction | None) -> BellmanParams:
    w = w if w is not None else _F(29, 32)
    if not 0 < w < 1:
        raise click.ClickException("w must lie strictly between 0 and 1")
    return BellmanParams.create(w=w)


@click.group()
def main() -> None:
    """Rigorous verification of the sqrt-edge-boundary isoperimetric bound."""


@main.command()
@click.option("--claim", "claim_id", default=None, help="Single claim id to verify.")
@click.option("--all", "run_all", is_flag=True, help="Verify every registered claim.")
@click.option("--w", callback=_parse_rational, default=None, help="Exact rational weight NUM/DEN.")
@click.option("--max-depth", default=partition.DEFAULT_MAX_DEPTH, show_default=True)
@click.option("--precision", default=None, type=int, help="Base working precision in bits.")
@click.option("--ladder", callback=_parse_ladder, default=None,
              help="Comma-separated escalation precisions.")
@click.option("--jobs", default=1, show_default=True, help="Parallel claim workers.")
@click.option("--certificate-out", default=None, help="Directory for certificate files.")
@click.option("--report-out", default=None, help="Path for the structured report.")
@click.option("--skip-analytic", is_flag=True, help="Claims only, no point-check suites.")
def verify(claim_id, run_all, w, max_depth, precision, ladder, jobs,
           certificate_out, report_out, skip_analytic) -> None:
    """Certify the dyadic claims (and run the analytic point checks)."""
    if bool(claim_id) == bool(run_all):
        raise click.UsageError("pass exactly one of --claim ID or --all")
    base = precision if precision is not None else _default_precision()
    ladder = ladder or tuple(p for p in partition.DEFAULT_LADDER if p >= base) or (base,)
    if ladder[0] != base:
        ladder = (base,) + ladder
    if claim_id is not None and claim_id not in partition.CLAIMS:
        click.echo(f"unknown claim id {claim_id!r}; registered claims: "
                   f"{', '.join(partition.claim_ids())}", err=True)
        sys.exit(2)
    p = _params(w)
    ids = [claim_id] if claim_id else None
    report, certs = partition.verify_all(
        p, max_depth=max_depth, ladder=ladder, jobs=jobs,
        include_analytic=run_all and not skip_analytic, claims=ids,
    )
    if certificate_out:
        outdir = Path(certificate_out)
        outdir.mkdir(parents=True, exist_ok=True)
        for cid, cert in certs.items():
            (outdir / f"{cid}.cert.json").write_text(cert.to_text() + "\n")
    _emit(report, report_out)
    sys.exit(0 if report.passed else 1)


@main.command("check-certificate")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--w", callback=_parse_rational, default=None)
def check_certificate(path, w) -> None:
    """Independently re-verify a certificate file."""
    try:
        cert = partition.Certificate.from_text(Path(path).read_text())
    except Exception as exc:  # malformed input is a usage error
        click.echo(f"cannot parse certificate: {exc}", err=True)
        sys.exit(2)
    try:
        ok = partition.check_certificate(cert, _params(w) if w else None)
    except KeyError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    click.echo(f"{cert.claim_id}: {'OK' if ok else 'REJECTED'}")
    sys.exit(0 if ok else 1)


@main.command("cube")
@click.option("--n", required=True, type=int)
@click.option("--theorem", required=True,
              type=click.Choice(["main", "sharpening", "partition", "poincare",
                                 "hellinger", "ball"]))
@click.option("--sample", default=None, type=int, help="Sampled subset count for large n.")
@click.option("--seed", default=0, show_default=True)
@click.option("--w", callback=_parse_rational, default=None)
@click.option("--r", "radius", default=None, type=int, help="Ball radius (theorem=ball).")
@click.option("--beta", callback=_parse_rational, default=None, help="Ball moment exponent.")
@click.option("--report-out", default=None)
def cube_cmd(n, theorem, sample, seed, w, radius, beta, report_out) -> None:
    """Exact discrete verification on the n-dimensional cube."""
    try:
        if theorem == "main":
            if n > cube.EXHAUSTIVE_SUBSET_LIMIT and sample is None:
                raise click.UsageError(f"n={n} needs --sample")
            report = cube.check_main_theorem(n, _params(w), sample=sample, seed=seed)
        elif theorem == "sharpening":
            report = cube.check_sharpening(n)
        elif theorem == "partition":
            report = cube.check_kahn_park(n)
        elif theorem == "poincare":
            report = cube.check_poincare(n)
        elif theorem == "hellinger":
            report = cube.check_sensitivity_lower(n)
        else:
            r = radius if radius is not None else n // 2
            b = beta if beta is not None else _F(1, 2)
            rec = cube.hamming_ball_profile(n, r, b)
            click.echo(
                f"n={n} r={r} beta={b}: measure={rec['measure']} "
                f"moment in [{float(rec['moment'].lo):.12g}, {float(rec['moment'].hi):.12g}]"
            )
            sys.exit(0)
    except ValueError as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    _emit(report, report_out)
    sys.exit(0 if report.passed else 1)


@main.command()
@click.option("--w", callback=_parse_rational, default=None)
@click.option("--precision", default=None, type=int)
def constants(w, precision) -> None:
    """Print the derived constants of the piecewise construction."""
    p = _params(w)
    prec = precision if precision is not None else p.prec

    def show(name, iv):
        click.echo(f"{name:28s} [{iv.lo}, {iv.hi}]")

    show("gamma", p.gamma)
    click.echo(f"{'x1':28s} {p.x1}")
    show("I(1/(2w))", p.i_at_half_inv_w)
    show("J(x1)", j_value(Interval.point(p.x1, prec), p, prec))
    show("J(1/2)", j_value(Interval.point(_F(1, 2), prec), p, prec))
    show("J'(1/2)", j_deriv(Interval.point(_F(1, 2), prec), p, prec))
    jreport = verify_j_lower_bound(p)
    click.echo(jreport.render())
    sys.exit(0 if jreport.passed else 1)


_EVAL_FNS = {
    "L": lambda x, y, p, prec: L_value(x, prec),
    "Q": lambda x, y, p, prec: Q_value(x, prec),
    "J": lambda x, y, p, prec: j_value(x, p, prec),
    "B": lambda x, y, p, prec: B_value(x, p, prec),
    "G1": G1_value,
    "G2": G2_value,
    "G": G_value,
}


@main.command("eval")
@click.option("--fn", required=True, type=click.Choice(list(_EVAL_FNS)))
@click.option("--x", callback=_parse_rational, required=True)
@click.option("--y", callback=_parse_rational, default=None)
@click.option("--w", callback=_parse_rational, default=None)
@click.option("--precision", default=None, type=int)
def eval_cmd(fn, x, y, w, precision) -> None:
    """Evaluate a registered function at exact rational arguments."""
    p = _params(w)
    prec = precision if precision is not None else _default_precision()
    needs_y = fn in ("G1", "G2", "G")
    if needs_y and y is None:
        raise click.UsageError(f"--fn {fn} needs --y")
    xi = Interval.point(x, prec)
    yi = Interval.point(y, prec) if y is not None else None
    try:
        v = _EVAL_FNS[fn](xi, yi, p, prec)
    except Exception as exc:
        click.echo(str(exc), err=True)
        sys.exit(2)
    click.echo(f"{fn}({x}{', ' + str(y) if needs_y else ''}) in [{v.lo}, {v.hi}]")
    sys.exit(0)


if __name__ == "__main__":
    main()
