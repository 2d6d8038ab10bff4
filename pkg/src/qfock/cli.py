"""Command-line front end producing CSV/JSON artifacts.

Output is deterministic: 17 significant digits, "\n" line endings, dot
decimal separator, fixed header strings.  Data goes to --out (or stdout);
diagnostics go to stderr.  Exit codes: 0 success, 1 failed verification or
inconclusive verdict, 2 configuration errors.

Default tolerances and truncation orders can be overridden through
environment variables with the QFOCK_ prefix: QFOCK_TOL_PRODUCT,
QFOCK_TOL_QUAD, QFOCK_KMAX, QFOCK_LEVEL, QFOCK_CELLS, QFOCK_NODES.
"""

from __future__ import annotations

import json
import math
import os
import sys

import click
import numpy as np

Q_MIN, Q_MAX = 1e-6, 1.0 - 1e-6


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return default if raw is None else float(raw)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return default if raw is None else int(raw)


def _check_q(q: float) -> float:
    if not (Q_MIN <= q <= Q_MAX):
        raise click.UsageError(f"--q must lie in [{Q_MIN}, {Q_MAX}]")
    return q


def _context(q: float):
    from .qspecial import QContext

    return QContext(
        q,
        tol_product=_env_float("QFOCK_TOL_PRODUCT", 1e-14),
        tol_quad=_env_float("QFOCK_TOL_QUAD", 1e-9),
        K=_env_int("QFOCK_KMAX", 24),
        N=_env_int("QFOCK_LEVEL", 6),
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


@click.group()
def main():
    """Deformed Fock-space numerics: density, involution, reflection
    coefficients, fourth moments, and the structural verification suite."""


@main.command()
@click.option("--q", type=float, required=True, help="Deformation parameter in [1e-6, 1-1e-6].")
@click.option("--points", "points", type=int, default=501, show_default=True, help="Number of uniform sample points on [-L, L].")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def density(q: float, points: int, out: str | None):
    """Density samples as CSV `x,pdf` on a uniform grid of the support."""
    from .qspecial import DensityModel

    _check_q(q)
    if points < 2:
        raise click.UsageError("--points must be >= 2")
    ctx = _context(q)
    model = DensityModel(ctx)
    xs = np.linspace(-ctx.L, ctx.L, points)
    pdf = model.evaluate(xs)
    lines = ["x,pdf"] + [f"{_fmt(x)},{_fmt(p)}" for x, p in zip(xs, pdf)]
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--q", type=float, required=True, help="Deformation parameter in [1e-6, 1-1e-6].")
@click.option("--points", "points", type=int, default=501, show_default=True, help="Number of uniform sample points on [-L, L].")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def gamma(q: float, points: int, out: str | None):
    """Involution samples as CSV `x,gamma` (the two monotone branches with
    gamma(0) = gamma(+-L) = 0)."""
    from .involution import GammaMap
    from .qspecial import CdfModel

    _check_q(q)
    if points < 2:
        raise click.UsageError("--points must be >= 2")
    ctx = _context(q)
    g = GammaMap(ctx, CdfModel(ctx, n_cells=_env_int("QFOCK_CELLS", 4096)))
    xs = np.linspace(-ctx.L, ctx.L, points)
    ys = g(xs)
    lines = ["x,gamma"] + [f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys)]
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--q", type=float, required=True, help="Deformation parameter in [1e-6, 1-1e-6].")
@click.option("--kmax", type=int, default=24, show_default=True, help="Largest coefficient index.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def wcoeff(q: float, kmax: int, out: str | None):
    """First reflection column as CSV `k,w_k1,contrib`, contrib = w_k1^2 [k]_q!."""
    from .involution import GammaMap
    from .qspecial import CdfModel
    from .transform import w_matrix

    _check_q(q)
    if kmax < 1:
        raise click.UsageError("--kmax must be >= 1")
    ctx = _context(q)
    g = GammaMap(ctx, CdfModel(ctx, n_cells=_env_int("QFOCK_CELLS", 4096)))
    wc = w_matrix(ctx, g, K=kmax)
    lines = ["k,w_k1,contrib"]
    for k in range(kmax + 1):
        lines.append(f"{k},{_fmt(wc.w[k, 1])},{_fmt(wc.what[k, 1] ** 2)}")
    click.echo(f"tail mass beyond k={kmax}: {_fmt(wc.col_tail_mass[1])}", err=True)
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--q", type=float, required=True, help="Deformation parameter in [1e-6, 1-1e-6].")
@click.option("--kmax", type=int, default=None, help="Coefficient cutoff override.")
@click.option("--level", type=int, default=None, help="Fock level cutoff override for the matrix route.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def moment4(q: float, kmax: int | None, level: int | None, out: str | None):
    """Fourth-moment report as flat JSON; exits 1 on an inconclusive verdict."""
    from .moments import theorem_check

    _check_q(q)
    rep = theorem_check(q, K=kmax, N=level, n_cells=_env_int("QFOCK_CELLS", 4096))
    _emit(json.dumps(rep.to_json_dict(), indent=2, sort_keys=True) + "\n", out)
    if rep.verdict != "strict":
        click.echo(f"verdict inconclusive at q={q}: margin {rep.margin} within error budget", err=True)
        sys.exit(1)


@main.command()
@click.option("--qmin", type=float, default=0.02, show_default=True, help="Smallest deformation value.")
@click.option("--qmax", type=float, default=0.98, show_default=True, help="Largest deformation value.")
@click.option("--steps", type=int, default=50, show_default=True, help="Number of grid points.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def sweep(qmin: float, qmax: float, steps: int, out: str | None):
    """Fourth moments across a q grid as CSV `q,m4_sum,m4_gamma,s,margin,tail`."""
    from .moments import sweep as _sweep

    if not (Q_MIN <= qmin < qmax <= Q_MAX):
        raise click.UsageError(f"need {Q_MIN} <= qmin < qmax <= {Q_MAX}")
    if steps < 2:
        raise click.UsageError("--steps must be >= 2")
    grid = np.linspace(qmin, qmax, steps)
    rows = _sweep(grid, n_cells=_env_int("QFOCK_CELLS", 2048))
    failed = [r for r in rows if "error" in r]
    for r in failed:
        click.echo(f"q={r['q']}: {r['error']}", err=True)
    lines = ["q,m4_sum,m4_gamma,s,margin,tail"]
    for r in rows:
        if "error" in r:
            continue
        lines.append(
            ",".join(_fmt(r[k]) for k in ("q", "m4_sum", "m4_gamma", "s", "margin", "tail"))
        )
    _emit("\n".join(lines) + "\n", out)
    if failed:
        sys.exit(1)


@main.command()
@click.option("--q", type=float, required=True, help="Deformation parameter in [1e-6, 1-1e-6].")
@click.option("--level", type=int, default=6, show_default=True, help="Fock level cutoff for the structural checks.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Output file (default: stdout).")
def verify(q: float, level: int, out: str | None):
    """Run every invariant suite and report pass/fail per item as JSON;
    exit code 0 iff all pass.

    Thresholds on truncation-limited items (involutivity of the finite
    reflection, its vacuum-moment match) are certified truncation budgets
    plus quadrature slack; all structurally exact items use absolute
    tolerances.
    """
    from .verify import run_verification

    _check_q(q)
    if level < 4:
        raise click.UsageError("--level must be >= 4")
    report = run_verification(q, level, n_cells=_env_int("QFOCK_CELLS", 4096))
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", out)
    if not report["all_pass"]:
        bad = [item["name"] for item in report["items"] if not item["pass"]]
        click.echo(f"verification failed: {', '.join(bad)}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
