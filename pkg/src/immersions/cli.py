"""Command-line entry point.

Exit codes: ``find`` 0 success, 1 failure, 2 unreadable input, 3 internal
consistency failure. ``verify`` 0 pass, 1 violation, 2 unreadable input.
``oracle find`` 0 found, 1 exhausted, 4 budget ran out.
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from .errors import CertificateFormatError, ConsistencyError, TournamentFormatError
from .experiment import plan_trials, run_experiment
from .generators import GENERATORS
from .immersion import Pattern, parse_certificate
from .kd import DEFAULT_C, find_kd_immersion
from .oracle import Status, oracle_f_bound, oracle_find_immersion
from .tournament import Tournament, parse_tournament
from .tt import TTConfig, find_tt_immersion
from .verify import verify_immersion

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CONSISTENCY, EXIT_UNKNOWN = 0, 1, 2, 3, 4


def _setup_logging() -> None:
    level = os.environ.get("IMMERSION_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def parse_int_list(text: str) -> list[int]:
    """``"3..8"`` (inclusive range) or ``"3,5,7"``; ranges may be mixed in."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_float_list(text: str) -> list[float]:
    if ".." in text and "," not in text:
        return [float(v) for v in parse_int_list(text)]
    return [float(p) for p in text.split(",") if p.strip()]


def _read_tournament(path: str) -> Tournament:
    try:
        return parse_tournament(Path(path).read_text())
    except (OSError, UnicodeDecodeError) as exc:
        raise TournamentFormatError(f"cannot read {path}: {exc}") from exc


def _summary_line(T: Tournament) -> str:
    out = T.out_degrees()
    return f"n={T.n} out-degree min={int(out.min())} max={int(out.max())} mean={float(np.mean(out)):.3f}"


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for generators and sampling.")
@click.option("--workers", type=int, default=1, show_default=True, help="Parallel trials in experiment.")
@click.option("--budget", type=int, default=10**7, show_default=True, help="Oracle node budget.")
@click.option("--best-effort", is_flag=True, help="Run the kd engine below its out-degree threshold.")
@click.pass_context
def cli(ctx: click.Context, seed: int, workers: int, budget: int, best_effort: bool) -> None:
    """Find, verify and certify immersions in tournaments."""
    _setup_logging()
    ctx.obj = {"seed": seed, "workers": workers, "budget": budget, "best_effort": best_effort}


@cli.command()
@click.argument("name", type=click.Choice(sorted(GENERATORS)))
@click.argument("params", nargs=-1)
@click.option("-o", "--out", "out_path", type=click.Path(dir_okay=False), help="Output file (default stdout).")
@click.pass_context
def gen(ctx: click.Context, name: str, params: tuple[str, ...], out_path: str | None) -> None:
    """Generate a tournament. PARAMS are positional values or key=value pairs."""
    fn, names = GENERATORS[name]
    values: dict[str, int] = {}
    positional = []
    try:
        for p in params:
            if "=" in p:
                key, val = p.split("=", 1)
                values[key] = int(val)
            else:
                positional.append(int(p))
    except ValueError as exc:
        raise click.UsageError(f"parameters must be integers: {exc}") from exc
    free = [p for p in names if p not in values]
    if len(positional) > len(free):
        raise click.UsageError(f"{name} takes parameters {', '.join(names)}")
    values.update(zip(free, positional))
    if "seed" in names:
        values.setdefault("seed", ctx.obj["seed"])
    unknown = set(values) - set(names)
    missing = [p for p in names if p not in values]
    if unknown or missing:
        raise click.UsageError(f"{name} takes parameters {', '.join(names)}"
                               + (f"; missing {', '.join(missing)}" if missing else "")
                               + (f"; unknown {', '.join(sorted(unknown))}" if unknown else ""))
    try:
        T = fn(*(values[p] for p in names))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    text = T.to_text()
    if out_path:
        Path(out_path).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(_summary_line(T), err=out_path is None)


@cli.command()
@click.argument("task", type=click.Choice(["tt", "kd"]))
@click.argument("in_path", type=click.Path())
@click.option("-k", type=int, required=True)
@click.option("--mode", type=click.Choice(["adaptive", "faithful"]), default="adaptive", show_default=True)
@click.option("--retries", type=int, default=8, show_default=True)
@click.option("-C", "C", type=int, default=DEFAULT_C, show_default=True, help="Descent constant for kd.")
@click.option("--cert", "cert_path", type=click.Path(dir_okay=False), help="Certificate output (default stdout).")
@click.pass_context
def find(ctx: click.Context, task: str, in_path: str, k: int, mode: str, retries: int, C: int,
         cert_path: str | None) -> None:
    """Search for an immersion and write a verified certificate."""
    try:
        T = _read_tournament(in_path)
    except TournamentFormatError as exc:
        click.echo(f"parse error: {exc}", err=True)
        ctx.exit(EXIT_PARSE)
    try:
        if task == "tt":
            res = find_tt_immersion(T, k, TTConfig(mode=mode, retries=retries, seed=ctx.obj["seed"]))
            imm = res.immersion
            report = (f"status=failure task=tt k={k} n={T.n} best_size={res.best_size} "
                      f"samples={res.samples} reason={res.reason!r}")
            max_len = 2
        else:
            res = find_kd_immersion(T, k, C=C, best_effort=ctx.obj["best_effort"])
            imm = res.immersion
            outcomes = ",".join(s.outcome for s in res.steps) or "-"
            report = (f"status={res.status} task=kd k={k} n={T.n} steps={len(res.steps)} "
                      f"outcomes={outcomes} reason={res.reason!r}")
            max_len = 3
    except ConsistencyError as exc:
        click.echo(f"consistency failure: {exc.name}: {exc.detail}", err=True)
        ctx.exit(EXIT_CONSISTENCY)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_FAIL)
    if imm is None:
        click.echo(report)
        ctx.exit(EXIT_FAIL)
    problem = verify_immersion(T, imm, max_len=max_len, strong=True)
    if problem is not None:
        click.echo(f"consistency failure: certificate: {problem}", err=True)
        ctx.exit(EXIT_CONSISTENCY)
    if cert_path:
        Path(cert_path).write_text(imm.to_text())
        hist = imm.length_histogram()
        click.echo(f"status=success task={task} k={k} n={T.n} lengths="
                   + ",".join(f"{L}:{c}" for L, c in sorted(hist.items())))
    else:
        click.echo(imm.to_text(), nl=False)


@cli.command()
@click.argument("in_path", type=click.Path())
@click.argument("cert_path", type=click.Path())
@click.option("--max-len", type=int, default=None, help="Path length limit (default 2 for TT, 3 for KD).")
@click.option("--strong/--weak", default=True, show_default=True)
@click.pass_context
def verify(ctx: click.Context, in_path: str, cert_path: str, max_len: int | None, strong: bool) -> None:
    """Check a certificate against a tournament."""
    try:
        T = _read_tournament(in_path)
        imm = parse_certificate(Path(cert_path).read_text())
    except (TournamentFormatError, CertificateFormatError, OSError, UnicodeDecodeError) as exc:
        click.echo(f"parse error: {exc}", err=True)
        ctx.exit(EXIT_PARSE)
    if max_len is None:
        max_len = 2 if imm.pattern is Pattern.TRANSITIVE else 3
    problem = verify_immersion(T, imm, max_len=max_len, strong=strong)
    if problem is not None:
        click.echo(f"FAIL {problem}")
        ctx.exit(EXIT_FAIL)
    click.echo(f"OK pattern={imm.pattern.value} k={imm.k} max_len={max_len} strong={strong}")


@cli.group()
def oracle() -> None:
    """Exhaustive search at small scale."""


@oracle.command("find")
@click.argument("in_path", type=click.Path())
@click.option("-k", type=int, required=True)
@click.option("--pattern", type=click.Choice(["tt", "kd"]), required=True)
@click.option("--max-len", type=int, required=True)
@click.option("--strong/--weak", default=True, show_default=True)
@click.option("--cert", "cert_path", type=click.Path(dir_okay=False))
@click.pass_context
def oracle_find(ctx: click.Context, in_path: str, k: int, pattern: str, max_len: int, strong: bool,
                cert_path: str | None) -> None:
    """Decide whether an immersion exists."""
    try:
        T = _read_tournament(in_path)
    except TournamentFormatError as exc:
        click.echo(f"parse error: {exc}", err=True)
        ctx.exit(EXIT_PARSE)
    pat = Pattern.TRANSITIVE if pattern == "tt" else Pattern.COMPLETE
    res = oracle_find_immersion(T, pat, k, max_len, strong=strong, budget=ctx.obj["budget"])
    click.echo(f"status={res.status.value} nodes={res.nodes}")
    if res.status is Status.FOUND:
        if cert_path:
            Path(cert_path).write_text(res.immersion.to_text())
        else:
            click.echo(res.immersion.to_text(), nl=False)
        ctx.exit(EXIT_OK)
    ctx.exit(EXIT_FAIL if res.status is Status.EXHAUSTED else EXIT_UNKNOWN)


@oracle.command("f-bound")
@click.option("-k", type=int, required=True)
@click.option("--n-max", type=int, required=True)
@click.pass_context
def oracle_f(ctx: click.Context, k: int, n_max: int) -> None:
    """Smallest n forcing a 1-immersion of the transitive tournament, both
    with and without the strong requirement."""
    for strong in (True, False):
        fb = oracle_f_bound(k, n_max, strong=strong, budget=ctx.obj["budget"])
        label = "strong" if strong else "weak"
        value = str(fb.exact) if fb.exact is not None else f">{n_max}"
        click.echo(f"f({k}) {label}={value} checked={fb.tournaments_checked}")


@cli.command()
@click.argument("task", type=click.Choice(["tt", "kd", "oracle"]))
@click.option("--k", "k_range", required=True, help="k values, e.g. 3..8 or 2,3.")
@click.option("--ratios", default="3..10", show_default=True, help="n/k ratios (n_max values for oracle).")
@click.option("--n-offset", type=int, default=0, show_default=True, help="Added to round(ratio*k).")
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--seeds", default=None, help="Explicit seed list; default is seed .. seed+trials-1.")
@click.option("--generator", type=click.Choice(["random", "random-regular"]), default="random", show_default=True)
@click.option("--mode", type=click.Choice(["adaptive", "faithful"]), default="adaptive", show_default=True)
@click.option("--out-csv", type=click.Path(dir_okay=False), required=True)
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False), default=None)
@click.option("--cert-dir", type=click.Path(file_okay=False), default=None)
@click.pass_context
def experiment(ctx: click.Context, task: str, k_range: str, ratios: str, n_offset: int, trials: int,
               seeds: str | None, generator: str, mode: str, out_csv: str, summary_path: str | None,
               cert_dir: str | None) -> None:
    """Batch of seeded trials; one CSV row per trial plus a JSON summary."""
    try:
        ks = parse_int_list(k_range)
        ratio_list = parse_float_list(ratios)
        seed_list = parse_int_list(seeds) if seeds else list(range(ctx.obj["seed"], ctx.obj["seed"] + trials))
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    seed_list = seed_list[:trials]
    config: dict = {}
    if task == "tt":
        config = {"mode": mode}
    elif task == "kd":
        config = {"best_effort": ctx.obj["best_effort"]}
    specs = plan_trials(task, ks, ratio_list, seed_list, generator, n_offset, config)
    if task == "oracle" and trials == 0:
        specs = []
    summary = run_experiment(specs, out_csv, summary_path, cert_dir, workers=ctx.obj["workers"])
    for cell in summary["cells"]:
        click.echo(f"k={cell['k']} n={cell['n']} success={cell['successes']}/{cell['trials']}")
    for k, v in summary["f_values"].items():
        click.echo(f"f({k})={v}")


def main() -> None:
    cli(prog_name="immersions")


if __name__ == "__main__":
    main()
