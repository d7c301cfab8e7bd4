"""Batch experiments: one CSV row per seeded trial plus a JSON summary.

A trial is fully described by its :class:`TrialSpec`; rerunning the spec
reproduces the outcome and the certificate byte for byte. Wall time is the
only column that varies between replays.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import ConsistencyError
from .generators import GENERATORS
from .kd import DEFAULT_C, find_kd_immersion
from .oracle import oracle_f_bound
from .tt import TTConfig, find_tt_immersion

CSV_FIELDS = (
    "trial", "task", "generator", "n", "k", "ratio", "seed", "config",
    "outcome", "detail", "best_size", "steps", "certificate", "wall_time", "checks",
)

SCHEMA_PATH = Path(__file__).with_name("schemas") / "summary.schema.json"


@dataclass(frozen=True)
class TrialSpec:
    trial: int
    task: str  # "tt" | "kd" | "oracle"
    generator: str
    n: int
    k: int
    seed: int
    ratio: float = 0.0
    config: dict = field(default_factory=dict)


@dataclass
class ExperimentRecord:
    trial: int
    task: str
    generator: str
    n: int
    k: int
    ratio: float
    seed: int
    config: str
    outcome: str  # "success" | "failure" | "unknown" | "infeasible" | "error"
    detail: str = ""
    best_size: int | str = ""
    steps: int | str = ""
    certificate: str = ""
    wall_time: float = 0.0
    checks: str = ""


def certificate_name(spec: TrialSpec) -> str:
    return f"{spec.task}_k{spec.k}_n{spec.n}_s{spec.seed}_t{spec.trial}.cert"


def _build(spec: TrialSpec):
    fn, params = GENERATORS[spec.generator]
    values = {"n": spec.n, "seed": spec.seed, "k": spec.k}
    return fn(*(values[p] for p in params))


def run_trial(spec: TrialSpec, cert_dir: str | None = None) -> ExperimentRecord:
    start = time.perf_counter()
    rec = ExperimentRecord(spec.trial, spec.task, spec.generator, spec.n, spec.k, spec.ratio, spec.seed,
                           json.dumps(spec.config, sort_keys=True), outcome="error")
    imm = None
    try:
        if spec.task == "oracle":
            fb = oracle_f_bound(spec.k, spec.n, strong=spec.config.get("strong", True))
            rec.outcome = "success" if fb.exact is not None else "unknown"
            rec.detail = f"f({spec.k})={fb.exact}" if fb.exact is not None else f"f({spec.k})>{spec.n}"
            rec.best_size = fb.exact if fb.exact is not None else fb.lower_bound
        else:
            T = _build(spec)
            if spec.task == "tt":
                cfg = TTConfig(mode=spec.config.get("mode", "adaptive"), seed=spec.seed,
                               retries=spec.config.get("retries", 8))
                res = find_tt_immersion(T, spec.k, cfg)
                imm = res.immersion
                rec.outcome = "success" if res.ok else "failure"
                rec.detail = res.route or res.reason
                rec.best_size = res.best_size
                rec.steps = res.samples
            elif spec.task == "kd":
                res = find_kd_immersion(T, spec.k, C=spec.config.get("C", DEFAULT_C),
                                        best_effort=spec.config.get("best_effort", False))
                imm = res.immersion
                rec.outcome = res.status
                rec.detail = res.reason or "/".join(s.outcome for s in res.steps)
                rec.steps = len(res.steps)
                summary = res.trace.summary()
                rec.checks = ";".join(f"{name}={count}" for name, count in sorted(summary.items()))
            else:
                raise ValueError(f"unknown task {spec.task!r}")
    except ConsistencyError as exc:
        rec.outcome = "error"
        rec.detail = f"consistency:{exc.name}"
    except ValueError as exc:
        rec.outcome = "error"
        rec.detail = str(exc)
    if imm is not None and cert_dir is not None:
        path = Path(cert_dir) / certificate_name(spec)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(imm.to_text())
        rec.certificate = str(path)
    rec.wall_time = round(time.perf_counter() - start, 6)
    return rec


def plan_trials(task: str, ks: list[int], ratios: list[float], seeds: list[int], generator: str,
                n_offset: int = 0, config: dict | None = None) -> list[TrialSpec]:
    config = dict(config or {})
    specs = []
    if task == "oracle":
        # ratios double as n_max values for the oracle
        for k in ks:
            for n_max in ratios:
                specs.append(TrialSpec(len(specs), task, "exhaustive", int(n_max), k, 0, float(n_max), config))
        return specs
    for k in ks:
        for ratio in ratios:
            n = int(round(ratio * k)) + n_offset
            for seed in seeds:
                specs.append(TrialSpec(len(specs), task, generator, n, k, seed, float(ratio), config))
    return specs


def _run_one(args):
    spec, cert_dir = args
    return run_trial(spec, cert_dir)


def run_experiment(specs: list[TrialSpec], out_csv: str | Path, summary_path: str | Path | None = None,
                   cert_dir: str | None = None, workers: int = 1) -> dict:
    """Run every trial, write the CSV (rows in trial order) and the summary."""
    jobs = [(s, cert_dir) for s in specs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with out_csv.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow(asdict(rec))
    summary = summarize(specs, records)
    if summary_path is None:
        summary_path = out_csv.with_suffix(".summary.json")
    Path(summary_path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def summarize(specs: list[TrialSpec], records: list[ExperimentRecord]) -> dict:
    cells: dict[tuple[int, float], dict] = {}
    f_values: dict[str, str] = {}
    for rec in records:
        if rec.task == "oracle":
            f_values[str(rec.k)] = rec.detail.split("=", 1)[1] if "=" in rec.detail else rec.detail
            continue
        cell = cells.setdefault((rec.k, rec.ratio), {
            "k": rec.k, "ratio": rec.ratio, "n": rec.n, "trials": 0, "successes": 0, "errors": 0,
        })
        cell["trials"] += 1
        cell["successes"] += rec.outcome == "success"
        cell["errors"] += rec.outcome == "error"
    out_cells = []
    for key in sorted(cells):
        cell = cells[key]
        cell["success_rate"] = cell["successes"] / cell["trials"] if cell["trials"] else 0.0
        out_cells.append(cell)
    task = specs[0].task if specs else ""
    return {"task": task, "trials": len(records), "cells": out_cells, "f_values": f_values}
