"""Success rate of the transitive-tournament engine as n/k grows.

Writes one CSV row per trial plus the JSON summary, then prints the
success-rate table. Example::

    python3 scripts/tt_ratio_sweep.py --k 4 --ratios 3 4 5 6 8 10 --trials 50
"""

from dataclasses import dataclass
from pathlib import Path

from _config import parse_config
from immersions.experiment import plan_trials, run_experiment


@dataclass(frozen=True)
class SweepConfig:
    """Transitive-tournament ratio sweep."""

    k: tuple[int, ...] = (4,)
    ratios: tuple[float, ...] = (3, 4, 5, 6, 7, 8, 9, 10)
    trials: int = 50
    first_seed: int = 0
    mode: str = "adaptive"
    workers: int = 1
    out_dir: str = "results/tt_sweep"


def main(cfg: SweepConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = list(range(cfg.first_seed, cfg.first_seed + cfg.trials))
    specs = plan_trials("tt", list(cfg.k), list(cfg.ratios), seeds, "random", config={"mode": cfg.mode})
    summary = run_experiment(specs, out / "trials.csv", out / "summary.json", workers=cfg.workers)
    print(f"{'k':>3} {'n/k':>5} {'n':>5} {'success':>8}")
    for cell in summary["cells"]:
        print(f"{cell['k']:>3} {cell['ratio']:>5g} {cell['n']:>5} {cell['success_rate']:>8.2f}")
    return summary


if __name__ == "__main__":
    main(parse_config(SweepConfig))
