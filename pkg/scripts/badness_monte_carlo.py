"""Empirical badness frequency of a fixed vertex against the analytic bound.

For each sampling probability ``p`` the vertex in the middle of the
out-degree order is tracked over many independent samples; the script prints
the frequency with which it is sampled and bad next to ``c(p)``. The bound
is far from tight at these sizes; the comparison is a sanity check only.
"""

import math
from dataclasses import dataclass

import numpy as np

from _config import parse_config
from immersions.bounds import badness_probability_bound
from immersions.generators import random_tournament
from immersions.tt import degree_ordering, is_in_bad, is_out_bad


@dataclass(frozen=True)
class MonteCarloConfig:
    """Badness Monte Carlo."""

    n: int = 300
    p_values: tuple[float, ...] = (0.001, 0.003, 0.01, 0.03)
    trials: int = 5000
    seed: int = 0


def main(cfg: MonteCarloConfig) -> list[tuple[float, float, float]]:
    T = random_tournament(cfg.n, cfg.seed)
    view = degree_ordering(T)
    x = view.order[cfg.n // 2]
    rng = np.random.default_rng(cfg.seed)
    out = []
    print(f"{'p':>8} {'freq':>10} {'3 sigma':>10} {'c(p)':>12}")
    for p in cfg.p_values:
        hits = 0
        for _ in range(cfg.trials):
            S = set(np.flatnonzero(rng.random(cfg.n) < p).tolist())
            if x in S and (is_in_bad(view, S, x) or is_out_bad(view, S, x)):
                hits += 1
        freq = hits / cfg.trials
        sigma = math.sqrt(max(freq * (1 - freq), 1e-12) / cfg.trials)
        try:
            c = badness_probability_bound(p)
        except ValueError:
            c = math.inf
        out.append((p, freq, c))
        print(f"{p:>8g} {freq:>10.5f} {3 * sigma:>10.5f} {c:>12.5g}")
    return out


if __name__ == "__main__":
    main(parse_config(MonteCarloConfig))
