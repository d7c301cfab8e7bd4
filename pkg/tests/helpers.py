"""Instance builders shared by the unit and acceptance suites."""

import numpy as np

from immersions.pairing import PairingInstance, check_hypothesis


def random_hypothesis_instance(rng: np.random.Generator, max_a: int = 200) -> PairingInstance:
    """Random pairing instance repaired until the pairing hypothesis holds.

    Elements are edges of a random multigraph on "owners"; each owner
    contributes one hyperedge, so every element lies in at most two. Degrees
    start log-uniform; members beyond the allowance at a level are lifted
    just above that level's bar.
    """
    a_size = int(rng.integers(1, max_a + 1))
    owners = int(rng.integers(1, max(2, a_size // 2) + 1))
    ends = [tuple(sorted({int(rng.integers(owners)), int(rng.integers(owners))})) for _ in range(a_size)]
    hyper: list[list[int]] = [[] for _ in range(owners)]
    for a, e in enumerate(ends):
        for o in e:
            hyper[o].append(a)
    max_f = max(len(F) for F in hyper)
    b_size = int(rng.integers(2 * max_f + 2, 4 * max_f + 8))
    degree = np.exp(rng.uniform(0, np.log(b_size), a_size)).astype(int).clip(1, b_size)
    # lifting degrees never creates a violation, so one ascending pass suffices
    for F in hyper:
        for i in range(1, len(F).bit_length()):
            bar = 2 ** (i + 1)
            low = sorted((a for a in F if degree[a] <= bar), key=lambda a: (degree[a], a))
            for a in low[2 ** (i - 1):]:
                degree[a] = bar + 1
    adj = [_neighbours(rng, b_size, d) for d in degree]
    inst = PairingInstance.build(b_size, adj, hyper)
    assert check_hypothesis(inst) is None
    return inst


def _neighbours(rng, b_size, d) -> list[int]:
    return rng.choice(b_size, size=int(d), replace=False).tolist()


def stuck_greedy_instance() -> PairingInstance:
    """Hypothesis holds (all degrees 9 > 8, hyperedges of size 7 only see
    levels 1 and 2) yet the twelve earlier elements block all nine
    neighbours of element 12."""
    adj = [list(range(9))] * 6 + [list(range(9, 18))] * 6 + [[0, 1, 2, 3, 4, 9, 10, 11, 12]]
    hyper = [list(range(6)) + [12], list(range(6, 12)) + [12]]
    return PairingInstance.build(18, adj, hyper)
