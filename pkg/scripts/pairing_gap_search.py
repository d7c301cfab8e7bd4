"""Random search for pairing instances that satisfy the pairing hypothesis
yet make the greedy pass stick.

Instances are two hyperedges of size ``m`` sharing one last element, with
every degree just above the largest bar that hyperedges of that size are
checked against. The two groups draw neighbours from disjoint halves of
``B`` (overlapping pools let both groups pick the same low partners, which
rarely blocks anything); the shared element draws from both. Reports the
first stuck instance and whether a valid pairing exists for it.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from _config import parse_config
from immersions.errors import PairingContractError
from immersions.pairing import Pairing, PairingInstance, check_hypothesis, greedy_pairing, verify_pairing


@dataclass(frozen=True)
class GapSearchConfig:
    """Greedy pairing gap search."""

    hyperedge_size: int = 7
    half: int = 10
    attempts: int = 2000
    seed: int = 0


def _exists(inst: PairingInstance) -> Pairing | None:
    # exhaustive over the shared element's choice; the two groups are then independent matchings
    for choice in inst.adj[-1]:
        partner = [-1] * inst.a_size
        partner[-1] = choice
        ok = True
        for F in inst.hyperedges:
            taken = {choice}
            for a in sorted(F - {inst.a_size - 1}):
                b = next((b for b in inst.adj[a] if b not in taken), None)
                if b is None:
                    ok = False
                    break
                partner[a] = b
                taken.add(b)
        if ok:
            p = Pairing(tuple(partner))
            if verify_pairing(inst, p) is None:
                return p
    return None


def main(cfg: GapSearchConfig):
    rng = np.random.default_rng(cfg.seed)
    m = cfg.hyperedge_size
    top = m.bit_length() - 1
    degree = 2 ** (top + 1) + 1
    last = 2 * (m - 1)
    for attempt in range(cfg.attempts):
        b_size = 2 * cfg.half
        adj = [rng.choice(cfg.half, size=degree, replace=False).tolist() for _ in range(m - 1)]
        adj += [(cfg.half + rng.choice(cfg.half, size=degree, replace=False)).tolist() for _ in range(m - 1)]
        adj.append(rng.choice(b_size, size=degree, replace=False).tolist())
        hyper = [list(range(m - 1)) + [last], list(range(m - 1, last)) + [last]]
        inst = PairingInstance.build(b_size, adj, hyper)
        if check_hypothesis(inst) is not None:
            continue
        try:
            greedy_pairing(inst)
        except PairingContractError as exc:
            witness = _exists(inst)
            print(f"attempt {attempt}: greedy stuck at element {exc.element}; "
                  f"valid pairing {'exists' if witness else 'not found by the simple search'}")
            return inst, witness
    print("no stuck instance found")
    return None, None


if __name__ == "__main__":
    main(parse_config(GapSearchConfig))
