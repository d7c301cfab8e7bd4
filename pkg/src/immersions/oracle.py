"""Exhaustive ground truth for small instances.

The search walks branch sets in lexicographic order (ordered tuples for the
transitive pattern, where position matters), enumerates every admissible
path per required pair, and backtracks over path choices with edge
disjointness as the only coupling. A node budget bounds the work; running
out of budget yields ``UNKNOWN``, which is never conflated with a proof of
non-existence.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .errors import SizeError
from .immersion import Immersion, Pattern
from .tournament import Tournament, bits
from .verify import verify_immersion

log = logging.getLogger(__name__)


class Status(enum.Enum):
    FOUND = "found"
    EXHAUSTED = "exhausted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleResult:
    status: Status
    immersion: Immersion | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND


class _BudgetExceeded(Exception):
    pass


def _paths(T: Tournament, u: int, w: int, max_len: int, forbidden: int) -> list[tuple[int, ...]]:
    """Simple paths ``u -> w`` with at most ``max_len`` edges whose internal
    vertices avoid ``forbidden``; sorted by length, then lexicographically."""
    found: list[tuple[int, ...]] = []
    out = T.out_masks
    target = 1 << w

    def walk(path: list[int], seen: int) -> None:
        last = path[-1]
        if out[last] & target:
            found.append((*path, w))
        if len(path) < max_len:
            for v in bits(out[last] & ~seen & ~forbidden & ~target):
                path.append(v)
                walk(path, seen | (1 << v))
                path.pop()

    walk([u], 1 << u)
    found.sort(key=lambda p: (len(p), p))
    return found


def _branch_tuples(T: Tournament, pattern: Pattern, k: int):
    out = T.out_degrees()
    inn = T.in_degrees()
    for combo in combinations(range(T.n), k):
        if pattern is Pattern.COMPLETE:
            if all(out[v] >= k - 1 and inn[v] >= k - 1 for v in combo):
                yield combo
            continue
        for order in permutations(combo):
            # the i-th branch starts k-1-i paths and ends i paths
            if all(out[v] >= k - 1 - i and inn[v] >= i for i, v in enumerate(order)):
                yield order


def _search_branches(T: Tournament, pattern: Pattern, branches: tuple[int, ...], max_len: int,
                     strong: bool, counter: list[int], budget: int) -> dict | None:
    forbidden = 0
    if strong:
        for b in branches:
            forbidden |= 1 << b
    pairs = pattern.required_pairs(branches)
    options = {}
    for u, w in pairs:
        cands = _paths(T, u, w, max_len, forbidden)
        if not cands:
            return None
        options[(u, w)] = [(p, tuple(zip(p, p[1:]))) for p in cands]
    order = sorted(pairs, key=lambda pr: (len(options[pr]), pr))
    used: set[tuple[int, int]] = set()
    chosen: dict[tuple[int, int], tuple[int, ...]] = {}

    def place(idx: int) -> bool:
        if idx == len(order):
            return True
        pair = order[idx]
        for path, edges in options[pair]:
            counter[0] += 1
            if counter[0] > budget:
                raise _BudgetExceeded
            if any(e in used for e in edges):
                continue
            used.update(edges)
            chosen[pair] = path
            if place(idx + 1):
                return True
            used.difference_update(edges)
            del chosen[pair]
        return False

    return dict(chosen) if place(0) else None


def oracle_find_immersion(T: Tournament, pattern: Pattern, k: int, max_len: int,
                          strong: bool = True, budget: int = 10**7) -> OracleResult:
    """Find an immersion of ``pattern`` on ``k`` branch vertices with paths of
    at most ``max_len`` edges, or prove that none exists."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if k > T.n:
        return OracleResult(Status.EXHAUSTED)
    counter = [0]
    try:
        for branches in _branch_tuples(T, pattern, k):
            counter[0] += 1
            if counter[0] > budget:
                raise _BudgetExceeded
            paths = _search_branches(T, pattern, branches, max_len, strong, counter, budget)
            if paths is not None:
                imm = Immersion(pattern, tuple(branches), paths)
                problem = verify_immersion(T, imm, max_len, strong)
                if problem is not None:  # pragma: no cover - the search only emits valid paths
                    raise AssertionError(f"oracle produced an invalid certificate: {problem}")
                return OracleResult(Status.FOUND, imm, counter[0])
    except _BudgetExceeded:
        log.info("oracle budget %d exhausted", budget)
        return OracleResult(Status.UNKNOWN, None, counter[0])
    return OracleResult(Status.EXHAUSTED, None, counter[0])


def max_outdegree_bound_check(T: Tournament, pattern: Pattern, k: int) -> bool:
    """Fast necessary-condition screen; ``False`` means provably infeasible.

    Transitive pattern: the ``i``-th branch vertex (0-based) starts ``k-1-i``
    edge-disjoint paths, so enough vertices of out-degree ``>= k-1-i`` must
    exist for every ``i``. Complete digraph: ``k`` vertices of out-degree
    ``>= k-1``. Passing the screen proves nothing.
    """
    if k > T.n:
        return False
    out = np.sort(T.out_degrees())[::-1]
    if pattern is Pattern.TRANSITIVE:
        return all(out[i] >= k - 1 - i for i in range(k))
    return bool(out[k - 1] >= k - 1)


@dataclass(frozen=True)
class FBound:
    """Outcome of the exhaustive ``f(k)`` computation.

    ``exact`` is the least ``n`` such that every tournament on ``n`` vertices
    contains the 1-immersion, when that is at most ``n_max``; otherwise
    ``lower_bound = n_max + 1`` and ``witness`` avoids the immersion.
    """

    k: int
    n_max: int
    strong: bool
    exact: int | None
    lower_bound: int
    witness: Tournament | None
    tournaments_checked: int


def all_tournaments(n: int):
    """Every labelled tournament on ``n`` vertices, in orientation-mask order."""
    iu = np.triu_indices(n, 1)
    m = iu[0].size
    for code in range(2 ** m):
        coins = np.array([(code >> e) & 1 for e in range(m)], dtype=bool)
        adj = np.zeros((n, n), dtype=bool)
        adj[iu] = coins
        adj[iu[1], iu[0]] = ~coins
        yield Tournament(adj, validate=False)


def oracle_f_bound(k: int, n_max: int, strong: bool = True, budget: int = 10**7) -> FBound:
    if n_max > 6:
        raise SizeError(f"labelled enumeration is limited to n <= 6, got n_max={n_max}")
    checked = 0
    witness = None
    for n in range(1, n_max + 1):
        witness = None
        for T in all_tournaments(n):
            checked += 1
            res = oracle_find_immersion(T, Pattern.TRANSITIVE, k, max_len=2, strong=strong, budget=budget)
            if res.status is Status.UNKNOWN:
                raise SizeError(f"oracle budget exhausted on a {n}-vertex tournament")
            if res.status is Status.EXHAUSTED:
                witness = T
                break
        if witness is None:
            return FBound(k, n_max, strong, n, n, None, checked)
    return FBound(k, n_max, strong, None, n_max + 1, witness, checked)
