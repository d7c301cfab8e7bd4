"""Vertex orderings with few backward edges and the high-degree vertex sets
built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .tournament import Tournament


@dataclass(frozen=True)
class Ordering:
    perm: tuple[int, ...]
    backward_count: int


def count_backward(T: Tournament, perm: tuple[int, ...] | list[int]) -> int:
    """Number of edges ``perm[i] -> perm[j]`` with ``i > j``."""
    idx = np.asarray(perm, dtype=np.intp)
    sub = T.adj[np.ix_(idx, idx)]
    return int(np.tril(sub, -1).sum())


def low_backward_ordering(T: Tournament) -> Ordering:
    """Local minimum of the backward-edge count under single-vertex moves.

    Starts from the decreasing out-degree order and repeatedly relocates a
    vertex to the position that removes the most backward edges. Every move
    strictly lowers the count, so the loop terminates. At the fixed point a
    vertex at 1-based position ``i`` has in-degree at least ``i // 2`` and
    out-degree at least ``(n + 1 - i) // 2``: moving it to either end would
    otherwise help.
    """
    n = T.n
    out = T.out_degrees()
    order = sorted(range(n), key=lambda v: (-int(out[v]), v))
    adj = T.adj.astype(np.int64)
    improved = True
    while improved:
        improved = False
        for v in list(order):
            p = order.index(v)
            rest = order[:p] + order[p + 1:]
            o = adj[v, rest]
            prefix = np.concatenate(([0], np.cumsum(o)))
            q = np.arange(n)
            # v inserted before rest[q]: backward edges out of v to the left,
            # into v from the right
            cost = prefix + (n - 1 - q) - (prefix[-1] - prefix)
            best = int(np.argmin(cost))
            if cost[best] < cost[p]:
                rest.insert(best, v)
                order = rest
                improved = True
    perm = tuple(order)
    return Ordering(perm, count_backward(T, perm))


@dataclass(frozen=True)
class DegreeSet:
    """Vertices meeting a two-sided degree threshold.

    ``degenerate`` is set when fewer vertices qualify than the bound promises
    (rounding at tiny ``n``); ``members`` then holds only the genuine ones.
    """

    members: tuple[int, ...]
    threshold: Fraction
    target_size: int
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def _as_fraction(eps) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
    return eps


def high_degree_core(T: Tournament, eps) -> DegreeSet:
    """The middle ``ceil((1-eps) n)`` vertices of :func:`low_backward_ordering`
    that have out- and in-degree at least ``eps * n / 4`` in ``T``."""
    eps = _as_fraction(eps)
    n = T.n
    threshold = eps * n / 4
    size = math.ceil((1 - eps) * n)
    start = (n - size) // 2
    perm = low_backward_ordering(T).perm
    window = perm[start:start + size]
    members = tuple(
        v for v in window
        if T.out_masks[v].bit_count() >= threshold and T.in_masks[v].bit_count() >= threshold
    )
    return DegreeSet(members, threshold, size, degenerate=len(members) < size)


@dataclass(frozen=True)
class SimilarDegreeSet:
    members: tuple[int, ...]
    bucket: int
    target_size: Fraction
    feasible: bool


def similar_degree_set(T: Tournament, eps, t: int) -> SimilarDegreeSet:
    """Pigeonhole over out-degree windows ``[j t, (j + 1) t)`` applied to
    :func:`high_degree_core`; the largest window wins, lowest ``j`` on ties.

    ``feasible`` is false when the winning window holds fewer than
    ``(1 - eps) t`` vertices; the members are still reported.
    """
    eps = _as_fraction(eps)
    if not 1 <= t <= T.n:
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={T.n}")
    core = high_degree_core(T, eps)
    target = (1 - eps) * t
    buckets: dict[int, list[int]] = {}
    for v in core.members:
        buckets.setdefault(T.out_masks[v].bit_count() // t, []).append(v)
    if not buckets:
        return SimilarDegreeSet((), -1, target, feasible=target <= 0)
    best = min(buckets, key=lambda j: (-len(buckets[j]), j))
    members = tuple(sorted(buckets[best]))
    return SimilarDegreeSet(members, best, target, feasible=len(members) >= target)
