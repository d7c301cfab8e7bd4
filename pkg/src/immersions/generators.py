"""Tournament generators: seeded random models and the extremal constructions."""

from __future__ import annotations

import numpy as np

from .errors import EmptyInputError, ParityError, SizeError
from .tournament import Tournament


def _require_positive(n: int) -> None:
    if n < 1:
        raise EmptyInputError(f"need at least one vertex, got n={n}")


def random_tournament(n: int, seed: int) -> Tournament:
    """Each pair oriented by an independent fair coin drawn from ``seed``."""
    _require_positive(n)
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    iu = np.triu_indices(n, 1)
    coins = rng.random(iu[0].size) < 0.5
    adj[iu] = coins
    adj[iu[1], iu[0]] = ~coins
    return Tournament(adj, validate=False)


def transitive_tournament(n: int) -> Tournament:
    _require_positive(n)
    return Tournament(np.triu(np.ones((n, n), dtype=bool), 1), validate=False)


def _rotational(m: int) -> np.ndarray:
    idx = np.arange(m)
    diff = (idx[None, :] - idx[:, None]) % m
    return (diff >= 1) & (diff <= (m - 1) // 2)


def regular_tournament(n: int) -> Tournament:
    """Circulant tournament: ``i -> i + j (mod n)`` for ``j = 1..(n-1)/2``."""
    _require_positive(n)
    if n % 2 == 0:
        raise ParityError(f"regular tournaments need odd order, got n={n}")
    return Tournament(_rotational(n), validate=False)


def random_regular_tournament(n: int, seed: int, mixing: int | None = None) -> Tournament:
    """A random regular tournament on odd ``n``.

    Starts from the circulant tournament under a random relabelling, then
    reverses ``mixing`` randomly chosen directed triangles (each reversal
    keeps every out-degree fixed). Defaults to ``n * n`` triangle proposals.
    """
    base = regular_tournament(n)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    adj = np.array(base.adj)[np.ix_(perm, perm)]
    if n >= 3:
        steps = n * n if mixing is None else mixing
        triples = rng.integers(0, n, size=(steps, 3))
        for u, v, w in triples.tolist():
            if u == v or v == w or u == w:
                continue
            if adj[u, v] and adj[v, w] and adj[w, u]:
                adj[u, v] = adj[v, w] = adj[w, u] = False
                adj[v, u] = adj[w, v] = adj[u, w] = True
            elif adj[v, u] and adj[w, v] and adj[u, w]:
                adj[v, u] = adj[w, v] = adj[u, w] = False
                adj[u, v] = adj[v, w] = adj[w, u] = True
    return Tournament(adj, validate=False)


def triangle_blowup(a: int, b: int, c: int) -> Tournament:
    """Parts ``A = [0, a)``, ``B``, ``C`` with ``A -> B -> C -> A``; each part
    is transitive in increasing index."""
    if min(a, b, c) < 1:
        raise EmptyInputError(f"every part needs a vertex, got sizes ({a}, {b}, {c})")
    n = a + b + c
    part = np.repeat([0, 1, 2], [a, b, c])
    same = part[:, None] == part[None, :]
    idx = np.arange(n)
    forward_inside = same & (idx[:, None] < idx[None, :])
    cyclic = (part[None, :] - part[:, None]) % 3 == 1
    return Tournament(forward_inside | cyclic, validate=False)


def min_outdegree_construction(k: int, n: int) -> Tournament:
    """Transitive tournament on ``n`` vertices whose ``2k-3`` vertices of
    smallest out-degree are rewired into the circulant regular tournament.

    The result has minimum out-degree ``k-2``, and no edge leaves the bottom
    part, so no complete digraph on ``k`` vertices immerses in it.
    """
    if k < 2:
        raise SizeError(f"need k >= 2, got k={k}")
    m = 2 * k - 3
    if n < m:
        raise SizeError(f"need n >= 2k-3 = {m}, got n={n}")
    adj = np.triu(np.ones((n, n), dtype=bool), 1)
    lo = n - m
    adj[lo:, lo:] = _rotational(m)
    return Tournament(adj, validate=False)


GENERATORS = {
    "random": (random_tournament, ("n", "seed")),
    "random-regular": (random_regular_tournament, ("n", "seed")),
    "transitive": (transitive_tournament, ("n",)),
    "regular": (regular_tournament, ("n",)),
    "triangle-blowup": (triangle_blowup, ("a", "b", "c")),
    "min-outdegree": (min_outdegree_construction, ("k", "n")),
}
