"""Tournament representation and its plain-text file format.

A tournament is stored twice: as a read-only ``n x n`` boolean matrix and as
per-vertex out/in neighbourhood bitmasks (Python ints, bit ``v`` set when
``v`` is a neighbour). The bitmasks make set algebra on neighbourhoods cheap,
which every engine in the package leans on.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyInputError, TournamentFormatError


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _row_masks(matrix: np.ndarray) -> tuple[int, ...]:
    packed = np.packbits(matrix, axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


class Tournament:
    """An orientation of the complete graph on ``range(n)``.

    ``adj[u, v]`` is true iff the edge goes ``u -> v``. Instances are
    immutable; use :meth:`from_matrix` to build one from an arbitrary 0/1
    matrix with validation.
    """

    __slots__ = ("n", "adj", "out_masks", "in_masks")

    def __init__(self, adj: np.ndarray, *, validate: bool = True):
        adj = np.array(adj, dtype=bool, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] == 0:
            raise EmptyInputError("a tournament needs at least one vertex")
        if validate:
            problem = _first_violation(adj)
            if problem is not None:
                u, v, why = problem
                raise ValueError(f"not a tournament at ({u}, {v}): {why}")
        adj.flags.writeable = False
        self.n = adj.shape[0]
        self.adj = adj
        self.out_masks = _row_masks(adj)
        self.in_masks = _row_masks(adj.T)

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[int]]) -> Tournament:
        return cls(np.asarray(rows, dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Tournament:
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            adj[u, v] = True
        return cls(adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tournament):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.adj, other.adj))

    def __hash__(self) -> int:
        return hash(self.out_masks)

    def __repr__(self) -> str:
        return f"Tournament(n={self.n})"

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in bits(self.out_masks[u]):
                yield u, v

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range for n={self.n}")

    def out_degree(self, v: int, within: Iterable[int] | int | None = None) -> int:
        """``|N+(v) ∩ within|``; ``within`` may be an iterable or a bitmask."""
        self._check_vertex(v)
        if within is None:
            return self.out_masks[v].bit_count()
        w = within if isinstance(within, int) else mask_of(within)
        return (self.out_masks[v] & w).bit_count()

    def in_degree(self, v: int, within: Iterable[int] | int | None = None) -> int:
        self._check_vertex(v)
        if within is None:
            return self.in_masks[v].bit_count()
        w = within if isinstance(within, int) else mask_of(within)
        return (self.in_masks[v] & w).bit_count()

    def out_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=0)

    def min_out_degree(self) -> int:
        return int(self.out_degrees().min())

    def subtournament(self, vertices: Iterable[int]) -> tuple[Tournament, tuple[int, ...]]:
        """Induced subtournament on ``vertices`` (relabelled ``0..m-1`` in
        increasing original order) together with the original labels."""
        labels = tuple(sorted(set(vertices)))
        idx = np.array(labels, dtype=np.intp)
        return Tournament(self.adj[np.ix_(idx, idx)], validate=False), labels

    def relabel(self, perm: Sequence[int]) -> Tournament:
        """Tournament with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.intp)
        adj = np.zeros_like(self.adj)
        adj[np.ix_(perm, perm)] = self.adj
        return Tournament(adj, validate=False)

    def to_text(self) -> str:
        lines = [str(self.n)]
        lines.extend("".join("1" if b else "0" for b in row) for row in self.adj)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Tournament:
        return parse_tournament(text)


def _first_violation(adj: np.ndarray) -> tuple[int, int, str] | None:
    diag = np.flatnonzero(np.diagonal(adj))
    if diag.size:
        v = int(diag[0])
        return v, v, "self-loop"
    both = adj & adj.T
    neither = ~(adj | adj.T)
    np.fill_diagonal(neither, False)
    bad = both | neither
    if bad.any():
        u, v = (int(x) for x in np.argwhere(bad)[0])
        why = "edge in both directions" if both[u, v] else "pair left unoriented"
        return u, v, why
    return None


def parse_tournament(text: str) -> Tournament:
    """Parse the text format: a line holding ``n``, then ``n`` rows of ``n``
    characters from ``{0,1}``. Errors carry 1-based line/column positions."""
    lines = [ln.rstrip("\r") for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TournamentFormatError("empty input", line=1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise TournamentFormatError(f"expected vertex count, got {lines[0]!r}", line=1) from None
    if n < 1:
        raise TournamentFormatError("vertex count must be positive", line=1)
    if len(lines) - 1 != n:
        raise TournamentFormatError(f"expected {n} matrix rows, found {len(lines) - 1}", line=len(lines))
    rows = []
    for u in range(n):
        row = lines[u + 1].strip()
        if len(row) != n:
            raise TournamentFormatError(f"expected {n} characters, found {len(row)}", line=u + 2)
        for v, ch in enumerate(row):
            if ch not in "01":
                raise TournamentFormatError(f"invalid character {ch!r}", line=u + 2, column=v + 1)
        rows.append([ch == "1" for ch in row])
    adj = np.array(rows, dtype=bool)
    problem = _first_violation(adj)
    if problem is not None:
        u, v, why = problem
        raise TournamentFormatError(why, line=u + 2, column=v + 1)
    return Tournament(adj, validate=False)
