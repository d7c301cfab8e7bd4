"""Independent checker for immersion certificates.

Deliberately self-contained: it reads edges straight off the adjacency
matrix and re-derives the required pairs, so no constructor can vouch for
its own output.
"""

from __future__ import annotations

from dataclasses import dataclass

from .immersion import Immersion, Pattern
from .tournament import Tournament


@dataclass(frozen=True)
class Violation:
    kind: str
    pair: tuple[int, int] | None = None
    edge: tuple[int, int] | None = None
    detail: str = ""

    def __str__(self) -> str:
        parts = []
        if self.pair is not None:
            parts.append(f"pair {self.pair[0]}->{self.pair[1]}")
        if self.edge is not None:
            parts.append(f"edge {self.edge[0]}->{self.edge[1]}")
        if self.detail:
            parts.append(self.detail)
        return f"{self.kind}: {', '.join(parts)}" if parts else self.kind


def _required(pattern: Pattern, branches: tuple[int, ...]) -> set[tuple[int, int]]:
    k = len(branches)
    if pattern is Pattern.TRANSITIVE:
        return {(branches[i], branches[j]) for i in range(k) for j in range(i + 1, k)}
    return {(u, w) for u in branches for w in branches if u != w}


def verify_immersion(T: Tournament, imm: Immersion, max_len: int, strong: bool = True) -> Violation | None:
    """First violated immersion property, or ``None`` when the certificate
    is a valid (strong, if requested) immersion with paths of at most
    ``max_len`` edges."""
    n = T.n
    branches = imm.branches
    for b in branches:
        if not 0 <= b < n:
            return Violation("branch-range", detail=f"branch {b} outside 0..{n - 1}")
    if len(set(branches)) != len(branches):
        return Violation("branch-duplicate", detail=f"branches {branches}")
    required = _required(imm.pattern, branches)
    extra = set(imm.paths) - required
    if extra:
        return Violation("unexpected-pair", pair=min(extra))
    missing = required - set(imm.paths)
    if missing:
        return Violation("missing-pair", pair=min(missing))
    branch_set = set(branches)
    used: dict[tuple[int, int], tuple[int, int]] = {}
    for pair in sorted(required):
        path = imm.paths[pair]
        if len(path) < 2 or path[0] != pair[0] or path[-1] != pair[1]:
            return Violation("endpoints", pair=pair, detail=f"path {path}")
        if len(path) - 1 > max_len:
            return Violation("too-long", pair=pair, detail=f"{len(path) - 1} edges > {max_len}")
        if any(not 0 <= v < n for v in path):
            return Violation("vertex-range", pair=pair)
        if len(set(path)) != len(path):
            return Violation("not-simple", pair=pair, detail=f"path {path}")
        if strong:
            inner = [v for v in path[1:-1] if v in branch_set]
            if inner:
                return Violation("strongness", pair=pair, detail=f"branch vertex {inner[0]} is internal")
        for u, v in zip(path, path[1:]):
            if not T.adj[u, v]:
                return Violation("missing-edge", pair=pair, edge=(u, v))
            if (u, v) in used:
                return Violation("edge-duplication", pair=pair, edge=(u, v), detail=f"also used by {used[(u, v)]}")
            used[(u, v)] = pair
    return None
