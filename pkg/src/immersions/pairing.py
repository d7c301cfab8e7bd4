"""Greedy pairing under hypergraph matching constraints.

Given a bipartite graph ``G[A, B]`` and a hypergraph on ``A`` in which every
element lies in at most two hyperedges, pick for each ``a in A`` a partner
``b in N_G(a)`` such that, inside every hyperedge, no two elements share a
partner. When low-degree elements are sparse in each hyperedge, processing
elements in order of degree bucket and taking any free neighbour works.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import PairingContractError


@dataclass(frozen=True)
class PairingInstance:
    a_size: int
    b_size: int
    adj: tuple[tuple[int, ...], ...]
    hyperedges: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adj) != self.a_size:
            raise ValueError(f"adjacency lists for {len(self.adj)} elements, expected {self.a_size}")
        for a, nbrs in enumerate(self.adj):
            for b in nbrs:
                if not 0 <= b < self.b_size:
                    raise ValueError(f"element {a} adjacent to out-of-range partner {b}")
        for F in self.hyperedges:
            for a in F:
                if not 0 <= a < self.a_size:
                    raise ValueError(f"hyperedge contains out-of-range element {a}")

    @classmethod
    def build(cls, b_size: int, adj: Sequence[Sequence[int]], hyperedges: Sequence[Sequence[int]]) -> PairingInstance:
        return cls(
            a_size=len(adj),
            b_size=b_size,
            adj=tuple(tuple(sorted(set(nbrs))) for nbrs in adj),
            hyperedges=tuple(frozenset(F) for F in hyperedges),
        )

    def degree(self, a: int) -> int:
        return len(self.adj[a])

    def memberships(self) -> list[list[int]]:
        """Hyperedge indices containing each element."""
        out: list[list[int]] = [[] for _ in range(self.a_size)]
        for h, F in enumerate(self.hyperedges):
            for a in F:
                out[a].append(h)
        return out


@dataclass(frozen=True)
class HypothesisViolation:
    kind: str  # "isolated" | "membership" | "degree"
    element: int | None = None
    hyperedge: int | None = None
    level: int | None = None
    count: int | None = None

    def __str__(self) -> str:
        if self.kind == "isolated":
            return f"element {self.element} has no neighbour"
        if self.kind == "membership":
            return f"element {self.element} lies in more than two hyperedges"
        return (f"hyperedge {self.hyperedge}: {self.count} members of degree <= {2 ** (self.level + 1)}, "
                f"limit {2 ** (self.level - 1)} at i={self.level}")


def check_hypothesis(inst: PairingInstance) -> HypothesisViolation | None:
    """First violated precondition of the pairing guarantee, or ``None``.

    For every hyperedge ``F`` and integer ``1 <= i <= floor(log2 |F|)`` at most
    ``2**(i-1)`` members may have degree ``<= 2**(i+1)``.
    """
    for a in range(inst.a_size):
        if not inst.adj[a]:
            return HypothesisViolation("isolated", element=a)
    for a, hs in enumerate(inst.memberships()):
        if len(hs) > 2:
            return HypothesisViolation("membership", element=a)
    for h, F in enumerate(inst.hyperedges):
        if len(F) < 2:
            continue
        degrees = sorted(inst.degree(a) for a in F)
        for i in range(1, len(F).bit_length()):
            bar = 2 ** (i + 1)
            count = sum(1 for d in degrees if d <= bar)
            if count > 2 ** (i - 1):
                return HypothesisViolation("degree", hyperedge=h, level=i, count=count)
    return None


def bucket_index(degree: int) -> int:
    """``1`` for degree ``<= 4``, else the ``i`` with ``2**i < degree <= 2**(i+1)``."""
    if degree <= 4:
        return 1
    return (degree - 1).bit_length() - 1


def degree_buckets(inst: PairingInstance) -> dict[int, list[int]]:
    buckets: dict[int, list[int]] = {}
    for a in range(inst.a_size):
        buckets.setdefault(bucket_index(inst.degree(a)), []).append(a)
    return dict(sorted(buckets.items()))


@dataclass(frozen=True)
class Pairing:
    partner: tuple[int, ...]


@dataclass(frozen=True)
class PairingViolation:
    kind: str  # "missing" | "adjacency" | "collision"
    element: int | None = None
    partner: int | None = None
    hyperedge: int | None = None
    others: tuple[int, ...] = field(default=())

    def __str__(self) -> str:
        if self.kind == "missing":
            return f"element {self.element} has no partner"
        if self.kind == "adjacency":
            return f"element {self.element} paired with non-neighbour {self.partner}"
        return f"hyperedge {self.hyperedge}: elements {self.others} share partner {self.partner}"


def verify_pairing(inst: PairingInstance, p: Pairing) -> PairingViolation | None:
    if len(p.partner) != inst.a_size:
        return PairingViolation("missing", element=min(len(p.partner), inst.a_size - 1))
    for a, b in enumerate(p.partner):
        if b is None or b < 0:
            return PairingViolation("missing", element=a)
        if b not in inst.adj[a]:
            return PairingViolation("adjacency", element=a, partner=b)
    for h, F in enumerate(inst.hyperedges):
        seen: dict[int, int] = {}
        for a in sorted(F):
            b = p.partner[a]
            if b in seen:
                return PairingViolation("collision", partner=b, hyperedge=h, others=(seen[b], a))
            seen[b] = a
    return None


def greedy_pairing(inst: PairingInstance) -> Pairing:
    """Assign partners bucket by bucket (ascending element index inside a
    bucket), always taking the lowest-index neighbour not already used by a
    member of a shared hyperedge.

    Raises :class:`PairingContractError` naming the first element left
    without a free neighbour. The result is re-verified before returning.
    """
    memberships = inst.memberships()
    taken: list[set[int]] = [set() for _ in inst.hyperedges]
    partner: list[int] = [-1] * inst.a_size
    for _, members in degree_buckets(inst).items():
        for a in members:
            blocked: set[int] = set()
            for h in memberships[a]:
                blocked |= taken[h]
            choice = next((b for b in inst.adj[a] if b not in blocked), None)
            if choice is None:
                raise PairingContractError(
                    a, f"degree {inst.degree(a)}, {len(blocked)} partners blocked by hyperedges {memberships[a]}"
                )
            partner[a] = choice
            for h in memberships[a]:
                taken[h].add(choice)
    result = Pairing(tuple(partner))
    problem = verify_pairing(inst, result)
    if problem is not None:
        raise PairingContractError(problem.element if problem.element is not None else -1, str(problem))
    return result
