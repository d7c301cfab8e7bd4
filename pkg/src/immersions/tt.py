"""Strong 1-immersions of transitive tournaments.

Pipeline: order vertices by decreasing out-degree, sample a random vertex
set, discard vertices that are in-bad or out-bad with respect to the sample,
and route every backward pair of the survivors through a private
representative chosen by the greedy pairing. Each path has at most two
edges and never passes through another branch vertex.

All set computations run on bitmasks. Condition (3) of badness asks for
"the first ``i // 2`` vertices" of a common neighbourhood; those are taken in
the global out-degree order, which is why the view also keeps neighbourhood
masks re-indexed by position in that order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bounds import FAITHFUL_P
from .errors import ConsistencyError
from .immersion import Immersion, Pattern
from .pairing import Pairing, PairingInstance, check_hypothesis, greedy_pairing
from .tournament import Tournament, bits, mask_of
from .verify import verify_immersion

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DegreeOrderingView:
    order: tuple[int, ...]
    position: tuple[int, ...]
    # per vertex: later in-neighbours by increasing out-degree among themselves
    a_minus: tuple[tuple[int, ...], ...]
    # per vertex: earlier out-neighbours by increasing in-degree among themselves
    b_plus: tuple[tuple[int, ...], ...]
    pos_out: tuple[int, ...]
    pos_in: tuple[int, ...]

    def window(self, x: int, ell: int, side: str = "-") -> tuple[int, ...]:
        """First ``ell`` vertices of ``A-(x)`` (``side="-"``) or ``B+(x)``."""
        seq = self.a_minus[x] if side == "-" else self.b_plus[x]
        return seq[:ell]


def degree_ordering(T: Tournament) -> DegreeOrderingView:
    n = T.n
    out = T.out_masks
    inn = T.in_masks
    order = sorted(range(n), key=lambda v: (-out[v].bit_count(), v))
    position = [0] * n
    for p, v in enumerate(order):
        position[v] = p
    later = [0] * n
    acc = 0
    for v in reversed(order):
        later[v] = acc
        acc |= 1 << v
    a_minus = []
    b_plus = []
    for x in range(n):
        am = inn[x] & later[x]
        a_minus.append(tuple(sorted(bits(am), key=lambda u: ((out[u] & am).bit_count(), u))))
        earlier = T.all_mask & ~later[x] & ~(1 << x)
        bp = out[x] & earlier
        b_plus.append(tuple(sorted(bits(bp), key=lambda u: ((inn[u] & bp).bit_count(), u))))
    relabelled = T.relabel(position)
    return DegreeOrderingView(
        order=tuple(order),
        position=tuple(position),
        a_minus=tuple(a_minus),
        b_plus=tuple(b_plus),
        pos_out=relabelled.out_masks,
        pos_in=relabelled.in_masks,
    )


def _side_bad(view: DegreeOrderingView, x: int, side: str, S: frozenset[int] | set[int], s_pos: int) -> int:
    """``2`` or ``3`` for the first window condition that trips, else ``0``."""
    seq = view.a_minus[x] if side == "-" else view.b_plus[x]
    px = view.position[x]
    hx = view.pos_out[px] if side == "-" else view.pos_in[px]
    in_window = 0
    for i, z in enumerate(seq, start=1):
        if z in S:
            in_window += 1
            if 10 * in_window > i:
                return 2
        m = i // 2
        if not m:
            continue
        pz = view.position[z]
        common = hx & (view.pos_in[pz] if side == "-" else view.pos_out[pz])
        hits = common & s_pos
        if not hits:
            continue
        count = 0
        for b in bits(hits):
            if (common & ((1 << b) - 1)).bit_count() >= m:
                break
            count += 1
        if 20 * count >= i:
            return 3
    return 0


def _position_mask(view: DegreeOrderingView, S: Iterable[int]) -> int:
    return mask_of(view.position[v] for v in S)


def is_in_bad(view: DegreeOrderingView, S: Iterable[int], x: int) -> bool:
    S = frozenset(S)
    return x in S and bool(_side_bad(view, x, "-", S, _position_mask(view, S)))


def is_out_bad(view: DegreeOrderingView, S: Iterable[int], x: int) -> bool:
    S = frozenset(S)
    return x in S and bool(_side_bad(view, x, "+", S, _position_mask(view, S)))


def badness_reason(view: DegreeOrderingView, S: Iterable[int], x: int) -> str | None:
    """``"in-2"``, ``"in-3"``, ``"out-2"`` or ``"out-3"`` naming the side and
    window condition that disqualifies ``x``; ``None`` when ``x`` is good."""
    S = frozenset(S)
    if x not in S:
        return None
    s_pos = _position_mask(view, S)
    for side, name in (("-", "in"), ("+", "out")):
        cond = _side_bad(view, x, side, S, s_pos)
        if cond:
            return f"{name}-{cond}"
    return None


def filter_good(view: DegreeOrderingView, S: Iterable[int]) -> tuple[int, ...]:
    """Members of ``S`` that are neither in-bad nor out-bad with respect to
    ``S`` itself (one pass, no re-filtering), listed in the degree order."""
    S = frozenset(S)
    s_pos = _position_mask(view, S)
    good = [x for x in S if not _side_bad(view, x, "-", S, s_pos) and not _side_bad(view, x, "+", S, s_pos)]
    return tuple(sorted(good, key=lambda v: view.position[v]))


@dataclass(frozen=True)
class BackwardEdgeInstance:
    members: tuple[int, ...]
    # backward edges as (tail, head): tail later in the order than head
    edges: tuple[tuple[int, int], ...]
    representatives: tuple[tuple[int, ...], ...]
    outside: tuple[int, ...]
    pairing: PairingInstance
    # (vertex, "-") for in-edges of the vertex, (vertex, "+") for out-edges
    hyperedge_owner: tuple[tuple[int, str], ...]


def build_pairing_instance(T: Tournament, view: DegreeOrderingView, members: Iterable[int],
                           check_representatives: bool = False) -> BackwardEdgeInstance:
    """Backward-edge pairing instance on ``members``.

    For a backward edge ``w -> u`` (``u`` earlier) the candidates are the
    vertices ``z`` outside ``members`` with ``u -> z -> w``. With
    ``check_representatives`` the instance asserts the guarantee enjoyed by a
    sample without bad vertices: the ``j``-th edge of every hyperedge, in the
    owner's local order, has at least ``4j`` candidates.
    """
    members = tuple(sorted(set(members), key=lambda v: view.position[v]))
    member_mask = mask_of(members)
    outside = tuple(v for v in range(T.n) if not member_mask >> v & 1)
    b_index = {v: i for i, v in enumerate(outside)}
    edges: list[tuple[int, int]] = []
    reps: list[tuple[int, ...]] = []
    for a_pos, u in enumerate(members):
        for w in members[a_pos + 1:]:
            if T.out_masks[w] >> u & 1:
                edges.append((w, u))
                reps.append(tuple(bits(T.out_masks[u] & T.in_masks[w] & ~member_mask)))
    index = {e: i for i, e in enumerate(edges)}
    hyperedges: list[frozenset[int]] = []
    owners: list[tuple[int, str]] = []
    for x in members:
        ins = [index[(z, x)] for z in view.a_minus[x] if (z, x) in index]
        outs = [index[(x, w)] for w in view.b_plus[x] if (x, w) in index]
        for side, ranked in (("-", ins), ("+", outs)):
            if not ranked:
                continue
            if check_representatives:
                for j, e in enumerate(ranked, start=1):
                    if len(reps[e]) < 4 * j:
                        raise ConsistencyError(
                            "representatives>=4j",
                            f"edge {edges[e]} is #{j} at {x}{side} but has {len(reps[e])} candidates",
                        )
            hyperedges.append(frozenset(ranked))
            owners.append((x, side))
    inst = PairingInstance(
        a_size=len(edges),
        b_size=len(outside),
        adj=tuple(tuple(b_index[z] for z in r) for r in reps),
        hyperedges=tuple(hyperedges),
    )
    return BackwardEdgeInstance(members, tuple(edges), tuple(reps), outside, inst, tuple(owners))


def assemble_immersion(T: Tournament, inst: BackwardEdgeInstance, pairing: Pairing) -> Immersion:
    """Direct edge for forward pairs, 2-path via the paired representative for
    backward ones. Verified before returning."""
    index = {e: i for i, e in enumerate(inst.edges)}
    members = inst.members
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for a_pos, u in enumerate(members):
        for w in members[a_pos + 1:]:
            if T.out_masks[u] >> w & 1:
                paths[(u, w)] = (u, w)
            else:
                z = inst.outside[pairing.partner[index[(w, u)]]]
                paths[(u, w)] = (u, z, w)
    imm = Immersion(Pattern.TRANSITIVE, members, paths)
    problem = verify_immersion(T, imm, max_len=2, strong=True)
    if problem is not None:
        raise ConsistencyError("tt-verifier", str(problem))
    return imm


def transitive_chain(T: Tournament) -> tuple[int, ...]:
    """Greedy transitive subtournament: repeatedly keep the vertex of largest
    out-degree inside the current candidate set and shrink to its
    out-neighbourhood."""
    chain = []
    cand = T.all_mask
    while cand:
        v = max(bits(cand), key=lambda u: ((T.out_masks[u] & cand).bit_count(), -u))
        chain.append(v)
        cand &= T.out_masks[v]
    return tuple(chain)


@dataclass(frozen=True)
class TTConfig:
    mode: str = "adaptive"  # "faithful" | "adaptive"
    p_grid: tuple[float, ...] = (0.005, 0.01, 0.02, 0.04, 0.08)
    retries: int = 8
    seed: int = 0
    p: float | None = None  # overrides the faithful probability
    fallback: bool = True


@dataclass(frozen=True)
class TTResult:
    immersion: Immersion | None
    best_size: int
    route: str | None
    samples: int
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.immersion is not None


def _immersion_from_sample(T: Tournament, view: DegreeOrderingView, good: tuple[int, ...], k: int) -> Immersion:
    chosen = good[:k]
    inst = build_pairing_instance(T, view, chosen, check_representatives=True)
    problem = check_hypothesis(inst.pairing)
    if problem is not None:
        raise ConsistencyError("good-set-hypothesis", f"good set {chosen}: {problem}")
    return assemble_immersion(T, inst, greedy_pairing(inst.pairing))


def find_tt_immersion(T: Tournament, k: int, config: TTConfig = TTConfig()) -> TTResult:
    """Strong 1-immersion of the transitive tournament on ``k`` vertices.

    ``faithful`` draws a single sample at the proof's probability and gives
    up otherwise. ``adaptive`` sweeps ``config.p_grid`` with ``retries``
    samples each, then falls back to a greedy transitive subtournament.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if config.mode not in ("faithful", "adaptive"):
        raise ValueError(f"unknown mode {config.mode!r}")
    if k > T.n:
        return TTResult(None, 0, None, 0, f"k={k} exceeds n={T.n}")
    view = degree_ordering(T)
    rng = np.random.default_rng(config.seed)
    if config.mode == "faithful":
        schedule = [config.p if config.p is not None else FAITHFUL_P]
    else:
        schedule = [p for p in config.p_grid for _ in range(config.retries)]
    best = 0
    samples = 0
    for p in schedule:
        draw = rng.random(T.n) < p
        samples += 1
        good = filter_good(view, np.flatnonzero(draw).tolist())
        best = max(best, len(good))
        if len(good) >= k:
            log.debug("sample %d at p=%g gave %d good vertices", samples, p, len(good))
            return TTResult(_immersion_from_sample(T, view, good, k), len(good), "sampling", samples)
    if config.mode == "adaptive" and config.fallback:
        chain = transitive_chain(T)
        best = max(best, len(chain))
        if len(chain) >= k:
            imm = Immersion(Pattern.TRANSITIVE, chain[:k], {
                (chain[i], chain[j]): (chain[i], chain[j]) for i in range(k) for j in range(i + 1, k)
            })
            problem = verify_immersion(T, imm, max_len=2, strong=True)
            if problem is not None:
                raise ConsistencyError("tt-verifier", str(problem))
            return TTResult(imm, best, "transitive", samples)
    return TTResult(None, best, None, samples, f"largest good set has {best} < {k} vertices")
