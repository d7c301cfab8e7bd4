"""Strong immersions of complete digraphs with paths of at most 3 edges.

The engine runs the descent from the minimum out-degree argument. Each step
picks ``k`` branch vertices of similar out-degree inside the active
subtournament and greedily routes every ordered pair with a path of length
1, 2 or 3. If some pair ``(x, y)`` cannot be routed, the out-neighbourhood
``A`` of ``x`` and the in-neighbourhood ``B`` of ``y`` (minus the vertices
already in play) satisfy ``B -> A`` on all unused edges. Either dropping
``B`` keeps almost all out-degrees high, and the search continues on the
smaller tournament, or ``k`` low-degree vertices remain and are joined by
paths ``v_r -> b -> a -> v_s`` that hop through a retained ``B`` layer into
its matching ``A`` layer.

Every inequality the argument relies on is checked at runtime through a
:class:`Trace`. In strict mode a breach raises :class:`ConsistencyError`
naming it; in best-effort mode the breach is recorded and the run goes on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .bounds import c_threshold_holds
from .degrees import similar_degree_set
from .errors import ConsistencyError, SizeError
from .immersion import Immersion, Pattern
from .tournament import Tournament, bits, mask_of
from .verify import verify_immersion

log = logging.getLogger(__name__)

DEFAULT_C = 59


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


class Trace:
    """Ledger of runtime checks for one engine run."""

    def __init__(self, strict: bool = True):
        self.strict = strict
        self.checks: list[Check] = []

    def require(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        if not ok:
            log.debug("check %s failed: %s", name, detail)
            if self.strict:
                raise ConsistencyError(name, detail)
        return bool(ok)

    @property
    def breaches(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.checks:
            key = c.name if c.ok else f"{c.name}!"
            counts[key] = counts.get(key, 0) + 1
        return counts


@dataclass
class StepState:
    depth: int
    active: frozenset[int]
    branches: tuple[int, ...]
    paths: dict[tuple[int, int], tuple[int, ...]] = field(default_factory=dict)
    used_edges: set[tuple[int, int]] = field(default_factory=set)
    active_mask: int = field(init=False)
    branch_mask: int = field(init=False)

    def __post_init__(self):
        self.active_mask = mask_of(self.active)
        self.branch_mask = mask_of(self.branches)


@dataclass(frozen=True)
class FailureWitness:
    x: int
    y: int
    x_set: frozenset[int]
    y_set: frozenset[int]


@dataclass(frozen=True)
class FailurePartition:
    x: int
    y: int
    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]
    H: frozenset[int]
    D: frozenset[int]


def _spread_ok(T: Tournament, cand: list[int], mask: int, width: int) -> bool:
    degs = [(T.out_masks[v] & mask).bit_count() for v in cand]
    return max(degs) - min(degs) <= width


def _widest_window(T: Tournament, cand: list[int], mask: int, width: int) -> list[int]:
    ranked = sorted(cand, key=lambda v: ((T.out_masks[v] & mask).bit_count(), v))
    deg = [(T.out_masks[v] & mask).bit_count() for v in ranked]
    best: list[int] = []
    lo = 0
    for hi in range(len(ranked)):
        while deg[hi] - deg[lo] > width:
            lo += 1
        if hi - lo + 1 > len(best):
            best = ranked[lo:hi + 1]
    return best


def select_branch_set(T: Tournament, active: frozenset[int], k: int, strict: bool = True) -> tuple[int, ...]:
    """``k`` vertices with out- and in-degree at least ``4k`` inside
    ``active`` whose out-degrees there differ by at most ``2k``.

    Uses the pigeonhole bucket of :func:`similar_degree_set` with
    ``eps = 1/2`` and ``t = 2k`` on the induced subtournament, keeping the
    ``k`` smallest labels. When rounding leaves that bucket short, a sliding
    out-degree window over all qualifying vertices is used instead.
    """
    size = len(active)
    if strict and size < 32 * k:
        raise SizeError(f"branch selection needs |active| >= 32k = {32 * k}, got {size}")
    if size < k:
        raise SizeError(f"cannot pick {k} branch vertices from {size}")
    mask = mask_of(active)
    chosen: list[int] = []
    if 2 * k <= size:
        sub, labels = T.subtournament(active)
        found = similar_degree_set(sub, 0.5, 2 * k)
        if found.feasible and len(found.members) >= k:
            chosen = sorted(labels[m] for m in found.members)[:k]
    if not chosen:
        floor = 4 * k if strict else 0
        cand = [v for v in sorted(active)
                if (T.out_masks[v] & mask).bit_count() >= floor and (T.in_masks[v] & mask).bit_count() >= floor]
        window = _widest_window(T, cand, mask, 2 * k)
        if len(window) >= k:
            chosen = sorted(window)[:k]
        elif strict:
            raise ConsistencyError("branch-selection", f"only {len(window)} similar-degree vertices in {size}")
        else:
            # best effort: the k vertices around the median out-degree
            ranked = sorted(active, key=lambda v: ((T.out_masks[v] & mask).bit_count(), v))
            start = max(0, min(size - k, size // 2 - k // 2))
            chosen = sorted(ranked[start:start + k])
    if strict:
        low = [v for v in chosen
               if (T.out_masks[v] & mask).bit_count() < 4 * k or (T.in_masks[v] & mask).bit_count() < 4 * k]
        if low or not _spread_ok(T, chosen, mask, 2 * k):
            raise ConsistencyError("branch-invariants", f"branches {chosen} in |active|={size}")
    return tuple(chosen)


def _route(T: Tournament, u: int, w: int, allowed: int, used: set[tuple[int, int]]) -> tuple[int, ...] | None:
    out = T.out_masks
    inn = T.in_masks
    if out[u] >> w & 1 and (u, w) not in used:
        return (u, w)
    for a in bits(out[u] & inn[w] & allowed):
        if (u, a) not in used and (a, w) not in used:
            return (u, a, w)
    for a in bits(out[u] & allowed):
        if (u, a) in used:
            continue
        for b in bits(out[a] & inn[w] & allowed & ~(1 << a)):
            if (a, b) not in used and (b, w) not in used:
                return (u, a, b, w)
    return None


def try_paths(T: Tournament, state: StepState) -> dict[tuple[int, int], tuple[int, ...]] | FailureWitness:
    """Route ordered branch pairs in lexicographic order, committing each path.

    Paths stay inside the active set, avoid used edges and never pass
    through a branch vertex. Returns the complete path map, or a witness for
    the first pair with no admissible path of length at most 3.
    """
    allowed = state.active_mask & ~state.branch_mask
    for u in state.branches:
        for w in state.branches:
            if u == w or (u, w) in state.paths:
                continue
            path = _route(T, u, w, allowed, state.used_edges)
            if path is None:
                x_set = {v for (s, _), p in state.paths.items() if s == u for v in p[1:-1]}
                y_set = {v for (_, t), p in state.paths.items() if t == w for v in p[1:-1]}
                return FailureWitness(u, w, frozenset(x_set), frozenset(y_set))
            state.paths[(u, w)] = path
            state.used_edges.update(zip(path, path[1:]))
    return dict(state.paths)


def partition_failure(T: Tournament, state: StepState, witness: FailureWitness,
                      trace: Trace | None = None) -> FailurePartition:
    """Split the active set around an unroutable pair ``(x, y)``.

    ``A``: out-neighbours of ``x``, ``B``: in-neighbours of ``y``, both
    outside the branch set and the interiors ``X``, ``Y`` of committed paths
    from ``x`` and into ``y``; ``C`` is the rest outside ``R ∪ X ∪ Y``,
    ``H = active - (A ∪ B)`` and ``D = active - B``.
    """
    trace = trace if trace is not None else Trace()
    k = len(state.branches)
    x, y = witness.x, witness.y
    active = state.active_mask
    excl = state.branch_mask | mask_of(witness.x_set) | mask_of(witness.y_set)
    A = T.out_masks[x] & active & ~excl
    B = T.in_masks[y] & active & ~excl
    C = active & ~(excl | A | B)
    H = active & ~(A | B)
    D = active & ~B
    # structural consequences of an exhausted search
    trace.require("A-B-disjoint", not A & B, f"x={x}, y={y}")
    forward = [(a, b) for a in bits(A) for b in bits(T.out_masks[a] & B) if (a, b) not in state.used_edges]
    trace.require("no-free-A-to-B-edge", not forward, f"free edges {forward[:3]}")
    trace.require("|A|>=k", A.bit_count() >= k, f"|A|={A.bit_count()}, k={k}")
    trace.require("|B|>=k", B.bit_count() >= k, f"|B|={B.bit_count()}, k={k}")
    trace.require("|C|<=5k", C.bit_count() <= 5 * k, f"|C|={C.bit_count()}, 5k={5 * k}")
    trace.require("|H|<=10k", H.bit_count() <= 10 * k, f"|H|={H.bit_count()}, 10k={10 * k}")
    to_set = lambda m: frozenset(bits(m))  # noqa: E731
    return FailurePartition(x, y, to_set(A), to_set(B), to_set(C), to_set(H), to_set(D))


@dataclass(frozen=True)
class P1Outcome:
    passed: bool
    next_active: frozenset[int] | None
    low: tuple[int, ...]
    low_count: int


def p1_check(T: Tournament, part: FailurePartition, C: int, k: int) -> P1Outcome:
    """Pass when at most ``k-1`` vertices of ``D`` have out-degree below
    ``(C-1)k`` inside ``D``; otherwise return ``k`` of those vertices,
    lowest degree first (ties by label)."""
    D = mask_of(part.D)
    bar = (C - 1) * k
    low = sorted(((T.out_masks[v] & D).bit_count(), v) for v in part.D if (T.out_masks[v] & D).bit_count() < bar)
    if len(low) <= k - 1:
        return P1Outcome(True, part.D, (), len(low))
    return P1Outcome(False, None, tuple(v for _, v in low[:k]), len(low))


def p2_construct(T: Tournament, layers: list[FailurePartition], low: tuple[int, ...], k: int,
                 trace: Trace | None = None) -> Immersion:
    """Join the low-degree vertices ``low`` by paths ``v_r -> b -> a -> v_s``
    with ``b`` in some retained ``B_t`` and ``a`` in the matching ``A_t``.

    Checks first that every ``v`` has at least ``k-1`` out-neighbours in the
    union of the ``B`` layers and at least ``3k-1`` in-neighbours in each
    ``A_j`` outside ``low``.
    """
    trace = trace if trace is not None else Trace()
    V = tuple(sorted(low))
    vmask = mask_of(V)
    b_masks = [mask_of(L.B) for L in layers]
    a_masks = [mask_of(L.A) & ~vmask for L in layers]
    union_b = 0
    for m in b_masks:
        union_b |= m
    for v in V:
        trace.require("p2-i:out-into-B>=k-1", (T.out_masks[v] & union_b).bit_count() >= k - 1,
                      f"v={v}: {(T.out_masks[v] & union_b).bit_count()}")
        for j, am in enumerate(a_masks, start=1):
            trace.require("p2-ii:in-from-A_j>=3k-1", (T.in_masks[v] & am).bit_count() >= 3 * k - 1,
                          f"v={v}, j={j}: {(T.in_masks[v] & am).bit_count()}")
    layer_of = {}
    for t, m in enumerate(b_masks):
        for b in bits(m):
            layer_of.setdefault(b, t)
    used_out: dict[int, set[int]] = {v: set() for v in V}
    used_in: dict[int, set[int]] = {v: set() for v in V}
    used_mid: set[tuple[int, int]] = set()
    paths: dict[tuple[int, int], tuple[int, ...]] = {}
    for r in V:
        for s in V:
            if r == s:
                continue
            path = None
            for b in bits(T.out_masks[r] & union_b):
                if b in used_out[r]:
                    continue
                cands = a_masks[layer_of[b]] & T.out_masks[b] & T.in_masks[s]
                a = next((a for a in bits(cands) if a not in used_in[s] and (b, a) not in used_mid), None)
                if a is not None:
                    path = (r, b, a, s)
                    break
            if path is None:
                raise ConsistencyError(
                    "p2-candidates",
                    f"no path {r}->{s}; used_out={sorted(used_out[r])}, used_in={sorted(used_in[s])}, "
                    f"layers={[(sorted(L.A), sorted(L.B)) for L in layers]}",
                )
            _, b, a, _ = path
            used_out[r].add(b)
            used_in[s].add(a)
            used_mid.add((b, a))
            paths[(r, s)] = path
    imm = Immersion(Pattern.COMPLETE, V, paths)
    problem = verify_immersion(T, imm, max_len=3, strong=True)
    if problem is not None:
        raise ConsistencyError("kd-verifier", str(problem))
    return imm


@dataclass(frozen=True)
class StepRecord:
    depth: int
    active_size: int
    branches: tuple[int, ...]
    outcome: str  # "complete" | "descend" | "p2" | "stuck"
    sizes: dict[str, int] = field(default_factory=dict)


@dataclass
class KDResult:
    status: str  # "success" | "infeasible" | "failure"
    immersion: Immersion | None
    steps: list[StepRecord]
    trace: Trace
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "success"


def find_kd_immersion(T: Tournament, k: int, C: int = DEFAULT_C, best_effort: bool = False) -> KDResult:
    """Strong immersion of the complete digraph on ``k`` vertices with every
    path of at most 3 edges, guaranteed when ``min out-degree >= C k`` and
    ``C >= 59``.

    Below the degree threshold the result is ``infeasible`` unless
    ``best_effort`` is set, in which case the same loop runs with checks
    recorded instead of enforced. Any returned immersion has been verified.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    trace = Trace(strict=not best_effort)
    steps: list[StepRecord] = []
    delta = T.min_out_degree()
    if delta < C * k and not best_effort:
        return KDResult("infeasible", None, steps, trace, f"min out-degree {delta} < Ck = {C * k}")
    if not best_effort and not c_threshold_holds(C):
        raise ValueError(f"C={C} fails sqrt(2(C-13)(C-2)) >= C+13; run with best_effort")
    active = frozenset(range(T.n))
    layers: list[FailurePartition] = []
    for depth in range(1, T.n + 1):
        trace.require("|active|>=32k", len(active) >= 32 * k, f"|active|={len(active)} at step {depth}")
        if len(active) < k:
            return KDResult("failure", None, steps, trace, f"active set shrank to {len(active)} < k")
        branches = select_branch_set(T, active, k, strict=not best_effort)
        state = StepState(depth, active, branches)
        result = try_paths(T, state)
        if not isinstance(result, FailureWitness):
            steps.append(StepRecord(depth, len(active), branches, "complete"))
            imm = Immersion(Pattern.COMPLETE, branches, result)
            problem = verify_immersion(T, imm, max_len=3, strong=True)
            if problem is not None:
                raise ConsistencyError("kd-verifier", str(problem))
            return KDResult("success", imm, steps, trace)
        part = partition_failure(T, state, result, trace)
        layers.append(part)
        sizes = {name: len(getattr(part, name)) for name in "ABCHD"}
        p1 = p1_check(T, part, C, k)
        if p1.passed:
            steps.append(StepRecord(depth, len(active), branches, "descend", sizes))
            if not trace.require("B-nonempty", bool(part.B), f"step {depth}"):
                return KDResult("failure", None, steps, trace, "no progress: B is empty")
            trace.require("|D|>=32k", len(part.D) >= 32 * k, f"|D|={len(part.D)}")
            active = part.D
            continue
        steps.append(StepRecord(depth, len(active), branches, "p2", sizes))
        try:
            imm = p2_construct(T, layers, p1.low, k, trace)
        except ConsistencyError as exc:
            if not best_effort:
                raise
            return KDResult("failure", None, steps, trace, str(exc))
        return KDResult("success", imm, steps, trace)
    raise ConsistencyError("strict-descent", "loop ran more than n steps")
