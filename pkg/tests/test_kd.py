import numpy as np
import pytest

from conftest import circulant, layered_failure_instance
from immersions.errors import ConsistencyError, SizeError
from immersions.generators import (
    min_outdegree_construction,
    random_regular_tournament,
    regular_tournament,
    transitive_tournament,
)
from immersions.immersion import Pattern
from immersions.kd import (
    FailureWitness,
    StepState,
    Trace,
    find_kd_immersion,
    p1_check,
    p2_construct,
    partition_failure,
    select_branch_set,
    try_paths,
)
from immersions.tournament import Tournament
from immersions.verify import verify_immersion


def degree_spread(T, vs, active):
    degs = [T.out_degree(v, within=active) for v in vs]
    return max(degs) - min(degs)


def test_select_regular_65():
    T = regular_tournament(65)
    R = select_branch_set(T, frozenset(range(65)), 2)
    assert len(R) == 2 and all(T.out_degree(v) == 32 for v in R)


def test_select_transitive_64():
    T = transitive_tournament(64)
    active = frozenset(range(64))
    R = select_branch_set(T, active, 2)
    assert len(R) == 2
    assert all(T.out_degree(v, within=active) >= 8 and T.in_degree(v, within=active) >= 8 for v in R)
    assert degree_spread(T, R, active) <= 4
    assert all(10 <= v <= 53 for v in R)


def test_select_exact_threshold_and_size_error():
    T = random_regular_tournament(97, 0)
    assert len(select_branch_set(T, frozenset(range(96)), 3)) == 3
    with pytest.raises(SizeError):
        select_branch_set(T, frozenset(range(95)), 3)


def test_try_paths_single_branch():
    T = regular_tournament(5)
    assert try_paths(T, StepState(1, frozenset(range(5)), (2,))) == {}


def test_try_paths_triangle():
    T = Tournament.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    paths = try_paths(T, StepState(1, frozenset(range(3)), (0, 1)))
    assert paths == {(0, 1): (0, 1), (1, 0): (1, 2, 0)}


def transitive_failure(n=64, branches=(10, 20)):
    T = transitive_tournament(n)
    state = StepState(1, frozenset(range(n)), branches)
    return T, state, try_paths(T, state)


def test_transitive_failure_witness():
    T, state, witness = transitive_failure()
    assert witness == FailureWitness(20, 10, frozenset(), frozenset())
    assert state.paths == {(10, 20): (10, 20)}


def test_transitive_failure_partition():
    T, state, witness = transitive_failure()
    part = partition_failure(T, state, witness)
    assert part.A == frozenset(range(21, 64))
    assert part.B == frozenset(range(10))
    assert part.C == frozenset(range(11, 20))
    assert part.D == frozenset(range(64)) - part.B
    assert part.H == frozenset(range(10, 21))


def test_partition_identities_on_layered_instance(failure_instance):
    T, parts = failure_instance
    state = StepState(1, frozenset(range(T.n)), (0, 1))
    witness = try_paths(T, state)
    assert isinstance(witness, FailureWitness) and (witness.x, witness.y) == (0, 1)
    trace = Trace()
    part = partition_failure(T, state, witness, trace)
    assert part.A == frozenset(parts["A"]) and part.B == frozenset(parts["B"])
    assert part.C == frozenset(parts["Z"])
    assert part.D == frozenset(range(T.n)) - part.B
    assert part.H == frozenset(range(T.n)) - part.A - part.B
    assert not trace.breaches


def test_partition_breach_is_named():
    # a 2-vertex B violates |B| >= k for k = 3; branches 0,1 and a dummy third branch in A
    T, _ = layered_failure_instance(alpha=11, beta=2, zeta=3)
    state = StepState(1, frozenset(range(T.n)), (0, 1, 2))
    witness = FailureWitness(0, 1, frozenset(), frozenset())
    with pytest.raises(ConsistencyError) as info:
        partition_failure(T, state, witness, Trace(strict=True))
    assert info.value.name == "|B|>=k"
    relaxed = Trace(strict=False)
    partition_failure(T, state, witness, relaxed)
    assert [c.name for c in relaxed.breaches] == ["|B|>=k"]


def test_p1_low_set_and_p2_on_layered_instance(failure_instance):
    T, parts = failure_instance
    state = StepState(1, frozenset(range(T.n)), (0, 1))
    part = partition_failure(T, state, try_paths(T, state))
    outcome = p1_check(T, part, C=5, k=2)
    assert not outcome.passed
    assert outcome.low == tuple(parts["Z"][:2]) and outcome.low_count == 3
    imm = p2_construct(T, [part], outcome.low, 2, Trace())
    assert imm.pattern is Pattern.COMPLETE
    assert all(len(p) == 4 for p in imm.paths.values())
    assert verify_immersion(T, imm, max_len=3) is None


def test_p1_pass_on_layered_instance(failure_instance):
    T, _ = failure_instance
    state = StepState(1, frozenset(range(T.n)), (0, 1))
    part = partition_failure(T, state, try_paths(T, state))
    outcome = p1_check(T, part, C=2, k=2)
    assert outcome.passed and outcome.next_active == part.D


def regular_part(m):
    """FailurePartition-like object whose D induces a regular tournament."""
    T = Tournament(circulant(m))

    class Part:
        D = frozenset(range(m))

    return T, Part


@pytest.mark.parametrize("C, k", [(59, 1), (59, 2), (20, 3)])
def test_p1_regular_arithmetic(C, k):
    # degree (C-2)k sits below the bar (C-1)k, degree (C-1)k meets it
    T, part = regular_part((2 * C - 4) * k + 1)
    assert not p1_check(T, part, C, k).passed
    T, part = regular_part((2 * C - 2) * k + 1)
    assert p1_check(T, part, C, k).passed


def test_p1_transitive_low_vertices():
    T = transitive_tournament(40)

    class Part:
        D = frozenset(range(40))

    out = p1_check(T, Part, C=5, k=3)
    assert not out.passed
    assert out.low == (39, 38, 37) and out.low_count == 12


def test_p1_single_low_vertex_with_k1():
    T = transitive_tournament(10)

    class Part:
        D = frozenset(range(10))

    out = p1_check(T, Part, C=2, k=1)
    assert not out.passed and out.low == (9,)


def test_p2_with_k1_is_empty():
    T = transitive_tournament(3)
    imm = p2_construct(T, [], (2,), 1)
    assert imm.branches == (2,) and imm.paths == {}


def test_p2_breach_is_named(failure_instance):
    T, parts = failure_instance
    state = StepState(1, frozenset(range(T.n)), (0, 1))
    part = partition_failure(T, state, try_paths(T, state))
    with pytest.raises(ConsistencyError) as info:
        p2_construct(T, [part], (parts["A"][0], parts["A"][1]), 2)
    assert info.value.name.startswith("p2-")


def test_engine_k1():
    T = regular_tournament(121)
    res = find_kd_immersion(T, 1)
    assert res.ok and len(res.immersion.branches) == 1 and res.immersion.paths == {}


def test_engine_k2_near_regular():
    T = random_regular_tournament(2 * 59 * 2 + 1, 3)
    res = find_kd_immersion(T, 2)
    assert res.ok
    assert verify_immersion(T, res.immersion, max_len=3, strong=True) is None
    assert not res.trace.breaches
    assert res.trace.summary()["|active|>=32k"] >= 1


def test_engine_infeasible_and_bad_C():
    res = find_kd_immersion(min_outdegree_construction(3, 200), 3)
    assert res.status == "infeasible" and not res.ok
    with pytest.raises(ValueError):
        find_kd_immersion(regular_tournament(199), 1, C=58)
    with pytest.raises(ValueError):
        find_kd_immersion(regular_tournament(5), 0)


def test_best_effort_reports_instead_of_raising():
    T = transitive_tournament(80)
    res = find_kd_immersion(T, 2, best_effort=True)
    assert res.status == "failure" and res.reason.startswith("p2-candidates")
    assert [s.outcome for s in res.steps] == ["p2"]
    assert res.steps[0].sizes == {"A": 22, "B": 56, "C": 0, "H": 2, "D": 24}
    assert res.trace.summary()["p2-i:out-into-B>=k-1!"] == 2


def test_best_effort_on_layered_instance(failure_instance):
    T, _ = failure_instance
    res = find_kd_immersion(T, 2, C=5, best_effort=True)
    assert res.ok and res.steps[0].branches == (0, 2)
    assert [c.name for c in res.trace.breaches] == ["|active|>=32k"]
    assert verify_immersion(T, res.immersion, max_len=3) is None


@pytest.mark.parametrize("seed", range(4))
def test_strict_descent_and_trace(seed):
    T = random_regular_tournament(2 * 59 * 3 + 1, seed)
    res = find_kd_immersion(T, 3)
    assert res.ok and not res.trace.breaches
    sizes = [s.active_size for s in res.steps]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))
    assert verify_immersion(T, res.immersion, 3) is None
