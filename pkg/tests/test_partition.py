import numpy as np
import pytest

from matroidbasis import (
    ElementSet,
    PartitionConfig,
    PartitionMatroid,
    PreconditionError,
    QuerySession,
    UniformMatroid,
    generate_kuw_hard_instance,
    partition_find_basis,
    recover_multiple_parts,
    recover_single_part,
    remove_small_parts,
)
from matroidbasis.decomposition import alpha_estimate
from matroidbasis.partition import SolveTrace
from matroidbasis.views import MatroidView, is_basis, is_independent_immediate, rank_greedy


def test_recover_single_part_walkthrough():
    inst = PartitionMatroid([[0, 1, 2], [3]], [1, 1])
    session = QuerySession(inst)
    part = recover_single_part(MatroidView.full(inst), np.array([0, 1, 2, 3]), session)
    assert set(part.members) == {0, 1, 2}
    assert part.budget == 1
    assert session.ledger.rounds == 2


def test_recover_single_part_single_part():
    inst = PartitionMatroid([[0, 1]], [1])
    session = QuerySession(inst)
    part = recover_single_part(MatroidView.full(inst), np.array([0, 1]), session)
    assert set(part.members) == {0, 1}
    assert part.budget == 1


def test_recover_single_part_free_view_signals():
    inst = UniformMatroid(4, 4)
    session = QuerySession(inst)
    with pytest.raises(PreconditionError):
        recover_single_part(MatroidView.full(inst), np.arange(4), session)


def test_recover_single_part_random_ground_truth(rng):
    for _ in range(15):
        n = int(rng.integers(4, 20))
        ids = rng.permutation(n)
        k = int(rng.integers(2, max(3, n // 3)))
        cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
        bounds = np.concatenate([[0], cuts, [n]])
        parts = [ids[a:b].tolist() for a, b in zip(bounds[:-1], bounds[1:])]
        budgets = [max(1, int(rng.integers(1, len(p) + 1))) for p in parts]
        inst = PartitionMatroid(parts, budgets)
        view = MatroidView.full(inst)
        pi = rng.permutation(n)
        session = QuerySession(inst, seed=0, budget=None)
        try:
            got = recover_single_part(view, pi, session)
        except PreconditionError:
            assert is_independent_immediate(view, view.alive)
            continue
        # the returned set is exactly one ground-truth part with its budget
        match = [
            (p, b) for p, b in zip(inst.parts, inst.budgets) if p == got.members
        ]
        assert len(match) == 1
        assert match[0][1] == got.budget


def test_remove_small_parts_example():
    inst = PartitionMatroid([[0, 1, 2], [3, 4, 5, 6]], [1, 3])
    session = QuerySession(inst)
    view, banked = remove_small_parts(MatroidView.full(inst), session, 1)
    assert set(view.alive) == {3, 4, 5, 6}
    assert len(banked) == 1 and banked.issubset(ElementSet.from_indices([0, 1, 2]))
    assert session.ledger.rounds == 1


def test_remove_small_parts_nothing_small():
    inst = PartitionMatroid([[0, 1, 2], [3, 4, 5, 6]], [2, 3])
    session = QuerySession(inst)
    view, banked = remove_small_parts(MatroidView.full(inst), session, 1)
    assert view.alive == ElementSet.full(7)
    assert banked == ElementSet(0)


def test_remove_small_parts_threshold_covers_all_budgets():
    inst = PartitionMatroid([[0, 1, 2], [3, 4, 5, 6]], [1, 3])
    session = QuerySession(inst)
    view, banked = remove_small_parts(MatroidView.full(inst), session, 3)
    assert not view.alive
    assert len(banked) == rank_greedy(MatroidView.full(inst))
    assert is_basis(MatroidView.full(inst), banked)


def test_remove_small_parts_respects_contraction():
    # contracting one element of a budget-2 part leaves an effective
    # budget-1 part behind
    inst = PartitionMatroid([[0, 1, 2, 3]], [2])
    view = MatroidView.full(inst).contract(ElementSet.from_indices([0]))
    session = QuerySession(inst)
    out, banked = remove_small_parts(view, session, 1)
    assert not out.alive
    assert len(banked) == 1


def test_recover_multiple_parts_kuw_m2():
    for seed in range(6):
        inst = generate_kuw_hard_instance(2, rng=np.random.default_rng(seed))
        session = QuerySession(inst, seed=seed)
        view = MatroidView.full(inst)
        trace = SolveTrace()
        final, banked = recover_multiple_parts(view, session, PartitionConfig(), trace=trace)
        # either the whole matroid drained or a contraction returned early;
        # finishing the solve must land exactly on the rank
        rest = partition_find_basis(final, session) if final.alive else ElementSet(0)
        assert len(banked | rest) == 6
        assert is_basis(view, banked | rest)
        assert trace.iterations <= 4


def test_recover_multiple_parts_free_view():
    inst = UniformMatroid(5, 5)
    session = QuerySession(inst, seed=0)
    view = MatroidView.full(inst)
    final, banked = recover_multiple_parts(view, session, PartitionConfig())
    assert banked == ElementSet.full(5)
    assert not final.alive


def test_recover_multiple_parts_single_part():
    inst = PartitionMatroid([[0, 1, 2, 3]], [1])
    session = QuerySession(inst, seed=1)
    view = MatroidView.full(inst)
    final, banked = recover_multiple_parts(view, session, PartitionConfig(small_part_threshold=0))
    assert len(banked) == 1
    assert is_basis(view, banked)


def test_partition_find_basis_kuw_m3():
    inst = generate_kuw_hard_instance(3, rng=np.random.default_rng(2))
    session = QuerySession(inst, seed=2)
    view = MatroidView.full(inst)
    basis = partition_find_basis(view, session)
    assert len(basis) == 3 + 6 + 9
    assert is_basis(view, basis)
    assert session.ledger.rounds <= PartitionConfig().round_cap(27)


def test_partition_find_basis_rank_zero():
    inst = PartitionMatroid([[0, 1], [2, 3]], [0, 0])
    session = QuerySession(inst, seed=0)
    view = MatroidView.full(inst)
    basis = partition_find_basis(view, session)
    assert basis == ElementSet(0)


def test_partition_find_basis_random_instances(rng):
    for trial in range(8):
        n = int(rng.integers(8, 60))
        ids = rng.permutation(n)
        k = int(rng.integers(2, 8))
        cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
        bounds = np.concatenate([[0], cuts, [n]])
        parts = [ids[a:b].tolist() for a, b in zip(bounds[:-1], bounds[1:])]
        budgets = [int(rng.integers(0, len(p) + 1)) for p in parts]
        inst = PartitionMatroid(parts, budgets)
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=trial)
        basis = partition_find_basis(view, session)
        assert is_basis(view, basis)
        assert len(basis) == inst.analytic_rank()


def test_banked_sets_stay_independent_along_the_way():
    # every prefix of the recovery keeps the banked set independent
    inst = generate_kuw_hard_instance(3, rng=np.random.default_rng(7))
    session = QuerySession(inst, seed=7)
    view = MatroidView.full(inst)
    trace = SolveTrace()
    basis = partition_find_basis(view, session, trace=trace)
    running = ElementSet(0)
    for part in trace.parts:
        running = running | part.members.lowest(part.budget)
        assert is_independent_immediate(view, running)


def test_alpha_growth_along_recovered_sets():
    # for peeled sets of comparable size, the dependence parameter grows at
    # least proportionally to the size ratio
    inst = generate_kuw_hard_instance(4, rng=np.random.default_rng(11))
    view = MatroidView.full(inst)
    session = QuerySession(inst, seed=11)
    trace = SolveTrace()
    partition_find_basis(view, session, trace=trace)
    sets = [s for s in trace.peeled_sets if len(s) <= 16]  # <= n^(2/3)
    est = QuerySession(inst, seed=99, budget=None)
    alphas = [alpha_estimate(view, s, est, 192).value for s in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if len(sets[i]) <= 2 * len(sets[j]):
                lhs = alphas[j]
                rhs = alphas[i] * len(sets[j]) / len(sets[i])
                assert lhs >= rhs / 2  # sandwich slack on both estimates


def test_iteration_count_scales_sublinearly():
    means = {}
    for m in (4, 8):
        iters = []
        for seed in range(20):
            inst = generate_kuw_hard_instance(m, rng=np.random.default_rng(seed))
            session = QuerySession(inst, seed=seed)
            trace = SolveTrace()
            partition_find_basis(MatroidView.full(inst), session, trace=trace)
            iters.append(max(1, trace.iterations))
        means[m] = float(np.mean(iters))
    assert means[8] / means[4] <= 2.5
