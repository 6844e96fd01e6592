import math
from fractions import Fraction

import numpy as np
import pytest

from matroidbasis import (
    DecompConfig,
    DirectSumMatroid,
    ElementSet,
    GraphicMatroid,
    PartitionMatroid,
    PreconditionError,
    QuerySession,
    StopReason,
    UniformMatroid,
    alpha_estimate,
    early_stop_decomposition,
    find_circuit,
    find_greedily_optimal,
    iterative_peel,
    peel,
    q_hat,
    remove_small_circuits,
    sample_ensemble,
)
from matroidbasis.decomposition import certify_greedily_optimal, harmonic
from matroidbasis.views import MatroidView, is_independent_immediate, rank_greedy

from conftest import random_instance
from oracles import brute_first_circuit, exact_alpha, exact_q

TWO_PART = PartitionMatroid([[0, 1, 2], [3, 4, 5, 6, 7, 8, 9, 10]], [1, 7])


def test_find_circuit_uniform():
    inst = UniformMatroid(2, 4)
    session = QuerySession(inst)
    sample = find_circuit(MatroidView.full(inst), np.array([0, 1, 2, 3]), session)
    assert sample.trigger_index == 3
    assert set(sample.circuit) == {0, 1, 2}


def test_find_circuit_triangle():
    inst = GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])
    session = QuerySession(inst)
    sample = find_circuit(MatroidView.full(inst), np.array([2, 0, 1]), session)
    assert set(sample.circuit) == {0, 1, 2}
    assert sample.trigger_index == 3


def test_find_circuit_partition_order():
    # dependence first appears at the second element of the small part
    inst = PartitionMatroid([[0, 1, 2], [3, 4]], [1, 2])
    session = QuerySession(inst)
    sample = find_circuit(MatroidView.full(inst), np.array([3, 0, 4, 1, 2]), session)
    assert sample.trigger_index == 4
    assert set(sample.circuit) == {0, 1}


def test_find_circuit_independent_signal():
    inst = UniformMatroid(4, 4)
    session = QuerySession(inst)
    assert find_circuit(MatroidView.full(inst), np.arange(4), session) is None


def test_find_circuit_matches_brute_force(rng):
    for _ in range(40):
        inst = random_instance(rng, int(rng.integers(2, 9)))
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=0, budget=None)
        order = rng.permutation(inst.n)
        got = find_circuit(view, order, session)
        want = brute_first_circuit(view, order)
        if want is None:
            assert got is None
        else:
            assert got.trigger_index == want[0]
            assert frozenset(got.circuit) == want[1]


def test_samples_are_true_circuits(rng):
    for _ in range(15):
        inst = random_instance(rng, int(rng.integers(3, 10)))
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=1, budget=None)
        ens = sample_ensemble(view, session, 30)
        for sample in ens.samples:
            assert not is_independent_immediate(view, sample.circuit)
            for x in sample.circuit:
                assert is_independent_immediate(view, sample.circuit.remove(x))


def test_sample_ensemble_uniform_sizes():
    inst = UniformMatroid(2, 10)
    session = QuerySession(inst, seed=0, budget=None)
    ens = sample_ensemble(MatroidView.full(inst), session, 100)
    assert ens.sample_count == 100
    assert all(len(s.circuit) == 3 for s in ens.samples)
    assert session.ledger.rounds == 1


def test_sample_ensemble_count_zero_rejected():
    inst = UniformMatroid(2, 10)
    session = QuerySession(inst)
    with pytest.raises(PreconditionError):
        sample_ensemble(MatroidView.full(inst), session, 0)


def test_sample_ensemble_on_independent_view():
    inst = UniformMatroid(5, 5)
    session = QuerySession(inst, seed=0)
    ens = sample_ensemble(MatroidView.full(inst), session, 20)
    assert ens.sample_count == 0
    assert ens.no_circuit_count == 20


def test_q_hat_extremes():
    inst = UniformMatroid(2, 6)
    session = QuerySession(inst, seed=2, budget=None)
    view = MatroidView.full(inst)
    ens = sample_ensemble(view, session, 64)
    assert q_hat(ens, view.alive) == 1
    assert q_hat(ens, ElementSet(0)) == 0


def test_q_hat_against_exact(rng):
    # small-part-dominated instance: exact q from full permutation enumeration
    inst = PartitionMatroid([[0, 1, 2], [3, 4, 5, 6, 7]], [1, 4])
    view = MatroidView.full(inst)
    s = ElementSet.from_indices([0, 1, 2])
    truth = exact_q(view, s)
    session = QuerySession(inst, seed=5, budget=None)
    count = 4000
    ens = sample_ensemble(view, session, count)
    se = math.sqrt(truth * (1 - truth) / count)
    assert abs(float(q_hat(ens, s)) - truth) <= 3 * se + 1e-9


def test_greedily_optimal_small_part_with_sharp_epsilon():
    # the small-budget part dominates first circuits; with a desk-scale
    # epsilon the whittle strips the big part entirely
    session = QuerySession(TWO_PART, seed=7, budget=None)
    cfg = DecompConfig(samples=4000, epsilon=Fraction(1, 8))
    gos = find_greedily_optimal(MatroidView.full(TWO_PART), session, cfg)
    assert set(gos.members) == {0, 1, 2}
    ups, mins = certify_greedily_optimal(gos, _fresh_ensemble(TWO_PART, 4000, seed=8))
    assert session.ledger.rounds == 1


def _fresh_ensemble(inst, count, seed):
    session = QuerySession(inst, seed=seed, budget=None)
    return sample_ensemble(MatroidView.full(inst), session, count)


def test_greedily_optimal_certificate_is_exact(rng):
    for trial in range(10):
        inst = random_instance(rng, int(rng.integers(4, 14)))
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=trial, budget=None)
        cfg = DecompConfig(samples=500)
        ens = sample_ensemble(view, session, 500)
        if ens.sample_count == 0:
            continue
        gos = find_greedily_optimal(view, session, cfg, ensemble=ens)
        upper, minimal = certify_greedily_optimal(gos, ens)
        assert upper and minimal


def test_greedily_optimal_uniform_rank1_keeps_everything():
    inst = UniformMatroid(1, 5)
    session = QuerySession(inst, seed=3)
    gos = find_greedily_optimal(MatroidView.full(inst), session, DecompConfig(samples=400))
    assert set(gos.members) == set(range(5))
    assert gos.q_hat == 1


def test_greedily_optimal_isolates_loop():
    # a loop is the first circuit of every permutation
    inst = PartitionMatroid([[0], [1, 2, 3, 4]], [0, 4])
    session = QuerySession(inst, seed=4)
    gos = find_greedily_optimal(MatroidView.full(inst), session, DecompConfig(samples=200))
    assert set(gos.members) == {0}
    assert gos.q_hat == 1


def test_greedily_optimal_independent_signal():
    inst = UniformMatroid(5, 5)
    session = QuerySession(inst, seed=0)
    assert find_greedily_optimal(MatroidView.full(inst), session, DecompConfig(samples=64)) is None


def test_alpha_uniform_exact():
    inst = UniformMatroid(3, 12)
    session = QuerySession(inst, seed=0)
    view = MatroidView.full(inst)
    a = alpha_estimate(view, view.alive, session, 64)
    assert a.value == 4  # every permutation triggers at r + 1
    assert session.ledger.rounds == 1


def test_alpha_partition_part():
    inst = PartitionMatroid([[0, 1, 2, 3, 4], [5, 6]], [2, 2])
    session = QuerySession(inst, seed=0)
    view = MatroidView.full(inst)
    a = alpha_estimate(view, ElementSet.from_indices([0, 1, 2, 3, 4]), session, 64)
    assert a.value == 3  # budget + 1


def test_alpha_matches_exhaustive(rng):
    for _ in range(12):
        inst = random_instance(rng, int(rng.integers(3, 8)))
        view = MatroidView.full(inst)
        k = int(rng.integers(2, inst.n + 1))
        s = ElementSet.from_array(rng.permutation(inst.n)[:k])
        truth = exact_alpha(view, s)
        session = QuerySession(inst, seed=9, budget=None)
        a = alpha_estimate(view, s, session, 256)
        assert (truth - 1) // 2 <= a.value <= 2 * truth


def test_remove_small_circuits_parallel_edge():
    inst = GraphicMatroid(4, [(0, 1), (0, 1), (1, 2), (2, 3)])
    session = QuerySession(inst)
    view = MatroidView.full(inst)
    out = remove_small_circuits(view, session, 2)
    assert set(out.alive) == {1, 2, 3}  # lowest id of the doubled edge goes
    assert rank_greedy(out) == rank_greedy(view)
    assert session.ledger.rounds == 1


def test_remove_small_circuits_loop():
    inst = GraphicMatroid(3, [(0, 0), (0, 1), (1, 2)])
    session = QuerySession(inst)
    out = remove_small_circuits(MatroidView.full(inst), session, 1)
    assert set(out.alive) == {1, 2}


def test_remove_small_circuits_uniform_untouched():
    inst = UniformMatroid(5, 10)
    session = QuerySession(inst)
    view = MatroidView.full(inst)
    out = remove_small_circuits(view, session, 3)
    assert out.alive == view.alive


def test_remove_small_circuits_preserves_rank(rng):
    for theta in (1, 2, 3):
        for _ in range(12):
            inst = random_instance(rng, int(rng.integers(2, 12)))
            view = MatroidView.full(inst)
            session = QuerySession(inst, seed=0, budget=None)
            out = remove_small_circuits(view, session, theta)
            assert rank_greedy(out) == rank_greedy(view)
            if theta >= 1:
                for x in out.alive:
                    assert is_independent_immediate(out, ElementSet.from_indices([x]))


def test_peel_single_circuit_consumes_it():
    inst = UniformMatroid(3, 4)  # the whole set is one circuit
    session = QuerySession(inst, seed=0)
    gos, rest = peel(MatroidView.full(inst), session, DecompConfig(samples=128))
    assert set(gos.members) == {0, 1, 2, 3}
    assert not rest.alive


def test_peel_independent_signal():
    inst = UniformMatroid(4, 4)
    session = QuerySession(inst, seed=0)
    gos, rest = peel(MatroidView.full(inst), session, DecompConfig(samples=64))
    assert gos is None and rest.alive == ElementSet.full(4)


def _three_part_sum():
    # budgets separated enough that each part's circuits dominate in turn
    # (budget-1 parts would be parallel classes, eaten by the small-circuit
    # sweep, so the smallest budget here is 3)
    return PartitionMatroid(
        [list(range(0, 16)), list(range(16, 32)), list(range(32, 48))], [3, 8, 12]
    )


THREE_PART_CFG = DecompConfig(
    samples=3000, epsilon=Fraction(1, 8), large_alpha_c=Fraction(4)
)


def test_iterative_peel_budget_order():
    inst = _three_part_sum()
    hits = 0
    for seed in range(5):
        session = QuerySession(inst, seed=seed, budget=None)
        d = iterative_peel(MatroidView.full(inst), session, THREE_PART_CFG)
        if [set(s) for s in d.sets] == [
            set(range(0, 16)),
            set(range(16, 32)),
            set(range(32, 48)),
        ]:
            hits += 1
    assert hits >= 4  # smallest-budget part dominates circuits, then the next


def test_iterative_peel_independent_instance():
    inst = UniformMatroid(6, 6)
    session = QuerySession(inst, seed=0)
    d = iterative_peel(MatroidView.full(inst), session, DecompConfig(samples=64))
    assert d.sets == ()
    assert d.stop_reason is StopReason.EXHAUSTED
    assert d.residual_independent


def test_iterative_peel_dump_format():
    inst = _three_part_sum()
    session = QuerySession(inst, seed=1, budget=None)
    d = iterative_peel(MatroidView.full(inst), session, THREE_PART_CFG)
    lines = d.dump_lines()
    assert len(lines) == 3
    first = lines[0].split()
    assert first[0] == "set" and first[1] == "1"
    assert first[2].startswith("alpha=") and first[3].startswith("size=16")
    assert lines[0].count("members=") == 1


def test_early_stop_large_alpha_on_uniform_quarter():
    inst = UniformMatroid(64, 256)
    session = QuerySession(inst, seed=0)
    d = early_stop_decomposition(MatroidView.full(inst), session, DecompConfig(samples=2000))
    assert d.stop_reason is StopReason.LARGE_ALPHA
    assert d.sets == ()
    assert d.stopped_set is not None
    assert d.view_before_stop.alive == ElementSet.full(256)
    assert d.stopped_alpha.value == 65


def test_early_stop_half_consumed_on_tiny_budget_parts():
    # dependent mass sits in small-budget parts covering > half the ground
    # set; one peel consumes them and the loop stops below half
    parts = [list(range(i * 10, (i + 1) * 10)) for i in range(20)]
    budgets = [1] * 20
    free = [list(range(200, 256))]
    inst = DirectSumMatroid(
        [PartitionMatroid(parts, budgets), UniformMatroid(56, 56)]
    )
    session = QuerySession(inst, seed=3)
    d = early_stop_decomposition(MatroidView.full(inst), session, DecompConfig())
    assert d.stop_reason is StopReason.HALF_CONSUMED
    assert len(d.residual_view.alive) < 128


def test_early_stop_empty_view():
    inst = UniformMatroid(0, 4)
    session = QuerySession(inst, seed=0)
    d = early_stop_decomposition(MatroidView.full(inst), session, DecompConfig())
    assert d.stop_reason is StopReason.EXHAUSTED
    assert d.sets == ()
    assert len(d.removed_small) == 4  # rank-0 singletons are loops


def test_harmonic_cache():
    assert harmonic(1) == 1
    assert harmonic(3) == Fraction(11, 6)
    assert harmonic(0) == 0
