"""Compiled and pure kernel backends must agree query-for-query."""

import numpy as np
import pytest

from matroidbasis import ElementSet, kernels
from matroidbasis.views import MatroidView, is_independent_immediate

from conftest import random_instance

pure = kernels.get_impl(False)
try:
    fast = kernels.get_impl(True)
    HAVE_FAST = True
except ImportError:  # pragma: no cover
    HAVE_FAST = False

needs_fast = pytest.mark.skipif(not HAVE_FAST, reason="compiled backend unavailable")


def _random_setup(rng, n):
    inst = random_instance(rng, n)
    cm = inst.compiled()
    empty = np.empty(0, dtype=np.int32)
    pool = rng.permutation(n)[: int(rng.integers(0, n // 2 + 1))].astype(np.int32)
    pre = kernels.greedy_scan(cm, empty, pool, impl=pure)
    alive = np.setdiff1d(np.arange(n, dtype=np.int32), pre)
    return inst, cm, np.asarray(pre, dtype=np.int32), alive


@needs_fast
def test_chain_and_circuit_agree(rng):
    for _ in range(60):
        n = int(rng.integers(3, 24))
        inst, cm, pre, alive = _random_setup(rng, n)
        if len(alive) == 0:
            continue
        chains = [rng.permutation(alive)[: int(rng.integers(1, len(alive) + 1))] for _ in range(5)]
        flat = np.concatenate(chains).astype(np.int32)
        off = np.cumsum([0] + [len(c) for c in chains]).astype(np.int64)
        t_p = kernels.chain_scan(cm, pre, flat, off, impl=pure)
        t_f = kernels.chain_scan(cm, pre, flat, off, impl=fast)
        assert np.array_equal(t_p, t_f)
        tp, fp, cp = kernels.circuit_scan(cm, pre, flat, off, impl=pure)
        tf, ff, cf = kernels.circuit_scan(cm, pre, flat, off, impl=fast)
        assert np.array_equal(tp, tf) and np.array_equal(cp, cf)
        # member sets agree per chain (order within a circuit may differ)
        bp = np.cumsum(np.r_[0, cp])
        for i in range(len(cp)):
            assert set(fp[bp[i] : bp[i + 1]].tolist()) == set(
                ff[bp[i] : bp[i + 1]].tolist()
            )


@needs_fast
def test_one_added_and_greedy_agree(rng):
    for _ in range(60):
        n = int(rng.integers(3, 24))
        inst, cm, pre, alive = _random_setup(rng, n)
        if len(alive) < 2:
            continue
        bases, cands = [], []
        for _ in range(4):
            k = int(rng.integers(0, min(4, len(alive))))
            b = rng.permutation(alive)[:k]
            rest = np.setdiff1d(alive, b)
            bases.append(b)
            cands.append(rng.permutation(rest)[: int(rng.integers(0, len(rest) + 1))])
        bflat = np.concatenate(bases).astype(np.int32)
        boff = np.cumsum([0] + [len(b) for b in bases]).astype(np.int64)
        cflat = np.concatenate(cands).astype(np.int32)
        coff = np.cumsum([0] + [len(c) for c in cands]).astype(np.int64)
        a_p = kernels.one_added_multi(cm, pre, bflat, boff, cflat, coff, impl=pure)
        a_f = kernels.one_added_multi(cm, pre, bflat, boff, cflat, coff, impl=fast)
        assert np.array_equal(a_p, a_f)
        order = rng.permutation(alive).astype(np.int32)
        g_p = kernels.greedy_scan(cm, pre, order, impl=pure)
        g_f = kernels.greedy_scan(cm, pre, order, impl=fast)
        assert np.array_equal(g_p, g_f)


def test_circuit_members_match_swap_semantics(rng):
    """Kernel circuits equal the set derivable from one-at-a-time queries."""
    for _ in range(40):
        n = int(rng.integers(3, 12))
        inst, cm, pre, alive = _random_setup(rng, n)
        if len(alive) == 0:
            continue
        view = MatroidView(
            inst,
            ElementSet.from_array(pre),
            ElementSet.full(n) - ElementSet.from_array(pre) - ElementSet.from_array(alive),
        )
        order = rng.permutation(alive).astype(np.int32)
        off = np.array([0, len(order)], dtype=np.int64)
        t_arr, flat, counts = kernels.circuit_scan(cm, pre, order, off)
        if t_arr[0] == 0:
            assert is_independent_immediate(view, ElementSet.from_array(order))
            continue
        t = int(t_arr[0])
        prefix = order[:t]
        # every prefix before t independent, prefix at t dependent
        assert is_independent_immediate(view, ElementSet.from_array(order[: t - 1]))
        assert not is_independent_immediate(view, ElementSet.from_array(prefix))
        got = set(flat[: counts[0]].tolist())
        trigger = int(order[t - 1])
        expect = {trigger}
        for i in range(t - 1):
            swapped = [int(x) for x in prefix if x != prefix[i]]
            if is_independent_immediate(view, ElementSet.from_indices(swapped)):
                expect.add(int(prefix[i]))
        assert got == expect


def test_parallel_classes_flag_loops_and_pairs(rng):
    for _ in range(30):
        n = int(rng.integers(2, 14))
        inst, cm, pre, alive = _random_setup(rng, n)
        if len(alive) == 0:
            continue
        view = MatroidView(
            inst,
            ElementSet.from_array(pre),
            ElementSet.full(n) - ElementSet.from_array(pre) - ElementSet.from_array(alive),
        )
        loops, cls = kernels.parallel_classes(cm, pre, alive)
        for i, e in enumerate(alive):
            single = ElementSet.from_indices([int(e)])
            assert bool(loops[i]) == (not is_independent_immediate(view, single))
        for i, e in enumerate(alive):
            for j, f in enumerate(alive):
                if i >= j or loops[i] or loops[j]:
                    continue
                pair = ElementSet.from_indices([int(e), int(f)])
                parallel = not is_independent_immediate(view, pair)
                same_class = cls[i] >= 0 and cls[i] == cls[j]
                assert parallel == same_class


def test_backend_name_reports():
    assert kernels.backend_name() in ("compiled", "pure")
