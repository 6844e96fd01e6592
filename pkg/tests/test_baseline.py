import math

import numpy as np

from matroidbasis import (
    ElementSet,
    GraphicMatroid,
    QuerySession,
    UniformMatroid,
    kuw_find_basis,
    kuw_round,
)
from matroidbasis.views import MatroidView, is_basis, rank_greedy

from conftest import random_instance
from oracles import brute_rank


def test_round_contracts_when_all_independent():
    inst = UniformMatroid(4, 4)
    session = QuerySession(inst)
    out = kuw_round(MatroidView.full(inst), session)
    assert out.deleted is None
    assert len(out.contracted) == 2  # groups of ceil(sqrt(4)) = 2
    assert session.ledger.rounds == 1


def test_round_deletes_first_breaker_per_group():
    inst = UniformMatroid(0, 4)
    session = QuerySession(inst)
    out = kuw_round(MatroidView.full(inst), session)
    assert out.contracted is None
    assert set(out.deleted) == {0, 2}


def test_round_on_triangle_groups():
    # groups over the triangle's edges: {e01, e12} is a forest, so the
    # first group is contracted (hand-checked against a union-find pass)
    inst = GraphicMatroid(3, [(0, 1), (1, 2), (0, 2)])
    session = QuerySession(inst)
    out = kuw_round(MatroidView.full(inst), session)
    assert out.contracted == ElementSet.from_indices([0, 1])


def test_find_basis_uniform_rounds():
    inst = UniformMatroid(3, 9)
    session = QuerySession(inst)
    basis = kuw_find_basis(MatroidView.full(inst), session)
    assert len(basis) == 3
    assert session.ledger.rounds <= 8


def test_find_basis_rank_zero():
    inst = UniformMatroid(0, 9)
    session = QuerySession(inst)
    basis = kuw_find_basis(MatroidView.full(inst), session)
    assert basis == ElementSet(0)


def test_find_basis_partition_example():
    from matroidbasis import PartitionMatroid

    inst = PartitionMatroid([[0, 1, 2, 3], [4, 5, 6, 7]], [1, 3])
    session = QuerySession(inst)
    basis = kuw_find_basis(MatroidView.full(inst), session)
    assert len(basis) == 4
    assert is_basis(MatroidView.full(inst), basis)


def test_deletions_never_change_rank(rng):
    for _ in range(25):
        inst = random_instance(rng, int(rng.integers(2, 16)))
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=0)
        before = rank_greedy(view)
        out = kuw_round(view, session)
        if out.deleted is not None:
            after = rank_greedy(view.delete(out.deleted))
            assert after == before


def test_round_bound_and_validity_over_corpus(rng):
    for trial in range(60):
        n = int(rng.integers(2, 40))
        inst = random_instance(rng, n)
        view = MatroidView.full(inst)
        session = QuerySession(inst, seed=trial)
        basis = kuw_find_basis(view, session)
        assert is_basis(view, basis)
        assert len(basis) == brute_rank(view) if n <= 12 else True
        assert session.ledger.rounds <= 2 * math.ceil(math.sqrt(n)) + 2


def test_rounds_scale_with_sqrt_n():
    for n in (64, 256, 1024):
        inst = UniformMatroid(n // 2, n)
        session = QuerySession(inst, seed=1)
        kuw_find_basis(MatroidView.full(inst), session)
        assert session.ledger.rounds <= 3 * math.sqrt(n)
