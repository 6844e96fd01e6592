"""Instance generation, experiment orchestration, and CSV emission.

A sweep runs (family, n, seed, algorithm) cells, each with a fresh seeded
session, validates the returned basis against the greedy rank oracle, and
appends one record.  Per-run errors are captured in the record instead of
aborting the sweep.  With timing disabled the CSV is byte-reproducible
for identical specs and seeds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .baseline import kuw_find_basis
from .decomposition import DecompConfig
from .elements import ElementSet
from .general import GeneralConfig, general_find_basis
from .matroids import (
    DirectSumMatroid,
    GraphicMatroid,
    LinearMatroid,
    MatroidInstance,
    PartitionMatroid,
    UniformMatroid,
    generate_kuw_hard_instance,
)
from .partition import PartitionConfig, partition_find_basis
from .session import QuerySession
from .views import MatroidView, is_basis, rank_greedy

CSV_HEADER = "family,n,seed,algorithm,rounds,queries,basis_size,rank,valid,wall_ms"

FAMILIES = ("kuw-hard", "random-partition", "random-graph", "random-linear", "uniform", "mixed")
ALGORITHMS = ("kuw", "partition", "general")


def generate_instance(family: str, params: dict, seed: int) -> MatroidInstance:
    """Deterministic instance for (family, params, seed)."""
    rng = np.random.default_rng(seed)
    if family == "kuw-hard":
        m = int(params.get("m") or round(int(params["n"]) ** (1 / 3)))
        if "n" in params and m**3 != int(params["n"]):
            raise ValueError(f"kuw-hard needs a cube size, got n={params['n']}")
        return generate_kuw_hard_instance(m, rng)
    if family == "uniform":
        n = int(params["n"])
        r = int(params.get("r", max(1, n // 4)))
        return UniformMatroid(r, n)
    if family == "random-partition":
        n = int(params["n"])
        k = int(params.get("parts", max(2, n // 16)))
        cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False)) if k > 1 else np.array([], dtype=int)
        bounds = np.concatenate([[0], cuts, [n]])
        ids = rng.permutation(n)
        parts, budgets = [], []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            members = ids[lo:hi]
            parts.append(members.tolist())
            budgets.append(int(rng.integers(0, len(members) + 1)))
        return PartitionMatroid(parts, budgets)
    if family == "random-graph":
        n = int(params["n"])  # number of edges = elements
        v = int(params.get("v", max(2, math.ceil(math.sqrt(n) * 1.5))))
        eu = rng.integers(0, v, size=n)
        ev = rng.integers(0, v, size=n)
        return GraphicMatroid(v, list(zip(eu.tolist(), ev.tolist())))
    if family == "random-linear":
        n = int(params["n"])
        r = int(params.get("r", max(1, n // 6)))
        p = int(params.get("p", 7))
        mat = rng.integers(0, p, size=(r, n))
        return LinearMatroid(mat, p)
    if family == "mixed":
        n = int(params["n"])
        third = max(2, n // 3)
        rest = n - 2 * third
        comp1 = generate_instance("uniform", {"n": third, "r": max(1, third // 3)}, seed)
        comp2 = generate_instance("random-graph", {"n": third}, seed + 1)
        comp3 = generate_instance("random-partition", {"n": rest, "parts": max(2, rest // 8)}, seed + 2)
        return DirectSumMatroid([comp1, comp2, comp3])
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    family: str
    sizes: tuple[int, ...]
    seeds: tuple[int, ...]
    algorithm: str
    params: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be ascending")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


@dataclass
class ExperimentRecord:
    family: str
    n: int
    seed: int
    algorithm: str
    rounds: int
    total_queries: int
    basis_size: int
    rank: int
    valid: bool
    wall_ms: int

    def csv_row(self, timing: bool = True) -> str:
        ms = self.wall_ms if timing else 0
        return (
            f"{self.family},{self.n},{self.seed},{self.algorithm},{self.rounds},"
            f"{self.total_queries},{self.basis_size},{self.rank},"
            f"{str(self.valid).lower()},{ms}"
        )


def _configs(overrides: dict) -> tuple[PartitionConfig, GeneralConfig]:
    pkw, dkw = {}, {}
    if "samples" in overrides:
        pkw["samples"] = int(overrides["samples"])
        dkw["samples"] = int(overrides["samples"])
    if "epsilon" in overrides:
        dkw["epsilon"] = Fraction(overrides["epsilon"])
    if "budget_threshold" in overrides:
        pkw["small_part_threshold"] = int(overrides["budget_threshold"])
        dkw["small_circuit_threshold"] = int(overrides["budget_threshold"])
    return PartitionConfig(**pkw), GeneralConfig(decomp=DecompConfig(**dkw))


def solve_instance(
    instance: MatroidInstance,
    algorithm: str,
    seed: int,
    overrides: dict | None = None,
    run_log: list[str] | None = None,
) -> tuple[ElementSet, QuerySession]:
    session = QuerySession(instance, seed=seed)
    view = MatroidView.full(instance)
    pcfg, gcfg = _configs(overrides or {})
    if algorithm == "kuw":
        basis = kuw_find_basis(view, session)
    elif algorithm == "partition":
        basis = partition_find_basis(view, session, pcfg)
    elif algorithm == "general":
        basis = general_find_basis(view, session, gcfg, run_log=run_log)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return basis, session


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRecord]:
    records = []
    for n in spec.sizes:
        params = dict(spec.params)
        params["n"] = n
        for seed in spec.seeds:
            instance = generate_instance(spec.family, params, seed)
            start = time.perf_counter()
            rounds = queries = basis_size = 0
            valid = False
            rank = rank_greedy(MatroidView.full(instance))
            try:
                basis, session = solve_instance(instance, spec.algorithm, seed, spec.overrides)
                rounds = session.ledger.rounds
                queries = session.ledger.total_queries
                basis_size = len(basis)
                valid = basis_size == rank and is_basis(MatroidView.full(instance), basis)
            except Exception:
                valid = False  # captured in the record; the sweep keeps going
            wall_ms = int((time.perf_counter() - start) * 1000)
            records.append(
                ExperimentRecord(
                    family=spec.family,
                    n=instance.n,
                    seed=seed,
                    algorithm=spec.algorithm,
                    rounds=rounds,
                    total_queries=queries,
                    basis_size=basis_size,
                    rank=rank,
                    valid=valid,
                    wall_ms=wall_ms,
                )
            )
    return records


def records_to_csv(records: list[ExperimentRecord], timing: bool = True) -> str:
    lines = [CSV_HEADER]
    lines.extend(r.csv_row(timing) for r in records)
    return "\n".join(lines) + "\n"
