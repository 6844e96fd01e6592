import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from matroidbasis import (
    DirectSumMatroid,
    GraphicMatroid,
    LinearMatroid,
    PartitionMatroid,
    UniformMatroid,
)


def random_instance(rng: np.random.Generator, n: int, family: str | None = None):
    """Small random instance of a random (or given) family."""
    fam = family or rng.choice(["uniform", "partition", "graphic", "linear", "mixed"])
    if fam == "uniform":
        return UniformMatroid(int(rng.integers(0, n + 1)), n)
    if fam == "partition":
        ids = rng.permutation(n)
        k = int(rng.integers(1, max(2, n // 2)))
        cuts = (
            np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
            if k > 1
            else np.array([], dtype=int)
        )
        bounds = np.concatenate([[0], cuts, [n]])
        parts = [ids[a:b].tolist() for a, b in zip(bounds[:-1], bounds[1:])]
        budgets = [int(rng.integers(0, len(p) + 1)) for p in parts]
        return PartitionMatroid(parts, budgets)
    if fam == "graphic":
        v = int(rng.integers(2, max(3, n)))
        edges = [(int(rng.integers(0, v)), int(rng.integers(0, v))) for _ in range(n)]
        return GraphicMatroid(v, edges)
    if fam == "linear":
        p = int(rng.choice([2, 3, 5, 7]))
        r = int(rng.integers(1, max(2, n // 2 + 1)))
        return LinearMatroid(rng.integers(0, p, size=(r, n)), p)
    if fam == "mixed":
        half = max(1, n // 2)
        left = random_instance(rng, half, str(rng.choice(["uniform", "partition", "graphic"])))
        right = random_instance(rng, n - half, str(rng.choice(["graphic", "linear"])))
        return DirectSumMatroid([left, right])
    raise ValueError(fam)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
