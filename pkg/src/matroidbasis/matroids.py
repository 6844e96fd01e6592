"""Concrete matroid instances and their compiled oracle form.

Five variants are supported: uniform, partition, graphic, linear over a
prime field, and direct sums of the above.  Instances are immutable after
construction and safe for concurrent read-only evaluation.

For query evaluation every instance compiles to one of three primitive
kinds (partition, graphic, linear) or a flat composite of primitives:

* uniform(r) compiles to a one-part partition with budget r,
* direct sums whose components share a primitive kind are merged,
* mixed direct sums stay composite and are split per component by the
  kernel dispatch layer.

The line-oriented instance file format is::

    matroid <variant> n=<int>
    # uniform:    rank <r>
    # partition:  part <budget> <id...>        (one line per part)
    # graphic:    edge <u> <v>                 (one line per element, index order)
    # linear:     field <p> / col <entries...> (one col line per element)
    # direct-sum: components <k> followed by k nested instance blocks,
    #             each with local element ids 0..n_i-1

Parsing and writing round-trip exactly for every variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .elements import ElementSet

PARTITION = 0
GRAPHIC = 1
LINEAR = 2
COMPOSITE = 3

MAX_FIELD = 1 << 16


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass
class CompiledMatroid:
    """Array form of an instance consumed by the evaluation kernels."""

    kind: int
    n: int
    # partition
    part_id: np.ndarray | None = None
    budgets: np.ndarray | None = None
    # graphic
    edge_u: np.ndarray | None = None
    edge_v: np.ndarray | None = None
    num_vertices: int = 0
    # linear
    columns: np.ndarray | None = None  # (rows, n) int64, entries in [0, p)
    p: int = 0
    inverses: np.ndarray | None = None  # multiplicative inverses mod p
    # composite
    comp_of: np.ndarray | None = None
    local_of: np.ndarray | None = None
    components: list["CompiledMatroid"] = field(default_factory=list)


class MatroidInstance:
    """Base class for concrete matroids answering independence queries."""

    n: int

    def compiled(self) -> CompiledMatroid:
        if getattr(self, "_compiled", None) is None:
            self._compiled = self._compile()
        return self._compiled

    def _compile(self) -> CompiledMatroid:
        raise NotImplementedError

    @property
    def variant(self) -> str:
        raise NotImplementedError

    def to_lines(self) -> list[str]:
        raise NotImplementedError

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("\n".join(self.to_lines()) + "\n")

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


class UniformMatroid(MatroidInstance):
    """All sets of size at most r are independent."""

    def __init__(self, rank: int, n: int):
        if rank < 0 or rank > n:
            raise ValueError(f"uniform rank must lie in [0, n], got {rank} for n={n}")
        self.rank = rank
        self.n = n

    @property
    def variant(self):
        return "uniform"

    def _compile(self):
        return CompiledMatroid(
            kind=PARTITION,
            n=self.n,
            part_id=np.zeros(self.n, dtype=np.int32),
            budgets=np.array([self.rank], dtype=np.int64),
        )

    def to_lines(self):
        return [f"matroid uniform n={self.n}", f"rank {self.rank}"]


class PartitionMatroid(MatroidInstance):
    """Disjoint parts with budgets; independent iff every budget is respected."""

    def __init__(self, parts: Sequence[Iterable[int]], budgets: Sequence[int]):
        if len(parts) != len(budgets):
            raise ValueError("parts and budgets must have equal length")
        self.parts = [ElementSet.from_indices(p) for p in parts]
        self.budgets = [int(b) for b in budgets]
        n = sum(len(p) for p in self.parts)
        union = ElementSet(0)
        for p in self.parts:
            if not union.isdisjoint(p):
                raise ValueError("parts must be disjoint")
            union = union | p
        if union != ElementSet.full(n):
            raise ValueError("parts must cover element ids 0..n-1 exactly")
        for p, b in zip(self.parts, self.budgets):
            if not 0 <= b <= len(p):
                raise ValueError(f"budget {b} outside [0, {len(p)}]")
        self.n = n

    @property
    def variant(self):
        return "partition"

    def analytic_rank(self) -> int:
        return sum(min(b, len(p)) for p, b in zip(self.parts, self.budgets))

    def _compile(self):
        part_id = np.empty(self.n, dtype=np.int32)
        for i, p in enumerate(self.parts):
            part_id[p.indices()] = i
        return CompiledMatroid(
            kind=PARTITION,
            n=self.n,
            part_id=part_id,
            budgets=np.array(self.budgets, dtype=np.int64),
        )

    def to_lines(self):
        lines = [f"matroid partition n={self.n}"]
        for p, b in zip(self.parts, self.budgets):
            ids = " ".join(str(i) for i in p)
            lines.append(f"part {b} {ids}".rstrip())
        return lines


class GraphicMatroid(MatroidInstance):
    """Edges of a multigraph; independent iff the edges form a forest."""

    def __init__(self, num_vertices: int, edges: Sequence[tuple[int, int]]):
        self.num_vertices = int(num_vertices)
        self.edges = [(int(u), int(v)) for u, v in edges]
        for u, v in self.edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
        self.n = len(self.edges)

    @property
    def variant(self):
        return "graphic"

    def _compile(self):
        eu = np.array([u for u, _ in self.edges], dtype=np.int32)
        ev = np.array([v for _, v in self.edges], dtype=np.int32)
        return CompiledMatroid(
            kind=GRAPHIC, n=self.n, edge_u=eu, edge_v=ev, num_vertices=self.num_vertices
        )

    def to_lines(self):
        lines = [f"matroid graphic n={self.n}"]
        lines.extend(f"edge {u} {v}" for u, v in self.edges)
        return lines


class LinearMatroid(MatroidInstance):
    """Columns of a matrix over GF(p); independent iff linearly independent."""

    def __init__(self, matrix, p: int):
        p = int(p)
        if not _is_prime(p) or p > MAX_FIELD:
            raise ValueError(f"field modulus must be a prime <= {MAX_FIELD}, got {p}")
        mat = np.asarray(matrix, dtype=np.int64) % p
        if mat.ndim != 2:
            raise ValueError("matrix must be 2-dimensional (rows x elements)")
        self.matrix = mat
        self.p = p
        self.n = mat.shape[1]

    @property
    def variant(self):
        return "linear"

    def _compile(self):
        inv = np.zeros(self.p, dtype=np.int64)
        for a in range(1, self.p):
            inv[a] = pow(a, self.p - 2, self.p)
        return CompiledMatroid(
            kind=LINEAR, n=self.n, columns=self.matrix, p=self.p, inverses=inv
        )

    def to_lines(self):
        lines = [f"matroid linear n={self.n}", f"field {self.p}"]
        for j in range(self.n):
            lines.append("col " + " ".join(str(int(x)) for x in self.matrix[:, j]))
        return lines


class DirectSumMatroid(MatroidInstance):
    """Direct sum: independent iff each component restriction is independent.

    Component element ids occupy consecutive global ranges in order.
    """

    def __init__(self, components: Sequence[MatroidInstance]):
        if not components:
            raise ValueError("direct sum needs at least one component")
        self.components = list(components)
        self.offsets = []
        n = 0
        for c in self.components:
            self.offsets.append(n)
            n += c.n
        self.n = n

    @property
    def variant(self):
        return "direct-sum"

    def _compile(self):
        compiled = [c.compiled() for c in self.components]
        kinds = {c.kind for c in compiled}
        if kinds == {PARTITION}:
            return self._merge_partition(compiled)
        if kinds == {GRAPHIC}:
            return self._merge_graphic(compiled)
        if kinds == {LINEAR} and len({c.p for c in compiled}) == 1:
            return self._merge_linear(compiled)
        comp_of = np.empty(self.n, dtype=np.int32)
        local_of = np.empty(self.n, dtype=np.int32)
        for i, (c, off) in enumerate(zip(compiled, self.offsets)):
            comp_of[off : off + c.n] = i
            local_of[off : off + c.n] = np.arange(c.n, dtype=np.int32)
        return CompiledMatroid(
            kind=COMPOSITE, n=self.n, comp_of=comp_of, local_of=local_of, components=compiled
        )

    def _merge_partition(self, compiled):
        part_id = np.empty(self.n, dtype=np.int32)
        budgets = []
        for c, off in zip(compiled, self.offsets):
            part_id[off : off + c.n] = c.part_id + len(budgets)
            budgets.extend(c.budgets.tolist())
        return CompiledMatroid(
            kind=PARTITION, n=self.n, part_id=part_id, budgets=np.array(budgets, dtype=np.int64)
        )

    def _merge_graphic(self, compiled):
        eu = np.empty(self.n, dtype=np.int32)
        ev = np.empty(self.n, dtype=np.int32)
        voff = 0
        for c, off in zip(compiled, self.offsets):
            eu[off : off + c.n] = c.edge_u + voff
            ev[off : off + c.n] = c.edge_v + voff
            voff += c.num_vertices
        return CompiledMatroid(kind=GRAPHIC, n=self.n, edge_u=eu, edge_v=ev, num_vertices=voff)

    def _merge_linear(self, compiled):
        p = compiled[0].p
        rows = sum(c.columns.shape[0] for c in compiled)
        mat = np.zeros((rows, self.n), dtype=np.int64)
        roff = 0
        for c, off in zip(compiled, self.offsets):
            r = c.columns.shape[0]
            mat[roff : roff + r, off : off + c.n] = c.columns
            roff += r
        return CompiledMatroid(kind=LINEAR, n=self.n, columns=mat, p=p, inverses=compiled[0].inverses)

    def to_lines(self):
        lines = [f"matroid direct-sum n={self.n}", f"components {len(self.components)}"]
        for c in self.components:
            lines.extend(c.to_lines())
        return lines


def _parse_block(lines: list[str], pos: int) -> tuple[MatroidInstance, int]:
    header = lines[pos].split()
    if len(header) != 3 or header[0] != "matroid" or not header[2].startswith("n="):
        raise ValueError(f"bad instance header: {lines[pos]!r}")
    variant = header[1]
    n = int(header[2][2:])
    pos += 1
    if variant == "uniform":
        tok = lines[pos].split()
        if tok[0] != "rank":
            raise ValueError(f"expected rank line, got {lines[pos]!r}")
        return UniformMatroid(int(tok[1]), n), pos + 1
    if variant == "partition":
        parts, budgets = [], []
        covered = 0
        while covered < n:
            tok = lines[pos].split()
            if tok[0] != "part":
                raise ValueError(f"expected part line, got {lines[pos]!r}")
            budgets.append(int(tok[1]))
            ids = [int(x) for x in tok[2:]]
            parts.append(ids)
            covered += len(ids)
            pos += 1
        return PartitionMatroid(parts, budgets), pos
    if variant == "graphic":
        edges = []
        for _ in range(n):
            tok = lines[pos].split()
            if tok[0] != "edge":
                raise ValueError(f"expected edge line, got {lines[pos]!r}")
            edges.append((int(tok[1]), int(tok[2])))
            pos += 1
        nv = 1 + max((max(u, v) for u, v in edges), default=-1)
        return GraphicMatroid(nv, edges), pos
    if variant == "linear":
        tok = lines[pos].split()
        if tok[0] != "field":
            raise ValueError(f"expected field line, got {lines[pos]!r}")
        p = int(tok[1])
        pos += 1
        cols = []
        for _ in range(n):
            tok = lines[pos].split()
            if tok[0] != "col":
                raise ValueError(f"expected col line, got {lines[pos]!r}")
            cols.append([int(x) for x in tok[1:]])
            pos += 1
        mat = np.array(cols, dtype=np.int64).T if cols else np.zeros((0, 0), dtype=np.int64)
        return LinearMatroid(mat, p), pos
    if variant == "direct-sum":
        tok = lines[pos].split()
        if tok[0] != "components":
            raise ValueError(f"expected components line, got {lines[pos]!r}")
        k = int(tok[1])
        pos += 1
        comps = []
        for _ in range(k):
            comp, pos = _parse_block(lines, pos)
            comps.append(comp)
        return DirectSumMatroid(comps), pos
    raise ValueError(f"unknown matroid variant {variant!r}")


def parse_instance(text: str) -> MatroidInstance:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    inst, pos = _parse_block(lines, 0)
    if pos != len(lines):
        raise ValueError("trailing content after instance definition")
    return inst


def read_instance(path) -> MatroidInstance:
    with open(path) as fh:
        return parse_instance(fh.read())


def generate_kuw_hard_instance(m: int, rng=None) -> PartitionMatroid:
    """Partition matroid with m parts of size m^2 and budget i*m for part i.

    Element-to-part assignment is uniformly random (seeded through ``rng``),
    so the part structure is hidden from index order.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = m**3
    perm = rng.permutation(n)
    parts = [perm[i * m * m : (i + 1) * m * m].tolist() for i in range(m)]
    budgets = [(i + 1) * m for i in range(m)]
    return PartitionMatroid(parts, budgets)
