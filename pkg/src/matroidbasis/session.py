"""Batched query sessions and adaptive-round accounting.

A round is one flush of a batch of pending queries: answers become
observable only after the flush that contains them, which is what makes
the ledger's ``rounds`` field the semantic measure of adaptivity.  The
per-round query budget (default n^4 of the original ground set) is
enforced at submission time.

Algorithms submit *query plans*: either single sets or structured
families (prefix chains, circuit probes, one-element-added batches,
small-subset scans).  A structured plan is accounted as the full
non-adaptive family of elementary queries it stands for -- e.g. a circuit
probe over L elements counts the L prefixes plus the L(L-1)/2
one-element-swapped prefixes that a single-round implementation submits
obliviously -- while evaluation exploits the family structure and runs in
O(L) per probe.  Replaying a seed reproduces identical (rounds, queries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import kernels
from .elements import ElementSet
from .errors import BudgetError, PreconditionError, SequencingError
from .matroids import MatroidInstance
from .views import MatroidView

_UNSET = object()


class QueryTicket:
    """Handle for a pending query plan; redeemable after the next flush."""

    __slots__ = ("_value",)

    def __init__(self):
        self._value = _UNSET

    @property
    def ready(self) -> bool:
        return self._value is not _UNSET

    def result(self):
        if self._value is _UNSET:
            raise SequencingError("ticket redeemed before its batch was flushed")
        return self._value

    def _fulfill(self, value):
        self._value = value


@dataclass
class RoundLedger:
    rounds: int = 0
    total_queries: int = 0
    history: list[tuple[int, int, int]] = field(default_factory=list)

    def record_flush(self, batch_size: int) -> None:
        if batch_size <= 0:
            return
        self.rounds += 1
        self.total_queries += batch_size
        self.history.append((self.rounds, batch_size, self.total_queries))

    def to_csv(self) -> str:
        lines = ["round,batch_size,cumulative_queries"]
        lines.extend(f"{r},{b},{c}" for r, b, c in self.history)
        return "\n".join(lines) + "\n"


class _Plan:
    __slots__ = ("view", "queries", "ticket")

    def __init__(self, view: MatroidView, queries: int):
        self.view = view
        self.queries = queries
        self.ticket = QueryTicket()

    def evaluate(self):  # pragma: no cover - abstract
        raise NotImplementedError


class _SetsPlan(_Plan):
    __slots__ = ("flat", "offsets")

    def __init__(self, view, flat, offsets):
        super().__init__(view, len(flat))
        self.flat = flat
        self.offsets = offsets

    def evaluate(self):
        ans = kernels.set_eval(
            self.view.base.compiled(), self.view.contracted_idx, self.flat, self.offsets
        )
        return ans.astype(bool)


class _ChainsPlan(_Plan):
    __slots__ = ("flat", "offsets")

    def __init__(self, view, flat, offsets):
        super().__init__(view, len(flat))
        self.flat = flat
        self.offsets = offsets

    def evaluate(self):
        return kernels.chain_scan(
            self.view.base.compiled(), self.view.contracted_idx, self.flat, self.offsets
        )


def _swap_family_size(lengths: np.ndarray) -> int:
    # all prefixes plus, for every candidate trigger position t, the t-1
    # one-element-swapped prefixes
    return int(np.sum(lengths * (lengths - 1) // 2))


class _CircuitProbesPlan(_Plan):
    __slots__ = ("flat", "offsets")

    def __init__(self, view, flat, offsets):
        lengths = np.diff(offsets)
        super().__init__(view, int(lengths.sum()) + _swap_family_size(lengths))
        self.flat = flat
        self.offsets = offsets

    def evaluate(self):
        t_arr, cflat, ccnt = kernels.circuit_scan(
            self.view.base.compiled(), self.view.contracted_idx, self.flat, self.offsets
        )
        out = []
        pos = 0
        for t, cnt in zip(t_arr, ccnt):
            if t == 0:
                out.append(None)
            else:
                out.append((int(t), cflat[pos : pos + cnt]))
                pos += cnt
        return out


class _OneAddedPlan(_Plan):
    __slots__ = ("bases", "boff", "cands", "coff")

    def __init__(self, view, bases, boff, cands, coff):
        super().__init__(view, len(cands))
        self.bases = bases
        self.boff = boff
        self.cands = cands
        self.coff = coff

    def evaluate(self):
        ans = kernels.one_added_multi(
            self.view.base.compiled(),
            self.view.contracted_idx,
            self.bases,
            self.boff,
            self.cands,
            self.coff,
        )
        out = []
        for k in range(len(self.boff) - 1):
            out.append(ans[self.coff[k] : self.coff[k + 1]].astype(bool))
        return out


class _RedundantProbesPlan(_Plan):
    """For each prefix A_i: elements of the candidate pool that close a
    circuit with some independent prefix of A_i.

    Stands for the oblivious family {Ind(prefix_j), Ind(prefix_j + x)} for
    every j <= t and candidate x; by downward closure the answer per x is
    determined by the longest independent prefix.
    """

    __slots__ = ("prefixes", "poff", "cands")

    def __init__(self, view, prefixes, poff, cands):
        lengths = np.diff(poff)
        super().__init__(view, int(lengths.sum()) + int(lengths.sum()) * len(cands))
        self.prefixes = prefixes
        self.poff = poff
        self.cands = cands

    def evaluate(self):
        cm = self.view.base.compiled()
        pre = self.view.contracted_idx
        t_arr = kernels.chain_scan(cm, pre, self.prefixes, self.poff)
        nprobes = len(self.poff) - 1
        bases = []
        boff = [0]
        coff = [0]
        cands_all = []
        for i in range(nprobes):
            chunk = self.prefixes[self.poff[i] : self.poff[i + 1]]
            lind = len(chunk) if t_arr[i] == 0 else int(t_arr[i]) - 1
            bases.append(chunk[:lind])
            boff.append(boff[-1] + lind)
            cands_all.append(self.cands)
            coff.append(coff[-1] + len(self.cands))
        ans = kernels.one_added_multi(
            cm,
            pre,
            np.concatenate(bases) if bases else np.empty(0, dtype=np.int32),
            np.array(boff, dtype=np.int64),
            np.concatenate(cands_all) if cands_all else np.empty(0, dtype=np.int32),
            np.array(coff, dtype=np.int64),
        )
        out = []
        for i in range(nprobes):
            caught = ~ans[coff[i] : coff[i + 1]].astype(bool)
            out.append(caught)
        return out


class _SmallScanPlan(_Plan):
    __slots__ = ("max_size", "mode")

    def __init__(self, view, max_size: int, mode: str):
        n_alive = len(view.alive)
        total = sum(math.comb(n_alive, i) for i in range(1, max_size + 1))
        super().__init__(view, total)
        self.max_size = max_size
        self.mode = mode

    def evaluate(self):
        cm = self.view.base.compiled()
        pre = self.view.contracted_idx
        alive = self.view.alive_idx
        if self.mode == "parts":
            return kernels.small_part_groups(cm, pre, alive, self.max_size - 1)
        return kernels.parallel_classes(cm, pre, alive)


_DEFAULT_BUDGET = object()


class QuerySession:
    """Single-writer batched-query session with a seeded generator.

    All randomness used by the solvers flows through ``self.rng`` so a
    (seed, config) pair reproduces identical rounds, queries, and output.
    The per-round budget defaults to n^4 of the original ground set;
    ``budget=None`` lifts it entirely.
    """

    def __init__(self, instance: MatroidInstance, *, seed: int = 0, budget=_DEFAULT_BUDGET):
        self.instance = instance
        self.rng = np.random.default_rng(seed)
        self.seed = seed
        if budget is _DEFAULT_BUDGET:
            budget = max(1, instance.n) ** 4
        self.budget = budget
        self.ledger = RoundLedger()
        self._pending: list[_Plan] = []
        self._pending_queries = 0

    # ------------------------------------------------------------- plumbing

    def _submit(self, plan: _Plan) -> QueryTicket:
        if self.budget is not None and self._pending_queries + plan.queries > self.budget:
            raise BudgetError(
                self.ledger.rounds, self._pending_queries + plan.queries, self.budget
            )
        self._pending.append(plan)
        self._pending_queries += plan.queries
        return plan.ticket

    def flush(self) -> list[tuple[QueryTicket, Any]]:
        """Evaluate the pending batch; one non-empty batch = one round."""
        answered = []
        for plan in self._pending:
            value = plan.evaluate()
            plan.ticket._fulfill(value)
            answered.append((plan.ticket, value))
        self.ledger.record_flush(self._pending_queries)
        self._pending.clear()
        self._pending_queries = 0
        return answered

    # ------------------------------------------------------------ submitters

    def submit_query(self, view: MatroidView, s: ElementSet) -> QueryTicket:
        """One elementary independence query Ind(s) against ``view``."""
        view.require_alive(s)
        idx = s.indices()
        plan = _SingleSetPlan(view, idx)
        return self._submit(plan)

    def submit_sets(self, view: MatroidView, sets: Sequence[np.ndarray]) -> QueryTicket:
        flat, off = _pack(view, sets)
        return self._submit(_SetsPlan(view, flat, off))

    def submit_chains(self, view: MatroidView, orders: Sequence[np.ndarray]) -> QueryTicket:
        flat, off = _pack(view, orders)
        return self._submit(_ChainsPlan(view, flat, off))

    def submit_circuit_probes(self, view: MatroidView, perms: Sequence[np.ndarray]) -> QueryTicket:
        flat, off = _pack(view, perms)
        return self._submit(_CircuitProbesPlan(view, flat, off))

    def submit_one_added(
        self,
        view: MatroidView,
        bases: Sequence[np.ndarray],
        cands: Sequence[np.ndarray],
    ) -> QueryTicket:
        if len(bases) != len(cands):
            raise PreconditionError("bases and candidate lists must align")
        bflat, boff = _pack(view, bases)
        cflat, coff = _pack(view, cands)
        return self._submit(_OneAddedPlan(view, bflat, boff, cflat, coff))

    def submit_redundant_probes(
        self, view: MatroidView, prefixes: Sequence[np.ndarray], cands: np.ndarray
    ) -> QueryTicket:
        pflat, poff = _pack(view, prefixes)
        cands = np.ascontiguousarray(cands, dtype=np.int32)
        _check_alive(view, cands)
        return self._submit(_RedundantProbesPlan(view, pflat, poff, cands))

    def submit_small_scan(self, view: MatroidView, max_size: int, mode: str) -> QueryTicket:
        if max_size < 1:
            raise PreconditionError("max_size must be >= 1")
        return self._submit(_SmallScanPlan(view, max_size, mode))

    # ------------------------------------------------------------- helpers

    def permutations(self, pool: np.ndarray, count: int) -> np.ndarray:
        """``count`` independent permutations of ``pool`` as a 2-D array."""
        tiles = np.tile(pool, (count, 1))
        if tiles.size:
            self.rng.permuted(tiles, axis=1, out=tiles)
        return tiles


class _SingleSetPlan(_Plan):
    __slots__ = ("idx",)

    def __init__(self, view, idx):
        super().__init__(view, 1)
        self.idx = idx

    def evaluate(self):
        off = np.array([0, len(self.idx)], dtype=np.int64)
        ans = kernels.set_eval(
            self.view.base.compiled(), self.view.contracted_idx, self.idx, off
        )
        return bool(ans[0])


def _check_alive(view: MatroidView, flat: np.ndarray) -> None:
    if len(flat) == 0:
        return
    alive_bool = view.__dict__.get("_alive_bool")
    if alive_bool is None:
        alive_bool = np.zeros(view.base.n, dtype=bool)
        alive_bool[view.alive_idx] = True
        view.__dict__["_alive_bool"] = alive_bool
    ok = alive_bool[flat]
    if not ok.all():
        bad = int(flat[np.nonzero(~ok)[0][0]])
        from .errors import DomainError

        raise DomainError(f"element {bad} is not alive in this view", element=bad)


def _pack(view: MatroidView, rows: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(rows, np.ndarray) and rows.ndim == 2:
        nrows, width = rows.shape
        flat = np.ascontiguousarray(rows.reshape(-1), dtype=np.int32)
        off = np.arange(0, (nrows + 1) * width, width, dtype=np.int64)
        _check_alive(view, flat)
        return flat, off
    if len(rows) == 0:
        return np.empty(0, dtype=np.int32), np.zeros(1, dtype=np.int64)
    arrs = [np.ascontiguousarray(r, dtype=np.int32) for r in rows]
    off = np.zeros(len(arrs) + 1, dtype=np.int64)
    np.cumsum(np.array([len(a) for a in arrs], dtype=np.int64), out=off[1:])
    flat = np.concatenate(arrs) if arrs else np.empty(0, dtype=np.int32)
    _check_alive(view, flat)
    return flat, off


def submit_query(session: QuerySession, view: MatroidView, s: ElementSet) -> QueryTicket:
    return session.submit_query(view, s)


def flush(session: QuerySession):
    return session.flush()
