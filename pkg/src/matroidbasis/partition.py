"""Cube-root-round basis pipeline for hidden partition structure.

The solver only talks to the independence oracle; it never inspects the
instance's part lists.  Per while-iteration it draws a batch of random
orderings, and for each one identifies the complete part containing the
first dependence trigger (prefixes plus one-element-swapped prefixes in
one round, membership probes in a second round).  Recovered parts are
deleted after banking budget-many of their elements; a long independent
prefix instead contracts immediately and restarts the outer loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .decomposition import log2floor
from .elements import ElementSet
from .errors import PreconditionError, RoundBudgetError
from .session import QuerySession
from .views import MatroidView


@dataclass(frozen=True)
class RecoveredPart:
    members: ElementSet
    budget: int


@dataclass(frozen=True)
class PartitionConfig:
    samples: int | None = None              # None -> max(64, 4 n0 ln n0)
    contract_fraction: Fraction = Fraction(1, 8)
    escape_fraction: Fraction = Fraction(9, 10)
    escape_ladder: bool = True
    small_part_threshold: int = 2
    round_cap_c: int = 14

    def probe_count(self, n0: int) -> int:
        """Probes per batch; fixed from the original ground-set size."""
        if self.samples is not None:
            return self.samples
        return max(64, math.ceil(4 * n0 * math.log(max(n0, 2))))

    def prefix_len(self, n: int) -> int:
        return max(1, int(n * self.contract_fraction))

    def round_cap(self, n: int) -> int:
        return math.ceil(self.round_cap_c * n ** (1 / 3) * max(2, log2floor(max(n, 1)))) + 8


@dataclass
class SolveTrace:
    """Optional instrumentation collected by recover_multiple_parts."""

    peeled_sets: list[ElementSet] = field(default_factory=list)
    iterations: int = 0
    escapes: int = 0
    parts: list[RecoveredPart] = field(default_factory=list)


def recover_single_part(
    view: MatroidView, pi: np.ndarray, session: QuerySession
) -> RecoveredPart:
    """Complete part containing the first dependence along ``pi``; 2 rounds.

    Raises PreconditionError when the whole alive set is independent.
    """
    pi = np.ascontiguousarray(pi, dtype=np.int32)
    probe = session.submit_circuit_probes(view, [pi])
    session.flush()
    res = probe.result()[0]
    if res is None:
        raise PreconditionError("whole alive set is independent; no part to recover")
    t, circuit = res
    trigger = int(pi[t - 1])
    inner = circuit[circuit != trigger]
    tail = pi[t:]
    memb = session.submit_one_added(view, [inner], [tail])
    session.flush()
    fits = memb.result()[0]
    members = ElementSet.from_array(inner).add(trigger)
    for x, ok in zip(tail, fits):
        if not ok:
            members = members.add(int(x))
    return RecoveredPart(members=members, budget=len(inner))


def remove_small_parts(
    view: MatroidView, session: QuerySession, threshold: int
) -> tuple[MatroidView, ElementSet]:
    """Delete every detectable part with (effective) budget <= threshold.

    Banks budget-many lowest-id members of each removed part.  Parts whose
    budget matches their size never trigger a dependence and are left in
    place; they behave exactly like free elements.  One ledger round.
    """
    if threshold < 0:
        raise PreconditionError("threshold must be >= 0")
    if not view.alive:
        return view, ElementSet(0)
    scan = session.submit_small_scan(view, threshold + 1, mode="parts")
    session.flush()
    groups = scan.result()
    banked = ElementSet(0)
    doomed = ElementSet(0)
    for members, budget in groups:
        part = ElementSet.from_array(members)
        banked = banked | part.lowest(budget)
        doomed = doomed | part
    if doomed:
        view = view.delete(doomed)
    return view, banked


def _escape_lengths(cfg: PartitionConfig, n_alive: int) -> list[int]:
    """Candidate contraction-prefix lengths (a doubling ladder by default;
    the whole-set length is always included as the free-residual detector)."""
    base = min(cfg.prefix_len(n_alive), n_alive)
    if not cfg.escape_ladder:
        return [base, n_alive] if base < n_alive else [n_alive]
    lengths = []
    length = base
    while length < n_alive:
        lengths.append(length)
        length *= 2
    lengths.append(n_alive)
    return lengths


def recover_multiple_parts(
    view: MatroidView,
    session: QuerySession,
    cfg: PartitionConfig,
    trace: SolveTrace | None = None,
) -> tuple[MatroidView, ElementSet]:
    """One outer pass: returns early on a contraction, else drains the view."""
    banked = ElementSet(0)
    scan_pending = True
    n0 = session.instance.n
    while view.alive:
        alive = view.alive_idx
        n_alive = len(alive)
        lengths = _escape_lengths(cfg, n_alive)
        per_probe = n_alive + n_alive * (n_alive - 1) // 2 + sum(lengths)
        scan_cost = 0
        if scan_pending:
            scan_cost = sum(
                math.comb(n_alive, i) for i in range(1, cfg.small_part_threshold + 2)
            )
        count = cfg.probe_count(n0)
        if session.budget is not None:
            room = max(per_probe, session.budget - scan_cost)
            count = max(1, min(count, room // max(per_probe, 1)))
        perms = session.permutations(alive, count)
        # one non-adaptive batch: small-part scan (first pass only), the
        # escape ladder, and the circuit probes
        scan_ticket = None
        if scan_pending:
            scan_ticket = session.submit_small_scan(
                view, cfg.small_part_threshold + 1, mode="parts"
            )
        rung_tickets = [session.submit_sets(view, perms[:, :ln]) for ln in lengths]
        probe_ticket = session.submit_circuit_probes(view, perms)
        session.flush()

        if scan_ticket is not None:
            scan_pending = False
            doomed = ElementSet(0)
            for group_members, budget in scan_ticket.result():
                part = ElementSet.from_array(group_members)
                banked = banked | part.lowest(budget)
                doomed = doomed | part
            if doomed:
                # this batch sampled removed elements; draw fresh probes
                view = view.delete(doomed)
                continue

        # contract the longest rung whose success rate clears the bar
        chosen = None
        for ln, ticket in reversed(list(zip(lengths, rung_tickets))):
            ok = ticket.result()
            hits = np.nonzero(ok)[0]
            if len(hits) >= cfg.escape_fraction * count:
                chosen = ElementSet.from_array(perms[int(hits[0]), :ln])
                break
        if chosen is not None:
            if trace is not None:
                trace.escapes += 1
            return view.contract(chosen), banked | chosen

        probes = probe_ticket.result()
        bases, tails = [], []
        meta = []
        circuit_union = ElementSet(0)
        for i, res in enumerate(probes):
            if res is None:
                continue
            t, circuit = res
            trigger = int(perms[i, t - 1])
            inner = circuit[circuit != trigger]
            bases.append(inner)
            tails.append(perms[i, t:])
            meta.append((trigger, inner))
            circuit_union = circuit_union | ElementSet.from_array(circuit)
        if not meta:
            # every probe scanned the whole alive set without a dependence
            free = view.alive
            return view.contract(free), banked | free
        memb_ticket = session.submit_one_added(view, bases, tails)
        # ride the membership round with an escape ladder drawn away from
        # the sampled circuits: that pool approximates the view after the
        # parts are peeled, so a follow-up contraction round can be saved
        pool = (view.alive - circuit_union).indices()
        next_rungs: list[tuple[int, object, np.ndarray]] = []
        if len(pool) > 0:
            pool_perms = session.permutations(pool, count)
            for ln in _escape_lengths(cfg, len(pool)):
                ticket = session.submit_sets(view, pool_perms[:, :ln])
                next_rungs.append((ln, ticket, pool_perms))
        session.flush()
        fits = memb_ticket.result()

        recovered: dict[int, RecoveredPart] = {}
        for (trigger, inner), tail, fit in zip(meta, tails, fits):
            members = ElementSet.from_array(inner).add(trigger)
            extra = tail[~fit]
            for x in extra:
                members = members.add(int(x))
            recovered.setdefault(
                members.mask, RecoveredPart(members=members, budget=len(inner))
            )

        peeled = ElementSet(0)
        for part in recovered.values():
            banked = banked | part.members.lowest(part.budget)
            peeled = peeled | part.members
            if trace is not None:
                trace.parts.append(part)
        view = view.delete(peeled)
        if trace is not None:
            trace.iterations += 1
            trace.peeled_sets.append(peeled)
        for ln, ticket, pool_perms in reversed(next_rungs):
            ok = ticket.result()
            hits = np.nonzero(ok)[0]
            if len(hits) >= cfg.escape_fraction * count:
                chosen = ElementSet.from_array(pool_perms[int(hits[0]), :ln]) - peeled
                if chosen:
                    if trace is not None:
                        trace.escapes += 1
                    return view.contract(chosen), banked | chosen
                break
    return view, banked


def partition_find_basis(
    view: MatroidView,
    session: QuerySession,
    cfg: PartitionConfig | None = None,
    trace: SolveTrace | None = None,
) -> ElementSet:
    """Full solve: repeat outer passes until the view is drained."""
    cfg = cfg or PartitionConfig()
    cap = cfg.round_cap(len(view.alive))
    start_rounds = session.ledger.rounds
    banked = ElementSet(0)
    while view.alive:
        view, got = recover_multiple_parts(view, session, cfg, trace=trace)
        banked = banked | got
        if session.ledger.rounds - start_rounds > cap:
            raise RoundBudgetError(
                f"partition solve exceeded its round cap ({cap})"
            )
    return banked
