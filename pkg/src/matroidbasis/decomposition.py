"""Circuit sampling, estimator machinery, and peeling decompositions.

The decomposition repeatedly extracts a *whittled* set capturing almost
all first-circuit probability mass: starting from the whole alive set,
elements are removed (lowest id first) while the empirical containment
fraction stays above a harmonic-sum threshold.  Every comparison against
the threshold is exact rational arithmetic over the sampled ensemble, so
the returned certificate is checkable without floating error.

Peeled sets are analysis scaffolding: callers keep the pre-peel views so
later progress subroutines can sample against the matroid state each set
was extracted from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import kernels
from .elements import ElementSet
from .errors import PreconditionError
from .session import QuerySession
from .views import MatroidView


def log2floor(n: int) -> int:
    """floor(log2(n)) clamped below at 1."""
    return max(1, int(n).bit_length() - 1)


_HARMONICS: list[Fraction] = [Fraction(0)]


def harmonic(m: int) -> Fraction:
    """Exact H(m) = sum_{i<=m} 1/i, cached globally."""
    while len(_HARMONICS) <= m:
        _HARMONICS.append(_HARMONICS[-1] + Fraction(1, len(_HARMONICS)))
    return _HARMONICS[m]


@dataclass(frozen=True)
class DecompConfig:
    samples: int | None = None          # ensemble size; None -> max(256, 8 n ln n)
    alpha_samples: int = 64
    epsilon: Fraction = Fraction(1, 64)
    c_log_mult: int = 128               # c_log = c_log_mult * log2floor(alive)
    small_circuit_threshold: int = 2
    large_alpha_c: Fraction = Fraction(2)

    def ensemble_size(self, n: int) -> int:
        if self.samples is not None:
            return self.samples
        return max(256, math.ceil(8 * n * math.log(max(n, 2))))

    def c_log(self, n_alive: int) -> int:
        return self.c_log_mult * log2floor(max(n_alive, 1))

    def containment_threshold(self, set_size: int, c_log: int) -> Fraction:
        return 1 - self.epsilon + harmonic(set_size) / c_log

    def large_alpha_hit(self, alpha_value: int, set_size: int, n_alive: int) -> bool:
        threshold = self.large_alpha_c * set_size / log2floor(max(n_alive, 1))
        return Fraction(alpha_value) >= threshold


@dataclass(frozen=True)
class CircuitSample:
    circuit: ElementSet
    trigger_index: int          # 1-based prefix length at the first dependence
    permutation_seed: int       # probe index within its ensemble


@dataclass
class CircuitEnsemble:
    """Multiset of first-circuit samples drawn against one view.

    Stored flat for the whittling loop; ``samples`` materializes the
    individual records on demand.
    """

    base_n: int
    sample_count: int           # probes that produced a circuit
    no_circuit_count: int
    members_flat: np.ndarray
    member_offsets: np.ndarray
    trigger_indices: np.ndarray

    @property
    def samples(self) -> list[CircuitSample]:
        out = []
        for i in range(self.sample_count):
            members = self.members_flat[self.member_offsets[i] : self.member_offsets[i + 1]]
            out.append(
                CircuitSample(
                    ElementSet.from_array(members), int(self.trigger_indices[i]), i
                )
            )
        return out

    def circuits(self) -> Iterator[np.ndarray]:
        for i in range(self.sample_count):
            yield self.members_flat[self.member_offsets[i] : self.member_offsets[i + 1]]


@dataclass(frozen=True)
class GreedyOptimalSet:
    members: ElementSet
    q_hat: Fraction
    epsilon: Fraction
    c_log: int


@dataclass(frozen=True)
class AlphaEstimate:
    value: int
    sample_count: int


class StopReason(Enum):
    EXHAUSTED = "exhausted"
    HALF_CONSUMED = "half_consumed"
    LARGE_ALPHA = "large_alpha"
    OVERSIZED_SET = "oversized_set"


@dataclass
class DecompositionResult:
    sets: tuple[ElementSet, ...]
    alphas: tuple[AlphaEstimate, ...]
    stop_reason: StopReason
    residual_view: MatroidView
    certificates: tuple[GreedyOptimalSet, ...] = ()
    pre_views: tuple[MatroidView, ...] = ()
    cleaned_view: MatroidView | None = None
    removed_small: ElementSet = field(default_factory=lambda: ElementSet(0))
    stopped_set: GreedyOptimalSet | None = None
    stopped_alpha: AlphaEstimate | None = None
    view_before_stop: MatroidView | None = None
    residual_independent: bool = False
    entry_size: int = 0

    def dump_lines(self) -> list[str]:
        lines = []
        for i, (s, a) in enumerate(zip(self.sets, self.alphas), start=1):
            ids = " ".join(str(e) for e in s)
            lines.append(f"set {i} alpha={a.value} size={len(s)} members={ids}")
        return lines

    def dumps(self) -> str:
        return "\n".join(self.dump_lines()) + "\n"


# ------------------------------------------------------------ circuit probes


def find_circuit(view: MatroidView, pi: np.ndarray, session: QuerySession) -> CircuitSample | None:
    """First circuit along permutation ``pi``; one ledger round.

    Returns None when the whole alive set is independent.
    """
    ticket = session.submit_circuit_probes(view, [np.asarray(pi)])
    session.flush()
    res = ticket.result()[0]
    if res is None:
        return None
    t, members = res
    return CircuitSample(ElementSet.from_array(members), t, 0)


def sample_ensemble(view: MatroidView, session: QuerySession, count: int) -> CircuitEnsemble:
    """``count`` independent first-circuit probes, batched into one round."""
    if count < 1:
        raise PreconditionError("ensemble size must be >= 1")
    perms = session.permutations(view.alive_idx, count)
    ticket = session.submit_circuit_probes(view, perms)
    session.flush()
    return _collect_ensemble(view, ticket.result())


def _collect_ensemble(view: MatroidView, results) -> CircuitEnsemble:
    members = []
    triggers = []
    misses = 0
    for res in results:
        if res is None:
            misses += 1
            continue
        t, circ = res
        members.append(circ)
        triggers.append(t)
    offsets = np.zeros(len(members) + 1, dtype=np.int64)
    if members:
        np.cumsum([len(m) for m in members], out=offsets[1:])
        flat = np.concatenate(members).astype(np.int32)
    else:
        flat = np.empty(0, dtype=np.int32)
    return CircuitEnsemble(
        base_n=view.base.n,
        sample_count=len(members),
        no_circuit_count=misses,
        members_flat=flat,
        member_offsets=offsets,
        trigger_indices=np.array(triggers, dtype=np.int32),
    )


def q_hat(ensemble: CircuitEnsemble, s: ElementSet) -> Fraction:
    """Fraction of ensemble circuits entirely contained in ``s``."""
    if ensemble.sample_count == 0:
        raise PreconditionError("q_hat is undefined on a circuit-free ensemble")
    in_s = np.zeros(ensemble.base_n, dtype=bool)
    idx = s.indices()
    if len(idx):
        in_s[idx] = True
    hits_flat = in_s[ensemble.members_flat].astype(np.int64)
    sums = np.add.reduceat(hits_flat, ensemble.member_offsets[:-1]) if len(hits_flat) else np.zeros(ensemble.sample_count, dtype=np.int64)
    sizes = np.diff(ensemble.member_offsets)
    # reduceat on an empty segment returns the next value; empty circuits
    # cannot occur, every circuit has at least one member
    contained = int(np.count_nonzero(sums == sizes))
    return Fraction(contained, ensemble.sample_count)


# -------------------------------------------------------- greedily-optimal


def _budget_capped(session: QuerySession, count: int, per_query: int) -> int:
    """Largest probe count that keeps the batch within the round budget."""
    if session.budget is None:
        return count
    return max(1, min(count, session.budget // max(per_query, 1)))


def find_greedily_optimal(
    view: MatroidView,
    session: QuerySession,
    cfg: DecompConfig,
    ensemble: CircuitEnsemble | None = None,
) -> GreedyOptimalSet | None:
    """Whittle the alive set down to a certificate-carrying core.

    One ledger round (the ensemble); the whittling itself replays the
    cached ensemble offline.  Returns None when the view is independent.
    """
    n_alive = len(view.alive)
    if n_alive == 0:
        return None
    if ensemble is None:
        per_probe = n_alive + n_alive * (n_alive - 1) // 2
        count = _budget_capped(session, cfg.ensemble_size(n_alive), per_probe)
        ensemble = sample_ensemble(view, session, count)
    if ensemble.sample_count == 0:
        return None
    c_log = cfg.c_log(n_alive)
    if cfg.containment_threshold(n_alive, c_log) >= 1:
        raise PreconditionError(
            "containment threshold reaches 1 at the full set; "
            "epsilon * c_log must exceed H(n)"
        )
    N = ensemble.sample_count
    flat = ensemble.members_flat
    starts = ensemble.member_offsets
    sizes = np.diff(starts)
    # element -> ids of circuits containing it (CSR over the base ground set)
    cnt = np.bincount(flat, minlength=view.base.n).astype(np.int64)
    e_off = np.zeros(view.base.n + 1, dtype=np.int64)
    np.cumsum(cnt, out=e_off[1:])
    order = np.argsort(flat, kind="stable")
    e_circ = np.repeat(np.arange(N, dtype=np.int64), sizes)[order]

    members = view.alive_idx.copy()
    circ_alive = np.ones(N, dtype=bool)
    in_count = N
    while len(members) > 1:
        m = len(members)
        threshold = cfg.containment_threshold(m - 1, c_log)
        tf = float(threshold) - 1e-9
        vals = (in_count - cnt[members]) / N
        candidates = np.nonzero(vals >= tf)[0]
        removed = False
        for pos in candidates:
            x = int(members[pos])
            if Fraction(in_count - int(cnt[x]), N) >= threshold:
                dying = e_circ[e_off[x] : e_off[x + 1]]
                dying = dying[circ_alive[dying]]
                circ_alive[dying] = False
                in_count -= len(dying)
                for cid in dying:
                    cnt[flat[starts[cid] : starts[cid + 1]]] -= 1
                members = np.delete(members, pos)
                removed = True
                break
        if not removed:
            break
    return GreedyOptimalSet(
        members=ElementSet.from_array(members),
        q_hat=Fraction(in_count, N),
        epsilon=cfg.epsilon,
        c_log=c_log,
    )


def certify_greedily_optimal(
    gos: GreedyOptimalSet, ensemble: CircuitEnsemble
) -> tuple[bool, bool]:
    """Exact re-check of both defining inequalities against an ensemble."""
    m = len(gos.members)
    upper = q_hat(ensemble, gos.members) >= 1 - gos.epsilon + harmonic(m) / gos.c_log
    threshold = 1 - gos.epsilon + harmonic(m - 1) / gos.c_log
    minimal = all(
        q_hat(ensemble, gos.members.remove(x)) < threshold for x in gos.members
    )
    return bool(upper), bool(minimal)


# ------------------------------------------------------------------- alpha


def alpha_estimate(
    view: MatroidView, s: ElementSet, session: QuerySession, count: int
) -> AlphaEstimate:
    """Median trigger index over random orderings inside ``s``; one round.

    Orderings that never hit a dependence contribute |s| + 1.
    """
    if count < 1:
        raise PreconditionError("alpha sample count must be >= 1")
    view.require_alive(s)
    pool = s.indices()
    if len(pool) == 0:
        raise PreconditionError("alpha of the empty set is undefined")
    perms = session.permutations(pool, count)
    ticket = session.submit_chains(view, perms)
    session.flush()
    t_arr = ticket.result().astype(np.int64)
    t_arr[t_arr == 0] = len(pool) + 1
    t_arr.sort()
    value = int(t_arr[(count - 1) // 2])  # lower median, deterministic
    return AlphaEstimate(value=value, sample_count=count)


# --------------------------------------------------------- small circuits


def remove_small_circuits(
    view: MatroidView, session: QuerySession, threshold: int
) -> MatroidView:
    """Delete the lowest id of every circuit of size <= threshold; 1 round."""
    if threshold < 1 or not view.alive:
        return view
    session.submit_small_scan(view, threshold, mode="classes")
    session.flush()
    doomed = kernels.small_circuit_argmins(
        view.base.compiled(), view.contracted_idx, view.alive_idx, threshold
    )
    if len(doomed) == 0:
        return view
    return view.delete(ElementSet.from_array(doomed))


# ------------------------------------------------------------------ peeling


def peel(
    view: MatroidView, session: QuerySession, cfg: DecompConfig
) -> tuple[GreedyOptimalSet | None, MatroidView]:
    gos = find_greedily_optimal(view, session, cfg)
    if gos is None:
        return None, view
    return gos, view.delete(gos.members)


def _peel_loop(
    view: MatroidView,
    session: QuerySession,
    cfg: DecompConfig,
    *,
    half_guard: bool,
    oversize_guard: bool,
) -> DecompositionResult:
    entry_size = len(view.alive)
    cleaned = remove_small_circuits(view, session, cfg.small_circuit_threshold)
    removed_small = view.alive - cleaned.alive

    sets: list[ElementSet] = []
    alphas: list[AlphaEstimate] = []
    certs: list[GreedyOptimalSet] = []
    pre_views: list[MatroidView] = []
    stop = StopReason.EXHAUSTED
    stopped_set = stopped_alpha = view_before_stop = None
    residual_independent = False

    cur = cleaned
    while cur.alive:
        n_cur = len(cur.alive)
        if half_guard and 2 * n_cur < entry_size:
            stop = StopReason.HALF_CONSUMED
            break
        gos = find_greedily_optimal(cur, session, cfg)
        if gos is None:
            residual_independent = True
            stop = StopReason.EXHAUSTED
            break
        a_count = _budget_capped(session, cfg.alpha_samples, len(gos.members))
        alpha = alpha_estimate(cur, gos.members, session, a_count)
        nxt = cur.delete(gos.members)
        if cfg.large_alpha_hit(alpha.value, len(gos.members), n_cur):
            stop = StopReason.LARGE_ALPHA
            stopped_set, stopped_alpha, view_before_stop = gos, alpha, cur
            cur = nxt
            break
        if oversize_guard and 2 * len(gos.members) > entry_size:
            stop = StopReason.OVERSIZED_SET
            stopped_set, stopped_alpha, view_before_stop = gos, alpha, cur
            cur = nxt
            break
        sets.append(gos.members)
        alphas.append(alpha)
        certs.append(gos)
        pre_views.append(cur)
        cur = nxt

    return DecompositionResult(
        sets=tuple(sets),
        alphas=tuple(alphas),
        stop_reason=stop,
        residual_view=cur,
        certificates=tuple(certs),
        pre_views=tuple(pre_views),
        cleaned_view=cleaned,
        removed_small=removed_small,
        stopped_set=stopped_set,
        stopped_alpha=stopped_alpha,
        view_before_stop=view_before_stop,
        residual_independent=residual_independent,
        entry_size=entry_size,
    )


def iterative_peel(
    view: MatroidView, session: QuerySession, cfg: DecompConfig
) -> DecompositionResult:
    """Peel until exhaustion or a stop guard fires (set discarded then)."""
    return _peel_loop(view, session, cfg, half_guard=False, oversize_guard=True)


def early_stop_decomposition(
    view: MatroidView, session: QuerySession, cfg: DecompConfig
) -> DecompositionResult:
    """Peel while at least half the entry elements remain alive."""
    return _peel_loop(view, session, cfg, half_guard=True, oversize_guard=False)
