"""General-matroid solver: decomposition-guided progress selection.

Each outer iteration runs the early-stopping decomposition, then either
contracts a large independent prefix (when a peeled set showed a large
dependence parameter relative to its size) or extracts the progress
parameters (tau, beta, gamma) and executes whichever of the four
subroutines maximizes predicted progress per round:

1. contract a random prefix sampled from the pre-peel view of the set
   with the largest alpha-to-size ratio;
2. explicitly solve every bucketed set with the grouped-prefix baseline
   (rounds merged across sets) and delete the non-basis remainders;
3. run the one-round redundant-element recovery on every bucketed set;
4. the same recovery across every peeled set.

Peeled sets are scaffolding: the next iteration restarts from the current
view with only the subroutine's deletions/contractions (and the small
circuit sweep) applied.  Any subroutine that comes back empty-handed
falls back to one grouped-prefix round, so progress never stalls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .baseline import KuwRunner, kuw_round
from .decomposition import (
    AlphaEstimate,
    DecompConfig,
    DecompositionResult,
    StopReason,
    alpha_estimate,
    early_stop_decomposition,
    log2floor,
)
from .elements import ElementSet
from .errors import PreconditionError
from .session import QuerySession
from .views import MatroidView


@dataclass(frozen=True)
class GeneralConfig:
    decomp: DecompConfig = field(default_factory=DecompConfig)
    contract_samples: int = 64
    t_mult: Fraction = Fraction(1, 2)
    small_alpha_c: Fraction = Fraction(1, 2)
    progress_floor: Fraction = Fraction(1, 20)


@dataclass(frozen=True)
class ProgressParams:
    tau: int
    beta: Fraction
    gamma: int
    bucket: tuple[int, ...]
    i_star: int


CONTRACT_BETA_TAU = "contract_beta_tau"
EXPLICIT_SOLVE = "explicit_solve"
REDUNDANT_BUCKET = "redundant_bucket"
REDUNDANT_ALL = "redundant_all"


@dataclass(frozen=True)
class SubroutineChoice:
    which: str
    predicted_progress: Fraction
    predicted_rounds: Fraction


def compute_progress_params(d: DecompositionResult, n: int) -> ProgressParams:
    """tau/beta/gamma from the peeled sets and their alpha estimates."""
    if not d.sets:
        raise PreconditionError("progress parameters need a non-empty decomposition")
    sizes = [len(s) for s in d.sets]
    buckets: dict[int, list[int]] = {}
    for i, sz in enumerate(sizes):
        buckets.setdefault(log2floor_exact(sz), []).append(i)
    ell_star = max(buckets, key=lambda ell: (len(buckets[ell]), -ell))
    bucket = tuple(buckets[ell_star])
    ratios = [Fraction(a.value, sz) for a, sz in zip(d.alphas, sizes)]
    i_star = max(range(len(ratios)), key=lambda i: (ratios[i], -i))
    tau = 1 << ell_star
    beta = tau * ratios[i_star]
    return ProgressParams(tau=tau, beta=beta, gamma=len(bucket), bucket=bucket, i_star=i_star)


def log2floor_exact(sz: int) -> int:
    """Bucket index: ell with 2^ell <= sz <= 2^(ell+1)-1 (no clamping)."""
    return int(sz).bit_length() - 1


def choose_subroutine(n: int, p: ProgressParams) -> SubroutineChoice:
    """Argmax of predicted progress per round over the four-row table.

    Hidden constants and polylogs are dropped; sqrt(tau) is taken as the
    integer square root so every ratio stays rational and the argmax is
    deterministic (ties break in table order).
    """
    tau, beta, gamma = Fraction(p.tau), p.beta, Fraction(p.gamma)
    tb = tau * tau / (beta * beta) if beta else Fraction(10**9)
    rows = [
        (CONTRACT_BETA_TAU, n * beta / tau, gamma),
        (EXPLICIT_SOLVE, gamma * tau, gamma + math.isqrt(p.tau)),
        (REDUNDANT_BUCKET, gamma * min(tau, tb), gamma),
        (REDUNDANT_ALL, min(Fraction(n), tb), gamma),
    ]
    best = None
    for which, progress, rounds in rows:
        ratio = progress / rounds
        if best is None or ratio > best[0]:
            best = (ratio, which, progress, rounds)
    _, which, progress, rounds = best
    return SubroutineChoice(
        which=which, predicted_progress=Fraction(progress), predicted_rounds=Fraction(rounds)
    )


# --------------------------------------------------------------- subroutines


def contract_large_alpha(
    view_before_peel: MatroidView,
    s: ElementSet,
    session: QuerySession,
    cfg: GeneralConfig,
    alpha: AlphaEstimate | None = None,
) -> ElementSet | None:
    """Sample random prefixes of length ~ alpha * n / (10 |s|); first
    independent one wins.  Returns None when every sample was dependent.
    """
    if alpha is None:
        alpha = alpha_estimate(view_before_peel, s, session, cfg.decomp.alpha_samples)
    alive = view_before_peel.alive_idx
    n_alive = len(alive)
    if n_alive == 0 or len(s) == 0:
        return ElementSet(0)
    ell = min(math.ceil(alpha.value * n_alive / (10 * len(s))), n_alive)
    if ell == 0:
        return ElementSet(0)
    samples = cfg.contract_samples
    if session.budget is not None:
        samples = max(1, min(samples, session.budget // ell))
    perms = session.permutations(alive, samples)
    ticket = session.submit_sets(view_before_peel, perms[:, :ell])
    session.flush()
    ok = ticket.result()
    hits = np.nonzero(ok)[0]
    if len(hits) == 0:
        return None
    return ElementSet.from_array(perms[int(hits[0]), :ell])


def _redundant_plan(view, s, session, cfg, alpha, n_for_log):
    """Submit the one-round probe family for one set; returns a collector."""
    L = log2floor(n_for_log)
    size = len(s)
    limit = Fraction(size) / (cfg.small_alpha_c * L)
    if Fraction(alpha.value) > limit:
        raise PreconditionError(
            f"alpha estimate {alpha.value} exceeds small-alpha bound {limit}"
        )
    t = max(1, math.ceil(cfg.t_mult * L * alpha.value))
    ell = size // (4 * t)
    if ell < 1:
        raise PreconditionError("set too small for the sampled prefix count")
    pool = s.indices()
    perms = session.permutations(pool, ell)
    prefixes = [perms[i, :t] for i in range(ell)]
    ticket = session.submit_redundant_probes(view, prefixes, pool)
    sampled = ElementSet.from_array(perms[:, :t].reshape(-1))

    def collect() -> ElementSet:
        caught = np.zeros(len(pool), dtype=bool)
        for row in ticket.result():
            caught |= row
        return ElementSet.from_array(pool[caught]) - sampled

    return collect


def recover_redundant_elements(
    view: MatroidView,
    s: ElementSet,
    session: QuerySession,
    cfg: GeneralConfig,
    alpha: AlphaEstimate | None = None,
) -> ElementSet:
    """One-round redundant recovery inside ``s``.

    Every returned element closed a circuit with an independent prefix of
    some sampled subset that is kept alive, so deleting the result never
    changes the rank.
    """
    view.require_alive(s)
    if alpha is None:
        alpha = alpha_estimate(view, s, session, cfg.decomp.alpha_samples)
    collect = _redundant_plan(view, s, session, cfg, alpha, len(view.alive))
    session.flush()
    return collect()


def explicit_solve_bucket(
    view: MatroidView, bucket: list[ElementSet], session: QuerySession
) -> ElementSet:
    """Grouped-prefix solve on each restriction, rounds merged across the
    bucket; returns the union of non-basis remainders (all redundant)."""
    runners = [KuwRunner(view.restrict(t)) for t in bucket]
    while True:
        active = [r for r in runners if not r.done]
        if not active:
            break
        for r in active:
            r.submit(session)
        session.flush()
        for r in active:
            r.collect()
    removed = ElementSet(0)
    for t, r in zip(bucket, runners):
        removed = removed | (t - r.gained)
    return removed


# ----------------------------------------------------------------- main loop


def general_find_basis(
    view: MatroidView,
    session: QuerySession,
    cfg: GeneralConfig | None = None,
    run_log: list[str] | None = None,
) -> ElementSet:
    """Outer control loop; returns the set of elements contracted here."""
    cfg = cfg or GeneralConfig()
    initial_contracted = view.contracted
    iteration = 0
    while view.alive:
        iteration += 1
        n_alive = len(view.alive)
        rounds_before = session.ledger.rounds
        d = early_stop_decomposition(view, session, cfg.decomp)
        view = d.cleaned_view
        progress = len(d.removed_small)
        action = "small_circuits"
        if view.alive:
            acted = _execute_progress(view, d, session, cfg)
            if acted is None:
                outcome = kuw_round(view, session)
                moved = outcome.contracted or outcome.deleted
                view = (
                    view.contract(outcome.contracted)
                    if outcome.contracted
                    else view.delete(outcome.deleted)
                )
                action = "kuw_fallback"
                progress += len(moved)
            else:
                view, action, moved = acted
                progress += moved
        if run_log is not None:
            spent = session.ledger.rounds - rounds_before
            run_log.append(
                f"iter={iteration} n={n_alive} action={action} "
                f"progress={progress} rounds={spent}"
            )
    return view.contracted - initial_contracted


def _execute_progress(view, d, session, cfg):
    """Run the selected subroutine; None means the caller must fall back."""
    if d.stop_reason is StopReason.LARGE_ALPHA and d.stopped_set is not None:
        got = contract_large_alpha(
            d.view_before_stop, d.stopped_set.members, session, cfg, d.stopped_alpha
        )
        if got:
            return view.contract(got), "contract_large_alpha", len(got)
        return None
    if d.sets:
        params = compute_progress_params(d, len(view.alive))
        choice = choose_subroutine(len(view.alive), params)
        if choice.which == CONTRACT_BETA_TAU:
            got = contract_large_alpha(
                d.pre_views[params.i_star],
                d.sets[params.i_star],
                session,
                cfg,
                d.alphas[params.i_star],
            )
            if got:
                return view.contract(got), choice.which, len(got)
            return None
        if choice.which == EXPLICIT_SOLVE:
            doomed = explicit_solve_bucket(
                view, [d.sets[i] for i in params.bucket], session
            )
            if doomed:
                return view.delete(doomed), choice.which, len(doomed)
            return None
        indices = params.bucket if choice.which == REDUNDANT_BUCKET else range(len(d.sets))
        collectors = []
        for i in indices:
            try:
                collectors.append(
                    _redundant_plan(view, d.sets[i], session, cfg, d.alphas[i], len(view.alive))
                )
            except PreconditionError:
                continue
        if not collectors:
            return None
        session.flush()
        doomed = ElementSet(0)
        for collect in collectors:
            doomed = doomed | collect()
        if doomed:
            return view.delete(doomed), choice.which, len(doomed)
        return None
    if d.residual_independent and view.alive:
        free = view.alive
        return view.contract(free), "contract_all", len(free)
    return None
