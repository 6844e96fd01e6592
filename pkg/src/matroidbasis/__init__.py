"""Parallel matroid basis finding over a batched independence oracle.

The library separates three concerns:

* oracle core — concrete matroid instances, deletion/contraction views,
  and the round-accounting query session;
* solvers — the grouped-prefix baseline, the partition pipeline, and the
  decomposition-guided general algorithm;
* bench — seeded instance generators, sweeps, and CSV emission (see the
  ``matroidbasis`` CLI).
"""

from .baseline import KuwRunner, RoundOutcome, kuw_find_basis, kuw_round
from .decomposition import (
    AlphaEstimate,
    CircuitEnsemble,
    CircuitSample,
    DecompConfig,
    DecompositionResult,
    GreedyOptimalSet,
    StopReason,
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
from .elements import ElementSet
from .errors import (
    BudgetError,
    ContractError,
    DomainError,
    MatroidError,
    PreconditionError,
    RoundBudgetError,
    SequencingError,
)
from .general import (
    GeneralConfig,
    ProgressParams,
    SubroutineChoice,
    choose_subroutine,
    compute_progress_params,
    contract_large_alpha,
    explicit_solve_bucket,
    general_find_basis,
    recover_redundant_elements,
)
from .matroids import (
    DirectSumMatroid,
    GraphicMatroid,
    LinearMatroid,
    MatroidInstance,
    PartitionMatroid,
    UniformMatroid,
    generate_kuw_hard_instance,
    parse_instance,
    read_instance,
)
from .partition import (
    PartitionConfig,
    RecoveredPart,
    SolveTrace,
    partition_find_basis,
    recover_multiple_parts,
    recover_single_part,
    remove_small_parts,
)
from .session import QuerySession, QueryTicket, RoundLedger, flush, submit_query
from .views import (
    MatroidView,
    greedy_basis,
    is_basis,
    is_independent_immediate,
    rank_greedy,
    view_contract,
    view_delete,
)

__version__ = "0.1.0"
