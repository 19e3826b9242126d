"""Kemeny's constant and Kemeny-minimizing completions of partial
stochastic matrices."""

from .diagonal import (
    diag_cycle_kemeny,
    is_diagonal_minimizer,
    s_sequence,
    solve_diagonal,
    solve_partial_diagonal,
)
from .markov import (
    ChainAnalysis,
    EssentialStructure,
    StochasticMatrix,
    accessibility_indices,
    analyze_chain,
    essential_structure,
    group_inverse_Q,
    kemeny_eigen,
    kemeny_grounded,
    kemeny_rank_one_update,
    kemeny_trace,
    mean_first_passage,
    return_time_variances,
    stationary_vector,
    validate_stochastic,
)
from .oracle import (
    OracleReport,
    perm_bruteforce_row,
    random_search_min,
    sparse_enumeration_min,
)
from .partial import (
    PartialStochasticMatrix,
    SparsePattern,
    apply_completion,
    enumerate_sparse_patterns,
    feasible_single_class,
    feasible_subset_check,
    validate_partial,
)
from .row import (
    RowSpec,
    canonical_ordering,
    maximize_gamma,
    objective_gamma,
    regime_instance,
    row_cycle_value,
    row_path_value,
    row_spec,
    solve_row,
    swap_sign,
)
from .solution import CompletionSolution

__version__ = "0.1.0"
