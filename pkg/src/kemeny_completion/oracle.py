"""Independent ground truth for the closed-form solvers.

``sparse_enumeration_min`` is exact for every feasible partial matrix: some
minimizer puts each row's free mass on a single cell, so minimizing over
those sparse patterns is enough.  ``perm_bruteforce_row`` evaluates the
row-case formula over all orderings, and ``random_search_min`` probes dense
completions by local moves to give an upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, DimensionTooLarge, Infeasible
from .markov import (
    StochasticMatrix,
    _group_inverse,
    _stationary,
    _structure_of_support,
    kemeny_trace,
    rank_one_delta,
    validate_stochastic,
)
from .partial import (
    PartialStochasticMatrix,
    SparsePattern,
    as_partial,
    feasible_single_class,
    pattern_choices,
    pattern_count,
)
from .row import RowSpec, _cycle_witness, _path_witness, gamma_of_orderings, row_cycle_value

DEFAULT_BUDGET = 10**7
CHUNK = 4096


@dataclass(frozen=True, eq=False)
class OracleReport:
    best_value: float
    best_completion: StochasticMatrix
    patterns_examined: int
    patterns_feasible: int
    method: str
    detail: Optional[dict] = None


def _single_essential_batch(T: np.ndarray) -> np.ndarray:
    """For a stack of stochastic matrices, whether each has one essential class.

    That holds iff some state is reachable from every state.
    """
    m, n, _ = T.shape
    R = (T > 0) | np.eye(n, dtype=bool)
    R = R.astype(np.float64)
    for _ in range(max(1, math.ceil(math.log2(n)))):
        R = np.minimum(R @ R, 1.0)
    return (R > 0).all(axis=1).any(axis=1)


def _kemeny_batch(T: np.ndarray) -> np.ndarray:
    """Kemeny's constant of a stack of single-essential-class matrices:
    ``trace((I - T + 1 w^T)^{-1}) - 1``."""
    m, n, _ = T.shape
    eye = np.eye(n)
    A = eye - np.transpose(T, (0, 2, 1))
    A[:, -1, :] = 1.0
    b = np.zeros((m, n, 1))
    b[:, -1, 0] = 1.0
    w = np.linalg.solve(A, b)[..., 0]
    Z = np.linalg.inv(eye - T + w[:, None, :])
    return np.trace(Z, axis1=1, axis2=2) - 1.0


def sparse_enumeration_min(P, budget: int = DEFAULT_BUDGET) -> OracleReport:
    """Minimum of Kemeny's constant over all sparse-pattern completions.

    Patterns are scanned in row-major lexicographic order; among values
    within ``1e-12`` of the minimum the first pattern wins.
    """
    P = as_partial(P)
    if not feasible_single_class(P):
        raise Infeasible("no completion has a single essential class")
    total = pattern_count(P)
    if total > budget:
        raise BudgetExceeded(f"{total} sparse patterns exceed budget {budget}")
    rows = np.array(P.open_rows, dtype=np.intp)
    residual = np.array([P.residual(j) for j in P.open_rows])
    base = np.array(P.values)
    choices = pattern_choices(P)

    best_val = math.inf
    best_choice = None
    feasible = 0
    while True:
        block = list(itertools.islice(choices, CHUNK))
        if not block:
            break
        C = np.array(block, dtype=np.intp).reshape(len(block), rows.size)
        T = np.broadcast_to(base, (len(block),) + base.shape).copy()
        if rows.size:
            T[np.arange(len(block))[:, None], rows[None, :], C] = residual[None, :]
        ok = _single_essential_batch(T)
        feasible += int(ok.sum())
        if not ok.any():
            continue
        idx = np.flatnonzero(ok)
        K = _kemeny_batch(T[idx])
        i = int(np.argmin(K))
        first = int(np.flatnonzero(K <= K[i] + 1e-12)[0])
        if K[first] < best_val - 1e-12:
            best_val = float(K[first])
            best_choice = tuple(int(c) for c in C[idx[first]])

    if best_choice is None:
        raise Infeasible("no sparse pattern has a single essential class")
    a = np.array(base)
    for j, c, res in zip(P.open_rows, best_choice, residual):
        a[j, c] = res
    best = validate_stochastic(a)
    pattern = SparsePattern(tuple(zip(P.open_rows, best_choice)))
    return OracleReport(
        kemeny_trace(best), best, total, feasible, "sparse_enum", {"pattern": pattern}
    )


def perm_bruteforce_row(spec: RowSpec, max_m: int = 10) -> OracleReport:
    """Row-case minimum over every ordering of the row values plus the
    cycle branch, without the reduced candidate set."""
    n, r0 = spec.n, spec.r0
    m = n - 1
    if m > max_m:
        raise DimensionTooLarge(f"{m}! orderings exceeds the limit {max_m}!")
    vals = np.asarray(spec.r, dtype=float)
    perms = itertools.permutations(range(m))
    best_k = math.inf
    best_order = None
    count = 0
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(perms, 1 << 16)), dtype=np.intp
        )
        if block.size == 0:
            break
        V = vals[block.reshape(-1, m)]
        count += V.shape[0]
        K = m - gamma_of_orderings(V) / 2.0
        top = K.min()
        # lexicographically smallest ordering among ties
        tied = V[K <= top + 1e-12]
        cand = min(tuple(float(x) for x in row) for row in tied)
        if top < best_k - 1e-12 or (abs(top - best_k) <= 1e-12 and cand < best_order):
            best_k, best_order = float(min(top, best_k)), cand
    branch = "path"
    witness = _path_witness(spec, best_order)
    if r0 < 1.0:
        cyc = row_cycle_value(n, n - 1, r0)
        if cyc < best_k - 1e-12:
            best_k, branch, witness = cyc, "cycle", _cycle_witness(spec)
    T = validate_stochastic(witness)
    return OracleReport(
        float(best_k),
        T,
        count + 1,
        count + (1 if r0 < 1.0 else 0),
        "perm_bruteforce",
        {"branch": branch, "ordering": list(best_order)},
    )


def _random_completion(P: PartialStochasticMatrix, rng: np.random.Generator) -> np.ndarray:
    a = np.array(P.values)
    for j in P.open_rows:
        cols = list(P.free_columns(j))
        a[j, cols] = P.residual(j) * rng.dirichlet(np.ones(len(cols)))
    return a


def random_search_min(
    P,
    iterations: int = 10_000,
    step: float = 1.0,
    seed: int = 0,
    restarts: int = 4,
) -> OracleReport:
    """Seeded local search over dense completions.

    Each move shifts mass ``x`` between two free cells of one row, with
    ``x`` drawn uniformly from `step` times the admissible interval, and is
    scored with the rank-one update.  Improving moves that keep a single
    essential class are accepted.  The result is an upper bound on the
    optimum.
    """
    P = as_partial(P)
    if not feasible_single_class(P):
        raise Infeasible("no completion has a single essential class")
    rng = np.random.default_rng(seed)
    movable = [j for j in P.open_rows if len(P.free_columns(j)) >= 2]
    per_restart = max(1, iterations // max(1, restarts))
    best_val, best_a = math.inf, None
    examined = feasible = 0
    for _ in range(max(1, restarts)):
        a = _random_completion(P, rng)
        Z = _group_inverse(a, _stationary(a))
        k = float(np.trace(Z))
        for _ in range(per_restart):
            if not movable:
                break
            examined += 1
            i = movable[rng.integers(len(movable))]
            p, q = rng.choice(P.free_columns(i), size=2, replace=False)
            x = step * rng.uniform(-a[i, p], a[i, q])
            try:
                delta = rank_one_delta(Z, i, p, q, x)
            except ArithmeticError:
                continue
            if not delta < -1e-15:
                continue
            b = a.copy()
            b[i, p] += x
            b[i, q] -= x
            b[i] = np.clip(b[i], 0.0, 1.0)
            if not _structure_of_support(b > 0).single_essential:
                continue
            feasible += 1
            a = b
            Z = _group_inverse(a, _stationary(a))
            k = float(np.trace(Z))
        if k < best_val:
            best_val, best_a = k, a
    best = validate_stochastic(best_a)
    return OracleReport(
        kemeny_trace(best), best, examined, feasible, "random_search", {"seed": seed}
    )
