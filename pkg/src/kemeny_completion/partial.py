"""Partial stochastic matrices: validation, feasibility, completions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

import numpy as np

from .errors import (
    DimensionTooLarge,
    FullySpecifiedSumNotOne,
    MissingAssignment,
    NegativeAssignment,
    NegativeSpecified,
    NotSquare,
    RowSumExceedsOne,
    RowSumOneWithFreeCells,
    SingleFreeCellInRow,
)
from .markov import (
    VALIDATION_TOL,
    StochasticMatrix,
    _structure_of_support,
    validate_stochastic,
)

ROW_SUM_TOL = 1e-12
FREE = "?"


def _is_free(cell) -> bool:
    return cell is None or (isinstance(cell, str) and cell.strip() == FREE)


@dataclass(frozen=True, eq=False)
class PartialStochasticMatrix:
    """Grid of specified values and free cells.

    ``values`` holds the specified entries (0.0 at free cells) and
    ``free`` marks the unspecified cells.  Construct through
    :func:`validate_partial`.
    """

    values: np.ndarray
    free: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def residual(self, j: int) -> float:
        """Mass left for the free cells of row `j`."""
        return 1.0 - math.fsum(self.values[j][~self.free[j]])

    def free_columns(self, j: int) -> tuple[int, ...]:
        return tuple(int(k) for k in np.flatnonzero(self.free[j]))

    @property
    def open_rows(self) -> tuple[int, ...]:
        """Rows that are not fully specified."""
        return tuple(int(j) for j in np.flatnonzero(self.free.any(axis=1)))

    def to_grid(self) -> list[list]:
        return [
            [None if self.free[j, k] else float(self.values[j, k]) for k in range(self.n)]
            for j in range(self.n)
        ]

    def __repr__(self) -> str:
        return f"PartialStochasticMatrix(n={self.n}, free={int(self.free.sum())})"


@dataclass(frozen=True)
class SparsePattern:
    """For each open row, the single free column that takes the residual."""

    assignment: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignment)


def validate_partial(grid) -> PartialStochasticMatrix:
    """Check conditions i)-v) on a grid of numbers and free markers.

    Free cells may be given as ``None`` or ``"?"``.  Row sums are compared
    with tolerance ``1e-12``.
    """
    rows = [list(r) for r in grid]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise NotSquare(f"expected {n} x {n}, got row lengths {[len(r) for r in rows]}")
    values = np.zeros((n, n))
    free = np.zeros((n, n), dtype=bool)
    for j, row in enumerate(rows):
        for k, cell in enumerate(row):
            if _is_free(cell):
                free[j, k] = True
                continue
            v = float(cell)
            if not math.isfinite(v) or v < 0:
                raise NegativeSpecified(f"entry ({j}, {k}) = {v!r}")
            values[j, k] = v
    for j in range(n):
        s = math.fsum(values[j][~free[j]])
        nfree = int(free[j].sum())
        if nfree == 0:
            if abs(s - 1.0) > ROW_SUM_TOL:
                raise FullySpecifiedSumNotOne(f"fully specified row {j} sums to {s!r}")
            continue
        if s > 1.0 + ROW_SUM_TOL:
            raise RowSumExceedsOne(f"specified entries of row {j} sum to {s!r}")
        if s >= 1.0 - ROW_SUM_TOL:
            raise RowSumOneWithFreeCells(f"row {j} already sums to 1 but has free cells")
        if nfree == 1:
            raise SingleFreeCellInRow(f"row {j} has exactly one free cell")
    values.setflags(write=False)
    free.setflags(write=False)
    return PartialStochasticMatrix(values, free)


def as_partial(P) -> PartialStochasticMatrix:
    if isinstance(P, PartialStochasticMatrix):
        return P
    return validate_partial(P)


def support_or_free(P: PartialStochasticMatrix) -> np.ndarray:
    """Arcs of the maximal-support completion."""
    return P.free | (P.values > 0)


def feasible_single_class(P) -> bool:
    """Whether some completion has a single essential class.

    The completion that makes every free cell positive has the largest
    support, and it has one essential class iff the support-or-free
    digraph has exactly one terminal strongly connected component.
    """
    P = as_partial(P)
    return _structure_of_support(support_or_free(P)).single_essential


def closed_subsets(P) -> list[int]:
    """Bitmasks of all nonempty state sets that no arc of the
    support-or-free digraph leaves."""
    P = as_partial(P)
    n = P.n
    arcs = support_or_free(P)
    out = [int(sum(1 << k for k in range(n) if arcs[j, k])) for j in range(n)]
    closed = []
    for X in range(1, 1 << n):
        outside = ~X
        ok = True
        for j in range(n):
            if X >> j & 1 and out[j] & outside:
                ok = False
                break
        if ok:
            closed.append(X)
    return closed


def find_violating_subsets(P, max_n: int = 12) -> Optional[tuple[frozenset, frozenset]]:
    """Two disjoint closed state sets, or ``None`` when there are none.

    Every completion traps its chain in each closed set, so a disjoint
    pair forces two essential classes.  Closed sets are closed under
    intersection, hence the pair exists iff the intersection of all
    closed sets is empty.
    """
    P = as_partial(P)
    if P.n > max_n:
        raise DimensionTooLarge(f"subset enumeration limited to n <= {max_n}")
    def states(mask: int) -> frozenset:
        return frozenset(j for j in range(P.n) if mask >> j & 1)

    closed = closed_subsets(P)
    for X in closed:
        for Y in closed:
            if X & Y == 0:
                return states(X), states(Y)
    return None


def feasible_subset_check(P, max_n: int = 12) -> bool:
    """Exponential subset-quantified feasibility test (oracle for
    :func:`feasible_single_class`)."""
    return find_violating_subsets(P, max_n) is None


def apply_completion(
    P, values: Mapping[tuple[int, int], float], tol: float = VALIDATION_TOL
) -> StochasticMatrix:
    """Fill every free cell of `P` from `values` keyed by ``(row, col)``."""
    P = as_partial(P)
    a = np.array(P.values)
    for j, k in zip(*np.nonzero(P.free)):
        key = (int(j), int(k))
        if key not in values:
            raise MissingAssignment(f"free cell {key} not assigned")
        v = float(values[key])
        if v < 0:
            raise NegativeAssignment(f"cell {key} assigned {v!r}")
        a[j, k] = v
    return validate_stochastic(a, tol)


def pattern_count(P) -> int:
    P = as_partial(P)
    return math.prod(int(P.free[j].sum()) for j in P.open_rows)


def pattern_choices(P) -> Iterator[tuple[int, ...]]:
    """Free column chosen in each open row, row-major lexicographic."""
    P = as_partial(P)
    return itertools.product(*(P.free_columns(j) for j in P.open_rows))


def enumerate_sparse_patterns(P) -> Iterator[tuple[SparsePattern, StochasticMatrix]]:
    """Every completion that puts each open row's residual on one free cell."""
    P = as_partial(P)
    rows = P.open_rows
    residual = {j: P.residual(j) for j in rows}
    base = np.array(P.values)
    for choice in pattern_choices(P):
        a = base.copy()
        for j, k in zip(rows, choice):
            a[j, k] = residual[j]
        yield SparsePattern(tuple(zip(rows, choice))), validate_stochastic(a)
