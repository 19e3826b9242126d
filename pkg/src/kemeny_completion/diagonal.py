r"""Completions when only diagonal entries are specified.

With :math:`x_j = 1/(1-d_j)`, the minimum of Kemeny's constant over all
completions is

.. math::

    m = \frac{(\sum_j x_j)^2 - \sum_j x_j^2}{2 \sum_j x_j},

attained exactly by ``D + (I - D) C`` for ``C`` the permutation matrix of
any cycle through all ``n`` states.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    BadK,
    DiagonalAtOne,
    DiagonalMismatch,
    DimensionTooSmall,
    NonPositiveEntry,
    OutOfRange,
    TwoDiagonalOnes,
)
from .markov import as_stochastic, cycle_matrix, validate_stochastic
from .solution import CompletionSolution

AT_ONE = 1e-12


def _check_diagonal(d: Sequence[float], *, allow_one: bool = False) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 1:
        raise OutOfRange("diagonal must be a vector")
    if np.any(d < 0) or np.any(d > 1) or not np.all(np.isfinite(d)):
        raise OutOfRange(f"diagonal entries must lie in [0, 1]: {d.tolist()}")
    near = (d >= 1.0 - AT_ONE) & ~(allow_one & (d == 1.0))
    if np.any(near):
        raise DiagonalAtOne(f"diagonal entry {d[near][0]!r} is (numerically) 1")
    return d


def diag_cycle_kemeny(d: Sequence[float]) -> float:
    """Kemeny's constant of ``D + (I - D) C`` for any full cycle ``C``."""
    d = _check_diagonal(d)
    if d.size < 2:
        raise DimensionTooSmall("need n >= 2")
    x = 1.0 / (1.0 - d)
    s = x.sum()
    return float((s * s - np.dot(x, x)) / (2.0 * s))


def cycle_witness(d: Sequence[float], order: Sequence[int] | None = None):
    """``D + (I - D) C`` with ``C`` the cycle through `order` (default
    ``0 -> 1 -> ... -> n-1 -> 0``)."""
    d = np.asarray(d, dtype=float)
    n = d.size
    C = cycle_matrix(range(n) if order is None else order, n)
    return validate_stochastic(np.diag(d) + (1.0 - d)[:, None] * C)


def solve_diagonal(d: Sequence[float]) -> CompletionSolution:
    """Minimize Kemeny's constant when the whole diagonal is specified.

    If exactly one entry equals 1.0 that state is absorbing; the optimum is
    then ``sum_{j != j*} 1/(1 - d_j)``, attained by sending each other
    row's off-diagonal mass straight to the absorbing state.
    """
    d = _check_diagonal(d, allow_one=True)
    n = d.size
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    ones = np.flatnonzero(d == 1.0)
    if ones.size >= 2:
        raise TwoDiagonalOnes(
            f"states {ones.tolist()} are absorbing in every completion"
        )
    if ones.size == 1:
        star = int(ones[0])
        a = np.diag(d)
        others = [j for j in range(n) if j != star]
        a[others, star] = 1.0 - d[others]
        value = float(np.sum(1.0 / (1.0 - d[others])))
        return CompletionSolution(
            value,
            validate_stochastic(a),
            "diag-absorbing",
            {"absorbing_state": star},
            unique=None,
        )
    return CompletionSolution(
        diag_cycle_kemeny(d),
        cycle_witness(d),
        "diag-cycle",
        {"cycle": list(range(n)), "minimizers": "D + (I - D) C for any n-cycle C"},
        unique=True,
    )


def solve_partial_diagonal(d: Sequence[float], n: int) -> CompletionSolution:
    """Minimize when only ``d_1..d_k`` (k < n) of the diagonal are given.

    Equivalent to :func:`solve_diagonal` with the missing entries set to 0,
    since the optimum is increasing in every diagonal entry.
    """
    d = _check_diagonal(d)
    k = d.size
    if not 0 <= k < n:
        raise BadK(f"need k < n, got k={k}, n={n}")
    if n < 2:
        raise DimensionTooSmall("need n >= 2")
    x = 1.0 / (1.0 - d)
    s = x.sum() + (n - k)
    value = float((s * s - np.dot(x, x) - (n - k)) / (2.0 * s))
    padded = np.concatenate([d, np.zeros(n - k)])
    return CompletionSolution(
        value,
        cycle_witness(padded),
        "diag-cycle",
        {"cycle": list(range(n)), "padded_diagonal": padded.tolist()},
        unique=True,
    )


def s_sequence(x: Sequence[float]) -> np.ndarray:
    """``s_k`` for k = 1..n: Kemeny's constant of a diagonal-specified
    completion whose only cycle runs through the first k states, written
    in terms of ``x_j = 1/(1-d_j)``.  Strictly decreasing in k."""
    x = np.asarray(x, dtype=float)
    if x.size == 0 or np.any(x <= 0):
        raise NonPositiveEntry("entries must be positive")
    head = np.cumsum(x)
    head_sq = np.cumsum(x * x)
    tail = x.sum() - head
    return (head * head - head_sq) / (2.0 * head) + tail


def successor_cycle(T, d: Sequence[float], tol: float = 1e-12):
    """Follow the unique positive off-diagonal entry of each row from state
    0.  Returns the visiting order if the rows form ``D + (I - D) C`` for a
    full cycle ``C``, else ``None``."""
    a = as_stochastic(T).entries
    n = a.shape[0]
    nxt = []
    for j in range(n):
        off = [k for k in range(n) if k != j and a[j, k] > tol]
        if len(off) != 1 or abs(a[j, off[0]] - (1.0 - d[j])) > tol:
            return None
        nxt.append(off[0])
    order, j = [0], nxt[0]
    while j != 0 and len(order) <= n:
        order.append(j)
        j = nxt[j]
    return order if len(order) == n and j == 0 else None


def is_diagonal_minimizer(T, d: Sequence[float], tol: float = 1e-12) -> bool:
    """Whether `T` equals ``D + (I - D) C`` for some n-cycle permutation ``C``."""
    T = as_stochastic(T)
    d = _check_diagonal(d)
    if d.size != T.n:
        raise DiagonalMismatch(f"diagonal has length {d.size}, matrix is {T.n} x {T.n}")
    diag = np.diag(T.entries)
    bad = np.flatnonzero(np.abs(diag - d) > tol)
    if bad.size:
        j = int(bad[0])
        raise DiagonalMismatch(f"t[{j}, {j}] = {diag[j]!r} but d[{j}] = {d[j]!r}")
    return successor_cycle(T, d, tol) is not None
