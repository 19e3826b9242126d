r"""Dense kernel for finite Markov chains.

Validation of row-stochastic matrices, essential-class structure,
stationary vectors, the group inverse of :math:`Q = I - T`, Kemeny's
constant by three independent routes, mean first passage times,
accessibility indices, return-time variances and the rank-one update of
Kemeny's constant.

States are 0-based throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .errors import (
    DenominatorVanishes,
    EigenvalueAtOne,
    MultipleEssentialClasses,
    NegativeEntry,
    NotIrreducible,
    NotSquare,
    OutOfRange,
    RowSumViolation,
    SingularSystem,
    SpectralRadiusNotLessThanOne,
)

VALIDATION_TOL = 1e-9
IDENTITY_TOL = 1e-8
EIGEN_WINDOW = 1e-6


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """A validated dense row-stochastic matrix.

    Build instances with :func:`validate_stochastic`; ``entries`` is a
    read-only array.
    """

    entries: np.ndarray
    tol: float = VALIDATION_TOL

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __repr__(self) -> str:
        return f"StochasticMatrix(n={self.n})"


@dataclass(frozen=True)
class EssentialStructure:
    """Strongly connected components of the positive-entry digraph.

    ``scc_partition`` is ordered by smallest member; ``terminal_sccs``
    indexes into it.
    """

    scc_partition: tuple[tuple[int, ...], ...]
    terminal_sccs: tuple[int, ...]

    @property
    def single_essential(self) -> bool:
        return len(self.terminal_sccs) == 1

    @property
    def irreducible(self) -> bool:
        return len(self.scc_partition) == 1

    @property
    def essential_states(self) -> tuple[int, ...]:
        return tuple(
            sorted(j for t in self.terminal_sccs for j in self.scc_partition[t])
        )


@dataclass(frozen=True, eq=False)
class ChainAnalysis:
    """Bundle of per-chain quantities; the last three are ``None`` unless
    the chain is irreducible."""

    w: np.ndarray
    q_group_inverse: np.ndarray
    kemeny: float
    mfpt: Optional[np.ndarray]
    alpha: Optional[np.ndarray]
    ret_var: Optional[np.ndarray]


def validate_stochastic(raw, tol: float = VALIDATION_TOL) -> StochasticMatrix:
    """Check that `raw` is row-stochastic up to `tol` and return a cleaned copy.

    Entries in ``[-tol, 0)`` are clamped to zero and every row is
    renormalized to sum to one.

    Raises
    ------
    NotSquare, NegativeEntry, RowSumViolation
    """
    if isinstance(raw, StochasticMatrix):
        raw = raw.entries
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NotSquare(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NegativeEntry("matrix contains non-finite entries")
    bad = np.argwhere(a < -tol)
    if bad.size:
        j, k = bad[0]
        raise NegativeEntry(f"entry ({j}, {k}) = {a[j, k]!r} is negative")
    np.clip(a, 0.0, 1.0, out=a)
    sums = a.sum(axis=1)
    off = np.flatnonzero(np.abs(sums - 1.0) > tol)
    if off.size:
        j = off[0]
        raise RowSumViolation(f"row {j} sums to {sums[j]!r}")
    a /= sums[:, None]
    a.setflags(write=False)
    return StochasticMatrix(a, tol)


def as_stochastic(T, tol: float = VALIDATION_TOL) -> StochasticMatrix:
    if isinstance(T, StochasticMatrix):
        return T
    return validate_stochastic(T, tol)


def _structure_of_support(support: np.ndarray) -> EssentialStructure:
    n = support.shape[0]
    ncomp, labels = connected_components(support, directed=True, connection="strong")
    members: list[list[int]] = [[] for _ in range(ncomp)]
    for j in range(n):
        members[labels[j]].append(j)
    order = sorted(range(ncomp), key=lambda c: members[c][0])
    rank = {c: i for i, c in enumerate(order)}
    # a component is terminal when no arc leaves it
    leaves = np.zeros(ncomp, dtype=bool)
    src, dst = np.nonzero(support)
    crossing = labels[src] != labels[dst]
    leaves[labels[src[crossing]]] = True
    partition = tuple(tuple(members[c]) for c in order)
    terminal = tuple(sorted(rank[c] for c in range(ncomp) if not leaves[c]))
    return EssentialStructure(partition, terminal)


def essential_structure(T) -> EssentialStructure:
    """SCCs of the digraph with arc j -> k iff ``t[j, k] > 0``."""
    T = as_stochastic(T)
    return _structure_of_support(T.entries > 0)


def _require_single(T: StochasticMatrix) -> EssentialStructure:
    st = essential_structure(T)
    if not st.single_essential:
        raise MultipleEssentialClasses(
            f"{len(st.terminal_sccs)} essential classes; Kemeny's constant is undefined"
        )
    return st


def _require_irreducible(T: StochasticMatrix) -> None:
    if not essential_structure(T).irreducible:
        raise NotIrreducible("matrix is reducible")


def _stationary(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    A = np.eye(n) - a.T
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        w = scipy.linalg.solve(A, b, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc
    w = np.where(w < 0, 0.0, w)
    return w / w.sum()


def stationary_vector(T) -> np.ndarray:
    r"""Stationary distribution of a chain with one essential class.

    Solves :math:`(I - T^\top) w = 0` with the last equation replaced by
    :math:`\mathbf{1}^\top w = 1`.  That bordered system is nonsingular
    exactly when 1 is a simple eigenvalue.
    """
    T = as_stochastic(T)
    _require_single(T)
    return _stationary(T.entries)


def _group_inverse(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    W = np.outer(np.ones(n), w)
    try:
        Z = scipy.linalg.inv(np.eye(n) - a + W, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(Z)):
        raise SingularSystem("non-finite group inverse")
    return Z - W


def group_inverse_Q(T) -> np.ndarray:
    r"""Group inverse :math:`Q^\# = (Q + \mathbf{1}w^\top)^{-1} - \mathbf{1}w^\top`
    of :math:`Q = I - T`."""
    T = as_stochastic(T)
    _require_single(T)
    return _group_inverse(T.entries, _stationary(T.entries))


def kemeny_trace(T) -> float:
    return float(np.trace(group_inverse_Q(T)))


def kemeny_eigen(T) -> float:
    r"""Kemeny's constant as :math:`\sum_{\lambda \ne 1} 1/(1-\lambda)`.

    Exactly one eigenvalue is removed, the one nearest to 1; it must lie
    within ``1e-6`` of 1 and no other eigenvalue may.
    """
    T = as_stochastic(T)
    _require_single(T)
    lam = scipy.linalg.eigvals(T.entries, check_finite=False)
    dist = np.abs(lam - 1.0)
    i = int(np.argmin(dist))
    if dist[i] > EIGEN_WINDOW:
        raise EigenvalueAtOne(f"no eigenvalue within {EIGEN_WINDOW} of 1")
    rest = np.delete(lam, i)
    if np.any(np.abs(rest - 1.0) <= EIGEN_WINDOW):
        raise EigenvalueAtOne("eigenvalue 1 is not numerically simple")
    total = np.sum(1.0 / (1.0 - rest))
    if abs(total.imag) > IDENTITY_TOL:
        raise EigenvalueAtOne(f"imaginary residue {total.imag:.3e} in eigenvalue sum")
    return float(total.real)


def kemeny_grounded(T, g: Optional[int] = None) -> float:
    r"""Kemeny's constant from the bordered factorization of :math:`I - T`.

    With state `g` removed, ``S`` the remaining principal submatrix and
    ``u`` the rest of row `g`,

    .. math::

        K = \operatorname{tr}(I-S)^{-1}
            - \frac{u^\top (I-S)^{-2} \mathbf{1}}{1 + u^\top (I-S)^{-1}\mathbf{1}}.

    `g` defaults to the smallest state of the essential class, which
    keeps the spectral radius of ``S`` below one.
    """
    T = as_stochastic(T)
    st = _require_single(T)
    n = T.n
    if g is None:
        g = st.scc_partition[st.terminal_sccs[0]][0]
    if not 0 <= g < n:
        raise OutOfRange(f"grounding state {g} outside 0..{n - 1}")
    if n == 1:
        return 0.0
    keep = [j for j in range(n) if j != g]
    a = T.entries
    M = np.eye(n - 1) - a[np.ix_(keep, keep)]
    u = a[g, keep]
    if np.linalg.cond(M) > 1e8:
        raise SpectralRadiusNotLessThanOne(
            f"I - S is singular or ill-conditioned for grounding state {g}"
        )
    ones = np.ones(n - 1)
    lu = scipy.linalg.lu_factor(M, check_finite=False)
    Minv = scipy.linalg.lu_solve(lu, np.eye(n - 1), check_finite=False)
    x = Minv @ ones
    y = u @ Minv
    return float(np.trace(Minv) - (y @ x) / (1.0 + u @ x))


def mean_first_passage(T) -> np.ndarray:
    """Mean first passage times ``m[j, k]`` with ``m[j, j] = 1 / w[j]``."""
    T = as_stochastic(T)
    _require_irreducible(T)
    w = _stationary(T.entries)
    Z = _group_inverse(T.entries, w)
    M = (np.diag(Z)[None, :] - Z) / w[None, :]
    M[np.diag_indices_from(M)] = 1.0 / w
    return M


def accessibility_indices(T) -> np.ndarray:
    r"""Accessibility indices :math:`\alpha_k = w^\top M e_k - 1`."""
    T = as_stochastic(T)
    M = mean_first_passage(T)
    w = _stationary(T.entries)
    return w @ M - 1.0


def return_time_variances(T) -> np.ndarray:
    """Variance of the first return time to each state.

    Uses ``w_k alpha_k = w_k^2 Var(R_k) / 2 + (1 - w_k) / 2``.
    """
    T = as_stochastic(T)
    alpha = accessibility_indices(T)
    w = _stationary(T.entries)
    return (2.0 * w * alpha - 1.0 + w) / w**2


def analyze_chain(T) -> ChainAnalysis:
    T = as_stochastic(T)
    st = _require_single(T)
    w = _stationary(T.entries)
    Z = _group_inverse(T.entries, w)
    mfpt = alpha = ret_var = None
    if st.irreducible:
        mfpt = mean_first_passage(T)
        alpha = w @ mfpt - 1.0
        ret_var = (2.0 * w * alpha - 1.0 + w) / w**2
    return ChainAnalysis(w, Z, float(np.trace(Z)), mfpt, alpha, ret_var)


def rank_one_delta(Z: np.ndarray, i: int, p: int, q: int, x: float) -> float:
    """Change in Kemeny's constant for the move ``T + x e_i (e_p - e_q)^T``,
    given the group inverse `Z` of ``I - T``."""
    zi = Z[:, i]
    denom = 1.0 - x * (zi[p] - zi[q])
    if abs(denom) <= 1e-12:
        raise DenominatorVanishes(f"1 - x v^T Q# e_i = {denom!r}")
    z2 = Z @ zi
    return x * (z2[p] - z2[q]) / denom


def kemeny_rank_one_update(T, i: int, p: int, q: int, x: float) -> float:
    r"""Kemeny's constant of :math:`T + x e_i (e_p - e_q)^\top` without
    refactoring.

    .. math::

        K(S_x) = K(T) + \frac{x\,(e_p-e_q)^\top (Q^\#)^2 e_i}
                             {1 - x\,(e_p-e_q)^\top Q^\# e_i}

    `x` must lie in ``[-t[i, p], t[i, q]]`` so the result stays stochastic.
    """
    T = as_stochastic(T)
    a = T.entries
    n = T.n
    for idx in (i, p, q):
        if not 0 <= idx < n:
            raise OutOfRange(f"index {idx} outside 0..{n - 1}")
    lo, hi = -a[i, p], a[i, q]
    if not lo - 1e-15 <= x <= hi + 1e-15:
        raise OutOfRange(f"x = {x!r} outside [{lo!r}, {hi!r}]")
    Z = group_inverse_Q(T)
    return float(np.trace(Z)) + rank_one_delta(Z, i, p, q, x)


def perturb(T, i: int, p: int, q: int, x: float) -> StochasticMatrix:
    """The matrix ``T + x e_i (e_p - e_q)^T``."""
    T = as_stochastic(T)
    a = np.array(T.entries)
    a[i, p] += x
    a[i, q] -= x
    return validate_stochastic(a, T.tol)


def cycle_matrix(order: Sequence[int], n: Optional[int] = None) -> np.ndarray:
    """Permutation matrix sending ``order[m]`` to ``order[m + 1]`` cyclically."""
    n = len(order) if n is None else n
    C = np.zeros((n, n))
    for a, b in zip(order, list(order[1:]) + [order[0]]):
        C[a, b] = 1.0
    return C
