r"""Completions when a single row is specified and everything else is free.

The specified row holds ``r0`` on its diagonal and ``r_1..r_{n-1}``
elsewhere; ``r_j`` sits in the ``j``-th column counted backwards from the
specified state (for the last row: column ``n - 1 - j``, 0-based).

An optimal completion either runs a cycle through all other states
(value ``(n-2)/2 + 1/(1-r0)``) or feeds every other state along a single
path into the specified state.  In the path case the state at distance
``j`` receives ``v_j`` and

.. math::

    K = (n-1) - \frac{\gamma}{2}, \qquad
    \gamma = \frac{\sum_j j(j+1) v_j}{1 + \sum_j j v_j},

so the problem reduces to ordering the row values to maximize ``gamma``.
Distances (``j``, ``j1``, ``j2``) are 1-based throughout this module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadCycleLength,
    BadIndices,
    BadK,
    DiagonalAtOne,
    EmptyPartition,
    MassNotOne,
    NumericalError,
    OutOfRange,
    R0OutOfRange,
)
from .markov import kemeny_trace, validate_stochastic
from .solution import CompletionSolution

MASS_TOL = 1e-12
TIE_TOL = 1e-12
INTEGER_TOL = 1e-9
WITNESS_TOL = 1e-9


@dataclass(frozen=True)
class RowSpec:
    """One fully specified row of an otherwise free ``n x n`` partial matrix."""

    n: int
    r0: float
    r: tuple[float, ...]
    state: Optional[int] = None

    def __post_init__(self):
        if self.state is None:
            object.__setattr__(self, "state", self.n - 1)

    @property
    def columns(self) -> tuple[int, ...]:
        """Column holding ``r_j`` for j = 1..n-1."""
        return tuple(c for c in reversed(range(self.n)) if c != self.state)

    def row(self) -> np.ndarray:
        out = np.zeros(self.n)
        out[self.state] = self.r0
        out[list(self.columns)] = self.r
        return out


def row_spec(r0: float, r: Sequence[float]) -> RowSpec:
    """Validated :class:`RowSpec` for the last row."""
    r = tuple(float(v) for v in r)
    r0 = float(r0)
    if not r:
        raise EmptyPartition("need n >= 2")
    if r0 < 0 or min(r) < 0:
        raise OutOfRange("row entries must be nonnegative")
    if abs(math.fsum((r0,) + r) - 1.0) > MASS_TOL:
        raise MassNotOne(f"row sums to {math.fsum((r0,) + r)!r}")
    return RowSpec(len(r) + 1, r0, r)


def row_spec_from_row(row: Sequence[float], state: Optional[int] = None) -> RowSpec:
    row = [float(v) for v in row]
    n = len(row)
    state = n - 1 if state is None else state
    r = tuple(row[c] for c in RowSpec(n, 0.0, (), state).columns)
    spec = row_spec(row[state], r)
    return RowSpec(n, spec.r0, spec.r, state)


def row_cycle_value(n: int, k: int, r0: float) -> float:
    """Kemeny's constant when the free rows are 0/1, contain a cycle on `k`
    states avoiding the specified one, and the rest drain into it."""
    if not 1 <= k <= n - 1:
        raise BadCycleLength(f"cycle length {k} outside 1..{n - 1}")
    if r0 >= 1.0:
        raise DiagonalAtOne("r0 = 1 leaves the specified state absorbing")
    return (2 * n - k - 3) / 2 + 1.0 / (1.0 - r0)


def row_path_value(rtilde: Sequence[float], n: int) -> float:
    """Path-case value from the mass ``rtilde[j]`` sitting at distance j."""
    rt = np.asarray(rtilde, dtype=float)
    if rt.size == 0:
        raise EmptyPartition("empty distance partition")
    if rt.size > n:
        raise BadIndices(f"{rt.size} distance classes exceed n = {n}")
    if abs(math.fsum(rt) - 1.0) > MASS_TOL:
        raise MassNotOne(f"distance masses sum to {math.fsum(rt)!r}")
    j = np.arange(rt.size)
    return float(n - 1 - np.dot(j * (j + 1), rt) / (2.0 * np.dot(j + 1, rt)))


def objective_gamma(r0: float, ordering: Sequence[float]) -> float:
    """``gamma`` for row values placed at distances 1, 2, ... in order."""
    v = np.asarray(ordering, dtype=float)
    j = np.arange(1, v.size + 1)
    return float(np.dot(j * (j + 1), v) / (1.0 + np.dot(j, v)))


def gamma_of_orderings(orderings: np.ndarray) -> np.ndarray:
    """Row-wise ``gamma`` of an ``(m, n-1)`` array of orderings."""
    j = np.arange(1, orderings.shape[1] + 1)
    return (orderings @ (j * (j + 1))) / (1.0 + orderings @ j)


def path_value(r0: float, ordering: Sequence[float]) -> float:
    return len(ordering) - objective_gamma(r0, ordering) / 2.0


def swap_sign(r0: float, r: Sequence[float], j1: int, j2: int, tol: float = 1e-12) -> int:
    """Sign of the change in ``gamma`` when the values at distances `j1`
    and `j2` are exchanged: the sign of ``(r_j1 - r_j2)(j1 + j2 + 1 - gamma)``.
    Products within `tol` of zero count as zero."""
    m = len(r)
    if not 1 <= j1 < j2 <= m:
        raise BadIndices(f"need 1 <= j1 < j2 <= {m}, got {j1}, {j2}")
    g = objective_gamma(r0, r)
    prod = (r[j1 - 1] - r[j2 - 1]) * (j1 + j2 + 1 - g)
    if abs(prod) <= tol:
        return 0
    return 1 if prod > 0 else -1


def canonical_ordering(rho: Sequence[float], k: int) -> tuple[float, ...]:
    """Interleave the nondecreasing values `rho` for ``floor(gamma) = k``.

    Distances ``1..floor((k-1)/2)`` take ``rho[k-2j]``, distances
    ``ceil(k/2)..k-2`` take ``rho[2j-k+1]`` and the rest stay sorted
    (indices 1-based as in ``rho_1 <= ... <= rho_{n-1}``).
    """
    rho = [float(v) for v in rho]
    m = len(rho)
    if any(a > b for a, b in zip(rho, rho[1:])):
        raise OutOfRange("rho must be nondecreasing")
    if not 4 <= k <= m - 1:
        raise BadK(f"k = {k} outside 4..{m - 1}")
    out = [0.0] * m
    for j in range(1, (k - 1) // 2 + 1):
        out[j - 1] = rho[k - 2 * j - 1]
    for j in range((k + 1) // 2, k - 1):
        out[j - 1] = rho[2 * j - k]
    for j in range(k - 1, m + 1):
        out[j - 1] = rho[j - 1]
    return tuple(out)


def exchange_family(ordering: Sequence[float], k: int) -> list[tuple[float, ...]]:
    """Orderings reached by swapping distances ``j <-> k-1-j`` for any subset
    of ``j in 1..floor(k/2)-1``; these leave ``gamma = k`` unchanged."""
    pairs = [(j, k - 1 - j) for j in range(1, k // 2)]
    seen = set()
    for mask in range(1 << len(pairs)):
        v = list(ordering)
        for b, (a, c) in enumerate(pairs):
            if mask >> b & 1:
                v[a - 1], v[c - 1] = v[c - 1], v[a - 1]
        seen.add(tuple(v))
    return sorted(seen)


@dataclass(frozen=True)
class GammaMax:
    """Maximum of ``gamma`` over orderings.

    ``case`` is ``"a"`` (gamma < 4, sorted order optimal), ``"b"``
    (non-integer gamma > 4, canonical order for ``k = floor(gamma)``),
    ``"c"`` (integer gamma = k, canonical order plus its exchange family)
    or ``"degenerate"`` (all mass on one value equal to 1).
    ``ordering`` is the lexicographically smallest known maximizer.
    """

    gamma: float
    ordering: tuple[float, ...]
    case: str
    k: Optional[int] = None
    argmax: tuple[tuple[float, ...], ...] = field(default_factory=tuple)


def maximize_gamma(r0: float, r: Sequence[float]) -> GammaMax:
    """Maximize ``gamma`` over the reduced candidate set: the sorted order
    and the canonical order for every ``k = 4..n-2``."""
    rho = tuple(sorted(float(v) for v in r))
    m = len(rho)
    n = m + 1
    if m and rho[-1] == 1.0:
        return GammaMax(float(m), rho, "degenerate", None, (rho,))
    cands = [rho] + [canonical_ordering(rho, k) for k in range(4, n - 1)]
    gam = [objective_gamma(r0, c) for c in cands]
    gmax = max(gam)
    nearest = round(gmax)
    if abs(gmax - nearest) <= INTEGER_TOL and 4 <= nearest <= n - 2:
        case, k = "c", int(nearest)
    elif gmax < 4:
        case, k = "a", None
    else:
        case, k = "b", int(math.floor(gmax))
    best = {c for c, g in zip(cands, gam) if g >= gmax - TIE_TOL}
    if case == "c":
        best.update(exchange_family(canonical_ordering(rho, k), k))
    argmax = tuple(sorted(best))
    return GammaMax(gmax, argmax[0], case, k, argmax)


def _path_witness(spec: RowSpec, ordering: Sequence[float]) -> np.ndarray:
    """Path ``d_{n-1} -> ... -> d_1 -> state`` where ``d_j`` is a column of
    the specified row holding ``ordering[j-1]``."""
    n, s = spec.n, spec.state
    unused = list(zip(spec.r, spec.columns))
    at_distance = [s]
    for v in ordering:
        idx = next(i for i, (val, _) in enumerate(unused) if val == v)
        at_distance.append(unused.pop(idx)[1])
    a = np.zeros((n, n))
    for j in range(1, n):
        a[at_distance[j], at_distance[j - 1]] = 1.0
    a[s] = spec.row()
    return a


def _cycle_witness(spec: RowSpec) -> np.ndarray:
    n, s = spec.n, spec.state
    cols = spec.columns
    a = np.zeros((n, n))
    for c, nxt in zip(cols, cols[1:] + cols[:1]):
        a[c, nxt] = 1.0
    a[s] = spec.row()
    return a


def _verified(a: np.ndarray, value: float):
    T = validate_stochastic(a)
    got = kemeny_trace(T)
    if abs(got - value) > WITNESS_TOL:
        raise NumericalError(f"witness has K = {got!r}, closed form gave {value!r}")
    return T


def solve_row(spec: RowSpec) -> CompletionSolution:
    """Minimum of Kemeny's constant over completions of a row-specified matrix.

    Ties between the cycle and path branches go to the path witness.
    """
    n, r0 = spec.n, spec.r0
    if abs(math.fsum((r0,) + spec.r) - 1.0) > MASS_TOL:
        raise MassNotOne("specified row does not sum to 1")
    if r0 == 1.0:
        value = float(n - 1)
        ordering = tuple(sorted(spec.r))
        return CompletionSolution(
            value,
            _verified(_path_witness(spec, ordering), value),
            "row-absorbing",
            {"branch": "path", "descriptor": "absorbing-specified-row",
             "ordering": list(ordering), "gamma": 0.0},
            unique=None,
        )
    cycle = row_cycle_value(n, n - 1, r0)
    gm = maximize_gamma(r0, spec.r)
    path = (n - 1) - gm.gamma / 2.0
    structure = {
        "cycle_value": cycle,
        "path_value": path,
        "gamma": gm.gamma,
        "case": gm.case,
        "k": gm.k,
        "ordering": list(gm.ordering),
        "argmax_orderings": [list(o) for o in gm.argmax],
    }
    if path <= cycle + TIE_TOL:
        structure["branch"] = "path"
        return CompletionSolution(
            path, _verified(_path_witness(spec, gm.ordering), path), "row-path", structure
        )
    structure["branch"] = "cycle"
    return CompletionSolution(
        cycle, _verified(_cycle_witness(spec), cycle), "row-cycle", structure
    )


def brute_force_gamma(r0: float, r: Sequence[float], chunk: int = 1 << 16):
    """Exhaustive maximum of ``gamma`` over all ``(n-1)!`` orderings.

    Returns ``(gamma_max, argmax)`` where ``argmax`` is the sorted list of
    distinct maximizing value vectors within ``1e-12``.
    """
    vals = np.asarray(r, dtype=float)
    m = vals.size
    perms = itertools.permutations(range(m))
    best = -np.inf
    kept: list[np.ndarray] = []
    while True:
        block = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(perms, chunk)), dtype=np.intp
        )
        if block.size == 0:
            break
        V = vals[block.reshape(-1, m)]
        g = gamma_of_orderings(V)
        best = max(best, float(g.max()))
        # anything within tolerance of the running best may still win
        kept.append(np.column_stack([g, V])[g >= best - TIE_TOL])
    rows = np.concatenate(kept)
    winners = {tuple(float(x) for x in row[1:]) for row in rows if row[0] >= best - TIE_TOL}
    return best, sorted(winners)


def regime_instance(
    n: int, k: int, gamma: float, eps: float, c: Sequence[float]
) -> RowSpec:
    r"""Row whose gamma-maximizing ordering is the canonical one for `k`.

    Sets ``rhat_j = eps c_j`` (j <= n-2), ``rhat_{n-1} = 1 - eps`` and

    .. math::

        1 - r_0 = \frac{\gamma}{(1-\epsilon)(n-1)(n-\gamma)
                  + \epsilon \sum_j j c_j (j+1-\gamma)},

    then ``r_j = (1 - r_0) rhat_j``.  The identity ordering attains
    ``gamma``; `c` must already be in canonical order for `k` (see
    :func:`canonical_weights`).
    """
    c = np.asarray(c, dtype=float)
    if not 4 <= k <= n - 2:
        raise BadK(f"k = {k} outside 4..{n - 2}")
    if not k <= gamma < k + 1:
        raise OutOfRange(f"gamma = {gamma} outside [{k}, {k + 1})")
    if not 0 < eps < 0.5:
        raise OutOfRange(f"eps = {eps} outside (0, 1/2)")
    if c.size != n - 2 or np.any(c < 0) or abs(c.sum() - 1.0) > MASS_TOL:
        raise OutOfRange("c must be n-2 nonnegative weights summing to 1")
    rhat = tuple(np.append(eps * c, 1.0 - eps).tolist())
    if canonical_ordering(sorted(rhat), k) != rhat:
        raise OutOfRange(f"weights are not in canonical order for k = {k}")
    j = np.arange(1, n - 1)
    den = (1 - eps) * (n - 1) * (n - gamma) + eps * np.dot(j * c, j + 1 - gamma)
    one_minus_r0 = gamma / den
    r0 = 1.0 - one_minus_r0
    if not 0 < r0 < 1:
        raise R0OutOfRange(f"r0 = {r0!r}; eps too large")
    r = tuple(float(one_minus_r0 * v) for v in rhat)
    return RowSpec(n, float(r0), r)


def canonical_weights(c: Sequence[float], k: int) -> np.ndarray:
    """Rearrange `c` so that ``eps * c`` followed by ``1 - eps`` is in
    canonical order for `k`."""
    c = sorted(float(v) for v in c)
    arranged = canonical_ordering(c + [max(c) + 1.0], k)
    return np.asarray(arranged[:-1])
