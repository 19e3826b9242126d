import numpy as np
import pytest

from kemeny_completion.diagonal import solve_diagonal
from kemeny_completion.errors import BudgetExceeded, DimensionTooLarge, Infeasible
from kemeny_completion.markov import essential_structure, kemeny_trace
from kemeny_completion.oracle import (
    _kemeny_batch,
    _single_essential_batch,
    perm_bruteforce_row,
    random_search_min,
    sparse_enumeration_min,
)
from kemeny_completion.row import objective_gamma, row_spec, solve_row

from conftest import random_single_essential

F = None
SIXTH, THIRD = 1 / 6, 1 / 3
EXAMPLE_ROW = [THIRD, THIRD, SIXTH, SIXTH, 0.0, 0.0]


def example_grid():
    return [[F] * 6 for _ in range(5)] + [EXAMPLE_ROW]


def diag_grid(d):
    n = len(d)
    return [[d[j] if j == k else F for k in range(n)] for j in range(n)]


def test_batch_structure_matches_scc():
    rng = np.random.default_rng(0)
    T = (rng.random((500, 5, 5)) < 0.3).astype(float)
    T[T.sum(axis=2) == 0] = 1.0
    T /= T.sum(axis=2, keepdims=True)
    got = _single_essential_batch(T)
    want = [essential_structure(t).single_essential for t in T]
    np.testing.assert_array_equal(got, want)


def test_batch_kemeny_matches_trace():
    rng = np.random.default_rng(1)
    T = np.stack([random_single_essential(rng, 6) for _ in range(20)])
    np.testing.assert_allclose(_kemeny_batch(T), [kemeny_trace(t) for t in T], atol=1e-10)


# -- sparse enumeration ---------------------------------------------------


def test_sparse_examples():
    assert sparse_enumeration_min(diag_grid([0.5, 0, 0])).best_value == pytest.approx(1.25)
    rep = sparse_enumeration_min(example_grid())
    assert rep.best_value == pytest.approx(83 / 28, abs=1e-12)
    assert rep.patterns_examined == 6**5
    rep = sparse_enumeration_min([[F, F], [F, F]])
    assert rep.best_value == pytest.approx(0.5)
    np.testing.assert_array_equal(rep.best_completion.entries, [[0, 1], [1, 0]])


def test_sparse_report_invariants():
    rep = sparse_enumeration_min(diag_grid([0.3, 0.1, 0.6, 0.2]))
    assert rep.method == "sparse_enum"
    assert rep.patterns_feasible <= rep.patterns_examined == 3**4
    assert rep.best_value == pytest.approx(kemeny_trace(rep.best_completion), abs=1e-10)


def test_sparse_tie_break_is_lexicographic():
    rep = sparse_enumeration_min([[F] * 3 for _ in range(3)])
    assert rep.best_value == pytest.approx(1.0)
    assert rep.detail["pattern"].assignment == ((0, 1), (1, 2), (2, 0))


def test_sparse_errors():
    with pytest.raises(Infeasible):
        sparse_enumeration_min([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(BudgetExceeded):
        sparse_enumeration_min(example_grid(), budget=100)


def test_sparse_mixed_spec_beats_random_search():
    grid = [
        [0.2, F, F, 0.1],
        [F, F, 0.5, F],
        [0.3, 0.3, 0.4, 0.0],
        [F, F, F, 0.25],
    ]
    rep = sparse_enumeration_min(grid)
    rs = random_search_min(grid, iterations=4000, seed=3)
    assert rs.best_value >= rep.best_value - 1e-8


# -- permutation brute force ----------------------------------------------


def test_perm_example():
    rep = perm_bruteforce_row(row_spec(0.0, [THIRD, THIRD, SIXTH, SIXTH, 0.0]))
    assert rep.best_value == pytest.approx(83 / 28, abs=1e-12)
    assert rep.detail["ordering"] == [SIXTH, 0.0, SIXTH, THIRD, THIRD]
    assert rep.method == "perm_bruteforce"


def test_perm_cycle_row():
    for n in range(2, 8):
        rep = perm_bruteforce_row(row_spec(0.0, [0.0] * (n - 2) + [1.0]))
        assert rep.best_value == pytest.approx((n - 1) / 2, abs=1e-12)


def test_perm_three_states_two_formula_min():
    rng = np.random.default_rng(4)
    for _ in range(20):
        w = rng.dirichlet(np.ones(3))
        spec = row_spec(w[0], w[1:])
        g = objective_gamma(spec.r0, sorted(spec.r))
        expected = min(0.5 + 1 / (1 - spec.r0), 2 - g / 2)
        assert perm_bruteforce_row(spec).best_value == pytest.approx(expected, abs=1e-12)


def test_perm_dimension_limit():
    with pytest.raises(DimensionTooLarge):
        perm_bruteforce_row(row_spec(0.0, [1 / 11] * 11))


# -- random search --------------------------------------------------------


def test_random_search_bounds_diagonal():
    d = [0.3, 0.1, 0.6, 0.2]
    rep = random_search_min(diag_grid(d), iterations=10_000, seed=0)
    assert rep.best_value >= solve_diagonal(d).value - 1e-8
    assert rep.best_value == pytest.approx(kemeny_trace(rep.best_completion), abs=1e-10)
    assert rep.patterns_feasible <= rep.patterns_examined


def test_random_search_bounds_row():
    rep = random_search_min(example_grid(), iterations=10_000, seed=0)
    assert rep.best_value >= solve_row(row_spec(0.0, EXAMPLE_ROW[-2::-1])).value - 1e-8
    assert rep.best_value >= 83 / 28 - 1e-8


def test_random_search_is_deterministic():
    a = random_search_min(diag_grid([0.2, 0.5, 0.1]), iterations=2000, seed=42)
    b = random_search_min(diag_grid([0.2, 0.5, 0.1]), iterations=2000, seed=42)
    assert a.best_value == b.best_value
    np.testing.assert_array_equal(a.best_completion.entries, b.best_completion.entries)
    assert (a.patterns_examined, a.patterns_feasible) == (b.patterns_examined, b.patterns_feasible)


def test_random_search_infeasible():
    with pytest.raises(Infeasible):
        random_search_min([[1.0, 0.0], [0.0, 1.0]])


def test_sparse_is_deterministic():
    a = sparse_enumeration_min(example_grid())
    b = sparse_enumeration_min(example_grid())
    assert a.best_value == b.best_value
    assert a.detail == b.detail
