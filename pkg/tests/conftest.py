import numpy as np
import pytest


def random_irreducible(rng, n, density=0.6):
    """Random irreducible stochastic matrix: a random full cycle plus noise."""
    a = rng.random((n, n)) * (rng.random((n, n)) < density)
    perm = rng.permutation(n)
    a[perm, np.roll(perm, -1)] += rng.uniform(0.2, 1.0, n)
    return a / a.sum(axis=1, keepdims=True)


def random_single_essential(rng, n):
    """Irreducible core on the first m states with transient states feeding it."""
    m = int(rng.integers(1, n + 1))
    a = np.zeros((n, n))
    a[:m, :m] = random_irreducible(rng, m) if m > 1 else 1.0
    for j in range(m, n):
        row = rng.random(n) * (rng.random(n) < 0.5)
        row[rng.integers(0, j)] += 0.5
        a[j] = row / row.sum()
    return a


def mfpt_by_solves(T):
    """Mean first passage times from one linear solve per target state."""
    T = np.asarray(T)
    n = T.shape[0]
    M = np.zeros((n, n))
    for k in range(n):
        keep = [j for j in range(n) if j != k]
        sub = np.eye(n - 1) - T[np.ix_(keep, keep)]
        M[keep, k] = np.linalg.solve(sub, np.ones(n - 1))
        M[k, k] = 1.0 + T[k, keep] @ M[keep, k]
    return M


def cycle(n):
    return np.roll(np.eye(n), 1, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
