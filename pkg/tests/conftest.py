from fractions import Fraction as F

import numpy as np
import pytest

from photocount.wishart import WishartModel


def random_exact_model(rng: np.random.Generator, d: int, p: int, with_means: bool = True) -> WishartModel:
    """Hermitian PD sigma = A A^† + I with small Gaussian-rational entries."""
    A = [[(F(int(rng.integers(-3, 4)), 4), F(int(rng.integers(-3, 4)), 4)) for _ in range(d)] for _ in range(d)]
    sigma = []
    for a in range(d):
        row = []
        for b in range(d):
            re = sum(A[a][c][0] * A[b][c][0] + A[a][c][1] * A[b][c][1] for c in range(d))
            im = sum(A[a][c][1] * A[b][c][0] - A[a][c][0] * A[b][c][1] for c in range(d))
            row.append((re + (1 if a == b else 0), im))
        sigma.append(row)
    means = None
    if with_means:
        means = [[(F(int(rng.integers(-2, 3)), 3), F(int(rng.integers(-2, 3)), 3)) for _ in range(d)]
                 for _ in range(p)]
    return WishartModel(sigma, means, p=p)


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


@pytest.fixture
def model2():
    sigma = [[1, (F(1, 4), F(1, 10))], [(F(1, 4), F(-1, 10)), 1]]
    return WishartModel(sigma, [[F(1, 2), 0]])


@pytest.fixture
def model3():
    sigma = [[1, (F(1, 4), F(1, 5)), 0],
             [(F(1, 4), F(-1, 5)), F(3, 2), (0, F(1, 3))],
             [0, (0, F(-1, 3)), F(1, 2)]]
    means = [[F(1, 2), 0, (0, F(1, 4))], [0, F(1, 3), F(1, 5)]]
    return WishartModel(sigma, means)
