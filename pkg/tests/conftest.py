import numpy as np
import pytest

from awgauss import GaussianSpec


@pytest.fixture
def reflected_pair():
    """Centered pair whose optimal per-time signs are (-1, +1).

    diag(L^T M) = (-3, 1): the synchronous coupling is strictly suboptimal
    and the adapted-optimal map reflects the first coordinate.
    """
    mu = GaussianSpec(np.zeros(2), np.array([[1.0, 2.0], [2.0, 5.0]]))
    nu = GaussianSpec(np.zeros(2), np.array([[1.0, -2.0], [-2.0, 5.0]]))
    return mu, nu


@pytest.fixture
def tied_pair():
    """Centered pair with diag(L^T M) = (0, 1): the optimum is not unique.

    Factors [[1,0],[1,1]] and [[1,0],[-1,1]]; the time-1 correlation is a
    free direction of the cost.
    """
    mu = GaussianSpec.from_cholesky(np.zeros(2), np.array([[1.0, 0.0], [1.0, 1.0]]))
    nu = GaussianSpec.from_cholesky(np.zeros(2), np.array([[1.0, 0.0], [-1.0, 1.0]]))
    return mu, nu
