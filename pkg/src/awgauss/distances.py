"""Closed-form transport distances between non-degenerate Gaussian laws.

Three covariance metrics and their process versions:

* ``bures_wasserstein`` / ``wasserstein2``  -- the classical unconstrained
  optimum;
* ``kr_distance`` / ``kr2``  -- cost of the synchronous (common-noise)
  coupling, Euclidean in the Cholesky coordinate;
* ``abw_distance`` / ``aw2``  -- the optimum over information-respecting
  (bicausal) couplings, ``sqrt(Tr A + Tr B - 2 ||diag(L^T M)||_1)`` on the
  covariance side.

Every process distance splits as mean term plus covariance term; the split is
exposed through :class:`DistanceReport` so each piece can be checked
independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    BadAngle,
    BadParameter,
    DimensionMismatch,
    NonPositiveWeight,
    NumericalInconsistency,
)
from .linalg import GaussianSpec, as_spd, as_vector, cholesky, sqrtm

#: squared distances are mathematically nonnegative; float residue down to
#: -CLAMP_TOL is clamped to zero, anything lower is treated as a bug
CLAMP_TOL = 1e-9


def clamp_sq(value: float, *, what: str = "squared distance") -> float:
    """Clamp tiny negative float residue of a nonnegative quantity to zero."""
    if value < -CLAMP_TOL:
        raise NumericalInconsistency(f"{what} = {value!r} is negative beyond float noise")
    return max(value, 0.0)


@dataclass(frozen=True, eq=False)
class DistanceReport:
    """A squared process distance split into mean and covariance parts.

    Invariants: ``squared_value == mean_term + cov_term`` and
    ``value == sqrt(squared_value)``.
    """

    squared_value: float
    value: float
    mean_term: float
    cov_term: float


def _report(mean_term: float, cov_term: float) -> DistanceReport:
    sq = mean_term + cov_term
    return DistanceReport(
        squared_value=sq, value=math.sqrt(sq), mean_term=mean_term, cov_term=cov_term
    )


def _pair(A, B):
    A = as_spd(A, name="A")
    B = as_spd(B, name="B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"matrix shapes differ: {A.shape} vs {B.shape}")
    return A, B


def _check_same_dim(mu: GaussianSpec, nu: GaussianSpec):
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")


def _mean_term(mu: GaussianSpec, nu: GaussianSpec) -> float:
    d = mu.mean - nu.mean
    return float(d @ d)


def bures_wasserstein(A, B) -> float:
    """Bures-Wasserstein distance between SPD matrices.

    ``sqrt(Tr A + Tr B - 2 Tr (A^{1/2} B A^{1/2})^{1/2})``, the covariance
    part of the unconstrained quadratic transport between centered Gaussians.
    """
    A, B = _pair(A, B)
    S = sqrtm(A)
    inner = S @ B @ S
    w = np.linalg.eigvalsh((inner + inner.T) / 2.0)
    cross = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return math.sqrt(clamp_sq(float(np.trace(A) + np.trace(B)) - 2.0 * cross))


def wasserstein2(mu: GaussianSpec, nu: GaussianSpec) -> DistanceReport:
    """Quadratic Wasserstein distance between Gaussian laws (mean/cov split)."""
    _check_same_dim(mu, nu)
    return _report(_mean_term(mu, nu), bures_wasserstein(mu.cov, nu.cov) ** 2)


def kr_distance(A, B) -> float:
    """Frobenius distance between the Cholesky factors of ``A`` and ``B``.

    Equals ``sqrt(Tr A + Tr B - 2 Tr(L^T M))``; the Cholesky map is an
    isometry onto lower-triangular matrices under the Frobenius norm.
    """
    A, B = _pair(A, B)
    return float(np.linalg.norm(cholesky(A) - cholesky(B)))


def kr2(mu: GaussianSpec, nu: GaussianSpec) -> DistanceReport:
    """Cost of the synchronous coupling between Gaussian laws (mean/cov split)."""
    _check_same_dim(mu, nu)
    return _report(_mean_term(mu, nu), kr_distance(mu.cov, nu.cov) ** 2)


def abw_distance(A, B) -> float:
    """Adapted Bures-Wasserstein distance between SPD matrices.

    Parameters
    ----------
    A, B : array-like, shape (N, N)
        Symmetric positive definite.

    Returns
    -------
    float
        ``sqrt(Tr A + Tr B - 2 ||diag(L^T M)||_1)`` where ``L, M`` are the
        Cholesky factors.  Differs from :func:`kr_distance` exactly by
        ``4 * sum of the negative entries of diag(L^T M)`` under the square
        root, and coincides with it whenever that diagonal is nonnegative.

    Notes
    -----
    Computed as ``||L - M P||_F`` with ``P = diag(sign(diag(L^T M)))``, which
    equals the trace expression identically but, being a sum of squares, has
    no cancellation: identical inputs give exactly zero.
    """
    A, B = _pair(A, B)
    L = cholesky(A)
    M = cholesky(B)
    d = np.sum(L * M, axis=0)  # diag(L^T M)
    signs = np.where(d < 0.0, -1.0, 1.0)
    return float(np.linalg.norm(L - M * signs[None, :]))


def aw2(mu: GaussianSpec, nu: GaussianSpec) -> DistanceReport:
    """Adapted (bicausal) quadratic transport distance between Gaussian laws.

    ``aw2(mu, nu)^2 = ||a - b||^2 + abw_distance(A, B)^2``.
    """
    _check_same_dim(mu, nu)
    return _report(_mean_term(mu, nu), abw_distance(mu.cov, nu.cov) ** 2)


def as_weights(w, *, dim: int | None = None) -> np.ndarray:
    """Validate a strictly positive per-time weight vector."""
    v = as_vector(w, dim=dim, name="weights")
    if np.any(v <= 0.0):
        raise NonPositiveWeight("all cost weights must be strictly positive")
    return v


def weighted_bicausal_value(mu: GaussianSpec, nu: GaussianSpec, weights) -> float:
    """Optimal bicausal value for the weighted square cost sum_t w_t (x_t - y_t)^2.

    Returns the squared optimal value

    ``(a-b)^T W (a-b) + Tr(L^T W L) + Tr(M^T W M) - 2 ||diag(L^T W M)||_1``

    with ``W = diag(w)``.  Reduces to ``aw2(mu, nu).squared_value`` at
    ``w = 1``.  The optimal per-time correlations are the signs of
    ``diag(L^T W M)``.
    """
    _check_same_dim(mu, nu)
    w = as_weights(weights, dim=mu.dim)
    d = mu.mean - nu.mean
    # absorb the weights into the factors; the same cancellation-free
    # sum-of-squares form as abw_distance then applies
    root_w = np.sqrt(w)[:, None]
    Lw = root_w * mu.chol
    Mw = root_w * nu.chol
    diag = np.sum(Lw * Mw, axis=0)  # = diag(L^T W M)
    signs = np.where(diag < 0.0, -1.0, 1.0)
    value = float(d @ (w * d)) + float(np.sum((Lw - Mw * signs[None, :]) ** 2))
    return value


def _check_angle(theta: float, name: str) -> float:
    theta = float(theta)
    if not 0.0 < theta < math.pi:
        raise BadAngle(f"{name} = {theta!r} must lie strictly inside (0, pi)")
    return theta


def incompleteness_member(theta: float, n: int) -> GaussianSpec:
    """n-th element of the non-convergent Cauchy sequence at angle ``theta``.

    Centered 2-d Gaussian with Cholesky factor
    ``[[1/n, 0], [cos(theta), sin(theta) + 1/n]]``: a positive definite
    perturbation of the rank-one covariance ``[[0, 0], [0, 1]]`` whose factor
    direction is controlled by ``theta``.
    """
    theta = _check_angle(theta, "theta")
    n = int(n)
    if n < 1:
        raise BadParameter(f"sequence index n must be >= 1, got {n}")
    L = np.array(
        [[1.0 / n, 0.0], [math.cos(theta), math.sin(theta) + 1.0 / n]]
    )
    return GaussianSpec.from_cholesky(np.zeros(2), L)


class IncompletenessValue(NamedTuple):
    finite_n_value: float
    limit_value: float


def incompleteness_limit(theta: float, theta_prime: float, n: int) -> IncompletenessValue:
    """Squared adapted distance between the two angle sequences at index ``n``,
    together with its analytic large-``n`` limit
    ``2 - 2 (|cos t cos t'| + sin t sin t')``.

    The limit is nonzero for distinct angles even though both sequences are
    Cauchy and converge weakly to the same degenerate law: the metric space
    of Gaussian laws is incomplete under the adapted distance.
    """
    theta = _check_angle(theta, "theta")
    theta_prime = _check_angle(theta_prime, "theta_prime")
    mu_n = incompleteness_member(theta, n)
    nu_n = incompleteness_member(theta_prime, n)
    finite = aw2(mu_n, nu_n).squared_value
    limit = 2.0 - 2.0 * (
        abs(math.cos(theta) * math.cos(theta_prime))
        + math.sin(theta) * math.sin(theta_prime)
    )
    return IncompletenessValue(finite_n_value=finite, limit_value=limit)
