"""Couplings and transport maps between non-degenerate Gaussian laws.

The central object is the correlated-noise family ``pi^P``: drive both laws
through their Cholesky factors with standard normal noises whose per-time
correlations are ``rho_t in [-1, 1]``.  Every such coupling respects the flow
of information in both directions, its quadratic cost is available in closed
form, and choosing ``rho_t = sign(diag(L^T M)_t)`` attains the bicausal
optimum.  ``rho = 1`` recovers the synchronous (Knothe-Rosenblatt) coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BadCorrelation, DimensionMismatch, NumericalInconsistency
from .linalg import GaussianSpec, as_vector, check_split, conditional, sqrtm

#: |diag(L^T M)_t| at or below FREE_TOL * ||L||_F * ||M||_F counts as zero,
#: i.e. the correlation at time t is a free (non-unique) direction
FREE_TOL = 1e-12

BRENIER = "brenier"
KNOTHE_ROSENBLATT = "knothe_rosenblatt"
ADAPTED_WASSERSTEIN = "adapted_wasserstein"
MAP_KINDS = (BRENIER, KNOTHE_ROSENBLATT, ADAPTED_WASSERSTEIN)


def as_correlations(rho, *, dim: int | None = None) -> np.ndarray:
    """Validate a per-time correlation vector with entries in [-1, 1]."""
    r = as_vector(rho, dim=dim, name="rho")
    if np.any(np.abs(r) > 1.0):
        raise BadCorrelation("correlations must lie in [-1, 1]")
    return r


@dataclass(frozen=True, eq=False)
class SignSelection:
    """Optimal per-time correlation signs for a pair of Cholesky factors.

    ``rho[t] = sign(diag(L^T M)_t)`` wherever that diagonal entry is nonzero;
    entries within ``FREE_TOL`` of zero leave the cost unchanged in that
    direction, default to +1 (the synchronous choice), and are reported in
    ``free_indices`` (1-based time indices).  ``unique`` is true iff there are
    no free indices.  The last entry is always +1 since
    ``diag(L^T M)_N = L_NN M_NN > 0``.
    """

    rho: np.ndarray
    free_indices: tuple[int, ...]
    unique: bool
    diag: np.ndarray  # diag(L^T M), the quantity the rule reads


def optimal_sign(L, M, *, weights=None) -> SignSelection:
    """Sign rule selecting the cost-minimizing correlations.

    Parameters
    ----------
    L, M : array-like, shape (N, N)
        Lower-triangular Cholesky factors of the two covariances.
    weights : array-like, shape (N,), optional
        Strictly positive per-time cost weights; the rule then reads
        ``diag(L^T W M)`` instead of ``diag(L^T M)``.  Rescaling all weights
        by a positive constant leaves the selection unchanged.
    """
    L = np.asarray(L, dtype=float)
    M = np.asarray(M, dtype=float)
    if L.shape != M.shape or L.ndim != 2:
        raise DimensionMismatch(f"factor shapes differ: {L.shape} vs {M.shape}")
    if weights is None:
        d = np.sum(L * M, axis=0)
        scale = float(np.linalg.norm(L) * np.linalg.norm(M))
    else:
        w = as_vector(weights, dim=L.shape[0], name="weights")
        d = np.sum(w[:, None] * L * M, axis=0)
        scale = float(
            np.linalg.norm(np.sqrt(w)[:, None] * L) * np.linalg.norm(np.sqrt(w)[:, None] * M)
        )
    tol = FREE_TOL * scale
    free = np.abs(d) <= tol
    rho = np.where(d > tol, 1.0, np.where(d < -tol, -1.0, 1.0))
    free_indices = tuple(int(i) + 1 for i in np.flatnonzero(free))
    return SignSelection(
        rho=rho, free_indices=free_indices, unique=not free_indices, diag=d
    )


@dataclass(frozen=True, eq=False)
class JointGaussianCoupling:
    """Joint Gaussian law of a correlated pair ``(X, Y)`` on R^{2N}.

    Covariance has block form ``[[A, L P M^T], [M P L^T, B]]``; the marginal
    blocks equal the input covariances exactly.  The joint matrix is positive
    semidefinite, and definite iff every ``|rho_t| < 1``, so it is stored as a
    plain (mean, cov) pair rather than a GaussianSpec.
    """

    mean: np.ndarray
    cov: np.ndarray
    rho: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0] // 2

    @property
    def cross_block(self) -> np.ndarray:
        n = self.dim
        return self.cov[:n, n:]

    def marginal_x(self) -> GaussianSpec:
        n = self.dim
        return GaussianSpec(self.mean[:n], self.cov[:n, :n])

    def marginal_y(self) -> GaussianSpec:
        n = self.dim
        return GaussianSpec(self.mean[n:], self.cov[n:, n:])


def coupling_pi_p(mu: GaussianSpec, nu: GaussianSpec, rho) -> JointGaussianCoupling:
    """Correlated bicausal coupling of ``(mu, nu)`` with correlations ``rho``.

    The joint law of ``(a + L eps^X, b + M eps^Y)`` where the standard normal
    noises satisfy ``Corr(eps^X_t, eps^Y_t) = rho_t`` and are independent
    across times.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    r = as_correlations(rho, dim=mu.dim)
    L, M = mu.chol, nu.chol
    cross = (L * r[None, :]) @ M.T
    n = mu.dim
    cov = np.block([[mu.cov, cross], [cross.T, nu.cov]])
    cov = (cov + cov.T) / 2.0
    w = np.linalg.eigvalsh(cov)
    if w[0] < -1e-9 * max(w[-1], 1.0):
        raise NumericalInconsistency(
            f"joint covariance not PSD: min eigenvalue {w[0]:.3e}"
        )
    mean = np.concatenate([mu.mean, nu.mean])
    return JointGaussianCoupling(mean=mean, cov=cov, rho=r)


def coupling_cost(mu: GaussianSpec, nu: GaussianSpec, rho) -> float:
    """Expected squared distance ``E ||X - Y||^2`` under the correlated coupling.

    Closed form ``||a-b||^2 + Tr A + Tr B - 2 sum_t rho_t diag(L^T M)_t``;
    minimized over ``rho`` by :func:`optimal_sign`, where it equals the
    squared adapted distance.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    r = as_correlations(rho, dim=mu.dim)
    d = np.sum(mu.chol * nu.chol, axis=0)
    diff = mu.mean - nu.mean
    return float(
        diff @ diff + np.trace(mu.cov) + np.trace(nu.cov) - 2.0 * float(r @ d)
    )


@dataclass(frozen=True, eq=False)
class AffineTransportMap:
    """Affine map ``x -> offset + matrix @ x`` pushing one Gaussian to another."""

    offset: np.ndarray
    matrix: np.ndarray
    kind: str

    def __call__(self, x) -> np.ndarray:
        return self.offset + np.asarray(x, dtype=float) @ self.matrix.T

    def push(self, mu: GaussianSpec) -> GaussianSpec:
        """Pushforward of ``mu`` under the map."""
        T = self.matrix
        cov = T @ mu.cov @ T.T
        return GaussianSpec(self.offset + T @ mu.mean, (cov + cov.T) / 2.0)


def _affine(mu, nu, T, kind) -> AffineTransportMap:
    return AffineTransportMap(offset=nu.mean - T @ mu.mean, matrix=T, kind=kind)


def brenier_map(mu: GaussianSpec, nu: GaussianSpec) -> AffineTransportMap:
    """Optimal unconstrained transport map between Gaussian laws.

    ``x -> b + T (x - a)`` with
    ``T = A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}``, symmetric positive
    definite (a convex gradient).  Each output coordinate generally reads the
    whole input path, which is exactly what the bicausal constraint forbids.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    S = sqrtm(mu.cov)
    w, V = np.linalg.eigh(S)
    Sinv = (V / w) @ V.T
    mid = sqrtm(S @ nu.cov @ S)
    T = Sinv @ mid @ Sinv
    return _affine(mu, nu, (T + T.T) / 2.0, BRENIER)


def kr_map(mu: GaussianSpec, nu: GaussianSpec) -> AffineTransportMap:
    """Synchronous (Knothe-Rosenblatt) transport map ``x -> b + M L^{-1} (x - a)``.

    The matrix is lower triangular with positive diagonal: each output
    coordinate depends on the input only through its past.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    L, M = mu.chol, nu.chol
    T = np.tril(solve_triangular(L.T, M.T, lower=False).T)
    return _affine(mu, nu, T, KNOTHE_ROSENBLATT)


@dataclass(frozen=True, eq=False)
class AdaptedMapResult:
    """Adapted-optimal transport map plus the sign selection that produced it.

    When ``sign.unique`` is false the optimal coupling is not unique; ``map``
    is then the canonical representative with +1 on the free indices (the
    synchronous tie-break), and ``sign.free_indices`` says which times are
    unconstrained.
    """

    map: AffineTransportMap
    sign: SignSelection

    @property
    def unique(self) -> bool:
        return self.sign.unique


def aw_map(mu: GaussianSpec, nu: GaussianSpec) -> AdaptedMapResult:
    """Adapted-optimal transport map ``x -> b + M P L^{-1} (x - a)``.

    ``P = diag(rho)`` from :func:`optimal_sign`; the matrix is lower
    triangular with diagonal signs ``rho_t``.  The map realizes the optimal
    bicausal coupling, and is the unique one iff no diagonal entry of
    ``L^T M`` vanishes.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    L, M = mu.chol, nu.chol
    sign = optimal_sign(L, M)
    T = np.tril(solve_triangular(L.T, (M * sign.rho[None, :]).T, lower=False).T)
    return AdaptedMapResult(map=_affine(mu, nu, T, ADAPTED_WASSERSTEIN), sign=sign)


def condition_coupling(
    mu: GaussianSpec, nu: GaussianSpec, rho, t: int, x_past, y_past
) -> JointGaussianCoupling:
    """Conditional coupling of the futures given both pasts.

    Conditioning the correlated coupling ``pi^P`` on ``X_{1:t} = x`` and
    ``Y_{1:t} = y`` yields the correlated coupling of the two conditional
    laws with the trailing correlations ``rho[t:]``: future noises are
    independent of past noises, so the blocks are read off the factor
    representation instead of inverting the (possibly singular) joint
    covariance.
    """
    if mu.dim != nu.dim:
        raise DimensionMismatch(f"laws have dimensions {mu.dim} and {nu.dim}")
    r = as_correlations(rho, dim=mu.dim)
    t = check_split(t, mu.dim)
    cond_mu = conditional(mu, t, x_past)
    cond_nu = conditional(nu, t, y_past)
    return coupling_pi_p(cond_mu, cond_nu, r[t:])
