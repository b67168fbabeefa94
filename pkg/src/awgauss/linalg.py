"""Gaussian-law primitives and dense small-matrix SPD linear algebra.

Matrices are plain float64 ndarrays throughout; nothing here is meant for
dimensions beyond a few hundred.  All functions are pure and all returned
values can be shared freely across threads.  Sampling takes an explicit seed
(NumPy ``default_rng``, i.e. PCG64), so there is no hidden global state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    BadSplit,
    DimensionMismatch,
    NonFiniteValue,
    NotPositiveDefinite,
    NotSymmetric,
)

#: relative symmetry tolerance: asymmetry up to SYM_TOL * max|A| is absorbed
SYM_TOL = 1e-12
#: Cholesky pivots must exceed PD_TOL * max(diag A); relative so the gate is
#: invariant under rescaling of the covariance
PD_TOL = 1e-12


def as_vector(x, *, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float64 array, optionally of length ``dim``."""
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"{name} contains non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {dim}")
    return v


def as_spd(A, *, name: str = "matrix") -> np.ndarray:
    """Validate shape, finiteness and symmetry of ``A``; return it symmetrized.

    Asymmetry up to ``SYM_TOL`` relative to the largest entry is treated as
    float noise from upstream products and absorbed by averaging with the
    transpose; anything larger raises :class:`NotSymmetric`.  Positive
    definiteness is *not* checked here (see :func:`cholesky`).
    """
    M = np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] < 1:
        raise DimensionMismatch(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(M)):
        raise NonFiniteValue(f"{name} contains non-finite entries")
    scale = np.max(np.abs(M))
    asym = np.max(np.abs(M - M.T))
    if asym > SYM_TOL * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(
            f"{name} is not symmetric: max|A - A^T| = {asym:.3e} "
            f"exceeds {SYM_TOL:.0e} * max|A| = {SYM_TOL * scale:.3e}"
        )
    return (M + M.T) / 2.0


def cholesky(A) -> np.ndarray:
    """Lower-triangular Cholesky factor of a positive definite matrix.

    Parameters
    ----------
    A : array-like, shape (N, N)
        Symmetric positive definite matrix (validated via :func:`as_spd`).

    Returns
    -------
    L : ndarray, shape (N, N)
        Lower triangular with strictly positive diagonal and exact zeros in
        the strict upper triangle, satisfying ``L @ L.T == A`` up to
        reconstruction noise.  Unique for positive definite input.

    Raises
    ------
    NotSymmetric
        If ``A`` exceeds the symmetry tolerance.
    NotPositiveDefinite
        If factorization fails or any pivot is at or below
        ``PD_TOL * max(diag A)``; degenerate covariances are rejected.
    """
    S = as_spd(A)
    max_diag = float(np.max(np.diag(S)))
    if max_diag <= 0.0:
        raise NotPositiveDefinite("matrix has non-positive diagonal")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {exc}") from exc
    pivots = np.diag(L) ** 2
    if np.min(pivots) <= PD_TOL * max_diag:
        raise NotPositiveDefinite(
            f"smallest Cholesky pivot {np.min(pivots):.3e} is at or below "
            f"{PD_TOL:.0e} * max diag = {PD_TOL * max_diag:.3e}"
        )
    return np.tril(L)


def as_cholesky_factor(L, *, name: str = "cholesky factor") -> np.ndarray:
    """Validate a user-supplied lower-triangular factor with positive diagonal."""
    M = np.asarray(L, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteValue(f"{name} contains non-finite entries")
    if np.any(np.triu(M, k=1) != 0.0):
        raise NotSymmetric(f"{name} must be lower triangular (strict upper part zero)")
    if np.any(np.diag(M) <= 0.0):
        raise NotPositiveDefinite(f"{name} must have strictly positive diagonal")
    return M


def sqrtm(A) -> np.ndarray:
    """Unique symmetric positive definite square root of an SPD matrix.

    Uses a symmetric eigendecomposition; at the small horizons this library
    targets, exactness beats iterative schemes.
    """
    S = as_spd(A)
    cholesky(S)  # positive-definiteness gate, same tolerance policy everywhere
    w, V = np.linalg.eigh(S)
    R = (V * np.sqrt(w)) @ V.T
    return (R + R.T) / 2.0


@dataclass(frozen=True, eq=False)
class GaussianSpec:
    """A non-degenerate Gaussian law on R^N.

    Attributes
    ----------
    mean : ndarray, shape (N,)
    cov : ndarray, shape (N, N)
        Symmetric positive definite (validated and symmetrized on
        construction).
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = as_vector(self.mean, name="mean")
        cov = as_spd(self.cov, name="covariance")
        if mean.shape[0] != cov.shape[0]:
            raise DimensionMismatch(
                f"mean has length {mean.shape[0]} but covariance is "
                f"{cov.shape[0]}x{cov.shape[0]}"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @cached_property
    def chol(self) -> np.ndarray:
        """Lower-triangular Cholesky factor of the covariance (cached)."""
        L = cholesky(self.cov)
        L.setflags(write=False)
        return L

    @classmethod
    def from_cholesky(cls, mean, factor) -> "GaussianSpec":
        """Build the law N(mean, L L^T) from a lower-triangular factor ``L``.

        The factor is validated and cached, so no refactorization noise is
        introduced downstream.
        """
        L = as_cholesky_factor(factor)
        spec = cls(mean, L @ L.T)
        L = np.tril(L)
        L.setflags(write=False)
        spec.__dict__["chol"] = L
        return spec


def check_split(t: int, dim: int, *, allow_ends: bool = False) -> int:
    """Validate a past/future split point ``t`` against dimension ``dim``."""
    t = int(t)
    lo, hi = (0, dim) if allow_ends else (1, dim - 1)
    if not lo <= t <= hi:
        raise BadSplit(f"split t={t} outside [{lo}, {hi}] for dimension {dim}")
    return t


def conditional(mu: GaussianSpec, t: int, x_past) -> GaussianSpec:
    """Law of the future coordinates given the first ``t`` coordinates.

    For ``X ~ N(a, L L^T)`` the conditional law of ``X_{t+1:N}`` given
    ``X_{1:t} = x`` is Gaussian with mean
    ``a_fut + L_fp @ inv(L_pp) @ (x - a_past)`` and covariance
    ``L_ff @ L_ff.T`` built from the trailing Cholesky block, which does not
    depend on ``x``.

    Parameters
    ----------
    mu : GaussianSpec
    t : int
        Number of conditioning coordinates, strictly between 0 and N.
    x_past : array-like, shape (t,)

    Returns
    -------
    GaussianSpec of dimension N - t.
    """
    t = check_split(t, mu.dim)
    x = as_vector(x_past, dim=t, name="x_past")
    L = mu.chol
    a = mu.mean
    gain = solve_triangular(L[:t, :t], L[t:, :t].T, lower=True, trans="T").T
    mean = a[t:] + gain @ (x - a[:t])
    return GaussianSpec.from_cholesky(mean, L[t:, t:])


def sample(mu: GaussianSpec, n: int, seed) -> np.ndarray:
    """Draw ``n`` samples ``a + L eps`` with a seeded PCG64 generator.

    Identical ``seed`` gives bitwise-identical output.  Parallel callers
    should use disjoint seeds (or ``numpy.random.SeedSequence`` spawning).

    Returns
    -------
    ndarray, shape (n, N)
    """
    n = int(n)
    if n < 1:
        raise DimensionMismatch(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal((n, mu.dim))
    return mu.mean + eps @ mu.chol.T


def random_spd(dim: int, rng: np.random.Generator, *, jitter: float = 1e-3) -> np.ndarray:
    """Random SPD matrix ``G G^T + jitter * I`` with standard normal ``G``."""
    G = rng.standard_normal((dim, dim))
    return G @ G.T + jitter * np.eye(dim)


def random_gaussian(
    dim: int, rng: np.random.Generator, *, jitter: float = 1e-3, centered: bool = False
) -> GaussianSpec:
    """Random non-degenerate Gaussian law, for property tests and verification."""
    mean = np.zeros(dim) if centered else rng.standard_normal(dim)
    return GaussianSpec(mean, random_spd(dim, rng, jitter=jitter))
