"""Interpolation curves between Gaussian laws under the three transport geometries.

All three curves share the displacement form: means interpolate linearly and
``cov_t = T_t A0 T_t^T`` with ``T_t = (1 - t) I + t T``, where ``T`` is the
linear part of the matching transport map (unconstrained, synchronous, or
adapted).  Intermediate covariances may degenerate when the adapted map
reflects a coordinate; such points are representable (flagged, PSD) but are
excluded from distance checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import couplings
from .distances import DistanceReport, aw2, kr2, wasserstein2
from .errors import BadParameter, DimensionMismatch
from .linalg import PD_TOL, GaussianSpec

WASSERSTEIN = "wasserstein"
KNOTHE_ROSENBLATT = "knothe_rosenblatt"
ADAPTED = "adapted"
GEODESIC_KINDS = (WASSERSTEIN, KNOTHE_ROSENBLATT, ADAPTED)


@dataclass(frozen=True, eq=False)
class GeodesicPoint:
    """State of an interpolation curve at parameter ``t``.

    ``cov`` is symmetric positive semidefinite; ``degenerate`` is true iff its
    smallest eigenvalue is at or below ``PD_TOL`` times the largest diagonal
    entry.  ``min_eigenvalue`` gives the severity of the degeneracy.
    """

    t: float
    mean: np.ndarray
    cov: np.ndarray
    degenerate: bool
    min_eigenvalue: float


def transport_for_kind(mu0: GaussianSpec, mu1: GaussianSpec, kind: str):
    """Transport map whose linear part drives the interpolation of ``kind``."""
    if kind == WASSERSTEIN:
        return couplings.brenier_map(mu0, mu1)
    if kind == KNOTHE_ROSENBLATT:
        return couplings.kr_map(mu0, mu1)
    if kind == ADAPTED:
        # canonical +1 tie-break on free indices; curve not unique there
        return couplings.aw_map(mu0, mu1).map
    raise BadParameter(f"unknown geodesic kind {kind!r}; expected one of {GEODESIC_KINDS}")


def geodesic_point(
    mu0: GaussianSpec, mu1: GaussianSpec, t: float, kind: str
) -> GeodesicPoint:
    """Point of the ``kind`` interpolation curve at parameter ``t`` in [0, 1]."""
    if mu0.dim != mu1.dim:
        raise DimensionMismatch(f"laws have dimensions {mu0.dim} and {mu1.dim}")
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise BadParameter(f"interpolation parameter t={t!r} outside [0, 1]")
    T = transport_for_kind(mu0, mu1, kind).matrix
    Tt = (1.0 - t) * np.eye(mu0.dim) + t * T
    cov = Tt @ mu0.cov @ Tt.T
    cov = (cov + cov.T) / 2.0
    mean = (1.0 - t) * mu0.mean + t * mu1.mean
    min_eig = float(np.linalg.eigvalsh(cov)[0])
    threshold = PD_TOL * max(float(np.max(np.diag(cov))), np.finfo(float).tiny)
    return GeodesicPoint(
        t=t, mean=mean, cov=cov, degenerate=min_eig <= threshold, min_eigenvalue=min_eig
    )


OK = "ok"
SKIPPED = "skipped"


@dataclass(frozen=True, eq=False)
class GeodesicCheckReport:
    """Constant-speed check ``dist(p_s, p_t) == |s - t| * dist(p_0, p_1)``.

    ``status`` is ``"skipped"`` when an intermediate point is degenerate (the
    closed-form distances require non-degenerate laws); otherwise the two
    sides and their absolute difference are reported.
    """

    status: str
    kind: str
    s: float
    t: float
    point_distance: float | None
    scaled_endpoint_distance: float | None
    abs_difference: float | None


def _distance_for_kind(kind: str, mu: GaussianSpec, nu: GaussianSpec) -> DistanceReport:
    if kind == WASSERSTEIN:
        return wasserstein2(mu, nu)
    if kind == KNOTHE_ROSENBLATT:
        return kr2(mu, nu)
    if kind == ADAPTED:
        return aw2(mu, nu)
    raise BadParameter(f"unknown geodesic kind {kind!r}; expected one of {GEODESIC_KINDS}")


def geodesic_check(
    mu0: GaussianSpec, mu1: GaussianSpec, kind: str, s: float, t: float
) -> GeodesicCheckReport:
    """Compare the distance between two curve points with the scaled endpoint
    distance under the metric matching ``kind``."""
    ps = geodesic_point(mu0, mu1, s, kind)
    pt = geodesic_point(mu0, mu1, t, kind)
    if ps.degenerate or pt.degenerate:
        return GeodesicCheckReport(
            status=SKIPPED,
            kind=kind,
            s=ps.t,
            t=pt.t,
            point_distance=None,
            scaled_endpoint_distance=None,
            abs_difference=None,
        )
    lhs = _distance_for_kind(kind, GaussianSpec(ps.mean, ps.cov), GaussianSpec(pt.mean, pt.cov)).value
    rhs = abs(ps.t - pt.t) * _distance_for_kind(kind, mu0, mu1).value
    return GeodesicCheckReport(
        status=OK,
        kind=kind,
        s=ps.t,
        t=pt.t,
        point_distance=lhs,
        scaled_endpoint_distance=rhs,
        abs_difference=abs(lhs - rhs),
    )
