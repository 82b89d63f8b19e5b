"""Intrinsic-dimension estimators over point clouds.

Two estimators are provided, both consuming only neighbor-distance ratios
(hence invariant to scaling, rotation, translation, and row order):

* ``TwoNN`` fits the dimension from the empirical distribution of the
  ratio mu = r2/r1 of each point's second- to first-neighbor distance:
  d = -log(1 - F_emp(mu)) / log(mu), estimated as the slope of a
  least-squares line through the origin on (log mu, -log(1 - F_emp)).
* ``LevinaBickelMLE`` pools per-point maximum-likelihood estimates built
  from the k nearest-neighbor distances T_1..T_k.

Exact duplicate rows are removed before estimation (r1 = 0 would make the
ratios undefined); the removed count is surfaced in the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DegenerateGeometryError, StabilityError, TooFewPointsError
from .neighbors import _dedup_rows, knn
from .tensor_io import PointCloud
from .validation import as_points

# below this the empirical CDF fit is meaningless
MIN_ESTIMATION_POINTS = 10


@dataclass
class IDEstimate:
    """One intrinsic-dimension value with its estimator identity and diagnostics."""

    value: float
    estimator: str  # "twonn" or "mle"
    n_used: int
    params: dict = field(default_factory=dict)
    fit_r2: float | None = None
    removed_duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "estimator": self.estimator,
            "n_used": self.n_used,
            "params": dict(self.params),
            "fit_r2": self.fit_r2,
            "removed_duplicates": self.removed_duplicates,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IDEstimate":
        return cls(
            value=float(doc["value"]),
            estimator=str(doc["estimator"]),
            n_used=int(doc["n_used"]),
            params=dict(doc.get("params", {})),
            fit_r2=doc.get("fit_r2"),
            removed_duplicates=int(doc.get("removed_duplicates", 0)),
        )


@dataclass
class StabilityReport:
    """Mean and spread of an estimator over seeded random subsamples."""

    mean: float
    std: float
    n_resamples: int
    subsample_fraction: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "n_resamples": self.n_resamples,
            "subsample_fraction": self.subsample_fraction,
        }


def _prepare(X, minimum: int) -> tuple[np.ndarray, int]:
    arr = as_points(X)
    arr, removed = _dedup_rows(arr)
    if arr.shape[0] < minimum:
        raise TooFewPointsError(
            f"need at least {minimum} distinct points, got {arr.shape[0]}"
        )
    return arr, removed


class TwoNN(BaseEstimator):
    """Intrinsic-dimension estimator from two-nearest-neighbor distance ratios.

    Parameters
    ----------
    discard_fraction : float, default=0.1
        Fraction of the largest mu = r2/r1 ratios dropped before the fit,
        controlling curvature/noise bias in the distribution tail. With 0.0
        only the final CDF point (where 1 - F = 0) is dropped.
    threads : int or None, default=None
        Worker count for the neighbor search; None or 0 auto-detects.
        Results do not depend on this value.

    Attributes
    ----------
    dimension_ : float
        Estimated intrinsic dimension.
    fit_r2_ : float
        Goodness of the through-origin log-linear fit, in [0, 1].
    n_points_used_ : int
        Points surviving deduplication.
    removed_duplicates_ : int
        Exact-duplicate rows dropped before estimation.
    """

    def __init__(self, discard_fraction: float = 0.1, threads: int | None = None):
        self.discard_fraction = discard_fraction
        self.threads = threads

    def fit(self, X, y=None):
        if not 0.0 <= self.discard_fraction < 1.0:
            raise ValueError(f"discard_fraction must be in [0, 1), got {self.discard_fraction}")
        arr, removed = _prepare(X, MIN_ESTIMATION_POINTS)
        n = arr.shape[0]
        table = knn(arr, 2, threads=self.threads)
        r1 = table.distances[:, 0]
        r2 = table.distances[:, 1]
        if not (r1 > 0).all():
            raise DegenerateGeometryError("zero first-neighbor distance survived deduplication")
        mu = np.sort(r2 / r1)
        if not np.isfinite(mu).all():
            raise DegenerateGeometryError("non-finite mu ratio")
        n_keep = n - max(math.ceil(self.discard_fraction * n), 1)
        if n_keep < 2:
            raise TooFewPointsError(f"discard_fraction={self.discard_fraction} leaves {n_keep} points for the fit")
        x = np.log(mu[:n_keep])
        y_cdf = -np.log1p(-np.arange(1, n_keep + 1) / n)
        sum_xx = float(x @ x)
        if sum_xx == 0.0:
            raise DegenerateGeometryError("all mu ratios equal 1; slope undefined")
        slope = float(x @ y_cdf) / sum_xx
        if not (np.isfinite(slope) and slope > 0):
            raise DegenerateGeometryError(f"fit produced non-positive dimension {slope}")
        residual = y_cdf - slope * x
        self.dimension_ = slope
        self.fit_r2_ = 1.0 - float(residual @ residual) / float(y_cdf @ y_cdf)
        self.n_points_used_ = n
        self.removed_duplicates_ = removed
        return self

    def result(self) -> IDEstimate:
        return IDEstimate(
            value=self.dimension_,
            estimator="twonn",
            n_used=self.n_points_used_,
            params={"discard_fraction": self.discard_fraction},
            fit_r2=self.fit_r2_,
            removed_duplicates=self.removed_duplicates_,
        )


class LevinaBickelMLE(BaseEstimator):
    """Maximum-likelihood intrinsic-dimension estimator over k-NN distances.

    Each point contributes m_i = [(1/(k-1)) * sum_{j<k} log(T_k/T_j)]^-1,
    where T_j is the distance to its j-th neighbor; the global estimate
    pools by inverting the mean of the inverses, n / sum_i (1/m_i), which
    bounds the small-k bias of plain averaging.

    Parameters
    ----------
    k : int, default=50
        Neighborhood size; requires at least k + 1 distinct points.
    threads : int or None, default=None
        Worker count for the neighbor search; None or 0 auto-detects.

    Attributes
    ----------
    dimension_ : float
        Pooled intrinsic-dimension estimate.
    pointwise_ : ndarray of shape (n,)
        Per-point estimates m_i.
    n_points_used_ : int
    removed_duplicates_ : int
    """

    def __init__(self, k: int = 50, threads: int | None = None):
        self.k = k
        self.threads = threads

    def fit(self, X, y=None):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        arr, removed = _prepare(X, max(self.k + 1, MIN_ESTIMATION_POINTS))
        n = arr.shape[0]
        table = knn(arr, self.k, threads=self.threads)
        T = table.distances
        if not (T > 0).all():
            raise DegenerateGeometryError("zero distance inside a neighborhood")
        log_ratios = np.log(T[:, -1:] / T[:, :-1])  # (n, k-1)
        inv_m = log_ratios.sum(axis=1) / (self.k - 1)
        # fsum is exactly rounded, so the pooled value is independent of row order
        total = math.fsum(inv_m)
        if total <= 0.0:
            raise DegenerateGeometryError("degenerate neighborhood distances; estimate undefined")
        self.dimension_ = n / total
        with np.errstate(divide="ignore"):
            self.pointwise_ = np.where(inv_m > 0, 1.0 / inv_m, np.inf)
        self.n_points_used_ = n
        self.removed_duplicates_ = removed
        return self

    def result(self) -> IDEstimate:
        return IDEstimate(
            value=self.dimension_,
            estimator="mle",
            n_used=self.n_points_used_,
            params={"k": self.k, "pooling": "inverse-mean-of-inverses"},
            removed_duplicates=self.removed_duplicates_,
        )


def twonn(cloud: PointCloud | np.ndarray, discard_fraction: float = 0.1, threads: int | None = None) -> IDEstimate:
    """Estimate intrinsic dimension with the two-nearest-neighbor method."""
    return TwoNN(discard_fraction=discard_fraction, threads=threads).fit(cloud).result()


def mle(cloud: PointCloud | np.ndarray, k: int = 50, threads: int | None = None) -> IDEstimate:
    """Estimate intrinsic dimension with the Levina-Bickel MLE at neighborhood k."""
    return LevinaBickelMLE(k=k, threads=threads).fit(cloud).result()


_ESTIMATORS = {"twonn": twonn, "mle": mle}


def estimate(cloud, estimator: str = "twonn", **params) -> IDEstimate:
    """Dispatch to an estimator by name ("twonn" or "mle")."""
    try:
        fn = _ESTIMATORS[estimator]
    except KeyError:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {sorted(_ESTIMATORS)}") from None
    return fn(cloud, **params)


def stability(
    cloud: PointCloud | np.ndarray,
    estimator: str = "twonn",
    n_resamples: int = 10,
    subsample_fraction: float = 0.5,
    seed: int = 0,
    **params,
) -> StabilityReport:
    """Run an estimator on seeded uniform subsamples and report mean/std.

    Each resample draws ``floor(subsample_fraction * n)`` rows without
    replacement. Individual resample failures are tolerated up to half of
    ``n_resamples``; beyond that a StabilityError is raised. Deterministic
    for a fixed seed.
    """
    arr = as_points(cloud)
    if not 0.0 < subsample_fraction <= 1.0:
        raise ValueError(f"subsample_fraction must be in (0, 1], got {subsample_fraction}")
    if n_resamples < 2:
        raise ValueError(f"n_resamples must be >= 2, got {n_resamples}")
    n = arr.shape[0]
    size = int(subsample_fraction * n)
    rng = np.random.default_rng(seed)
    values = []
    failures = []
    for _ in range(n_resamples):
        idx = rng.choice(n, size=size, replace=False)
        try:
            values.append(estimate(arr[idx], estimator, **params).value)
        except (TooFewPointsError, DegenerateGeometryError) as exc:
            failures.append(exc)
    if len(failures) > n_resamples // 2 or len(values) < 2:
        raise StabilityError(
            f"{len(failures)}/{n_resamples} resamples failed (last: {failures[-1] if failures else None})"
        )
    arr_vals = np.asarray(values)
    return StabilityReport(
        mean=float(arr_vals.mean()),
        std=float(arr_vals.std(ddof=1)),
        n_resamples=len(values),
        subsample_fraction=subsample_fraction,
    )
