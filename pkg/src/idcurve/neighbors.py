"""Exact k-nearest-neighbor distances over a point cloud.

Distances are true Euclidean (square-rooted), accumulated in float64 via
direct coordinate differences; no dot-product expansion, which loses the
small distances that the estimators' ratios depend on. The blocked search
is bit-identical to a plain O(N^2) pairwise sort, including tie order.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import KTooLargeError, TooFewPointsError
from .tensor_io import PointCloud
from .validation import as_points

# target float64 elements per (block x N x D) distance workspace
_BLOCK_ELEMENTS = 4_000_000


@dataclass
class NeighborTable:
    """Per-point neighbor distances (ascending) and aligned point indices."""

    distances: np.ndarray  # (N, k) float64
    indices: np.ndarray  # (N, k) int64

    @property
    def k(self) -> int:
        return self.distances.shape[1]


def resolve_threads(threads: int | None) -> int:
    """Map a thread request to a worker count (None or 0 means auto)."""
    if threads is None:
        threads = int(os.environ.get("IDCURVE_THREADS", "0") or "0")
    if threads <= 0:
        return os.cpu_count() or 1
    return threads


def _block_rows(n: int, d: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(n * d, 1))


def _search_span(X: np.ndarray, bounds, k: int, dist_out, idx_out) -> None:
    # direct differences, squared and reduced in float64; one reusable
    # workspace per worker (per-block allocation dominated the runtime)
    n, d = X.shape
    step = max(hi - lo for lo, hi in bounds)
    buf = np.empty((step, n, d), dtype=np.float64)
    for lo, hi in bounds:
        diff = np.subtract(X[lo:hi, None, :], X[None, :, :], out=buf[: hi - lo])
        np.multiply(diff, diff, out=diff)
        d2 = diff.sum(axis=-1)
        np.sqrt(d2, out=d2)
        for i in range(lo, hi):
            d2[i - lo, i] = np.inf  # exclude self
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        dist_out[lo:hi] = np.take_along_axis(d2, order, axis=1)
        idx_out[lo:hi] = order


def knn(cloud: PointCloud | np.ndarray, k: int, threads: int | None = None) -> NeighborTable:
    """Exact Euclidean k-NN for every point, ties broken by ascending index.

    Results are independent of the worker count; every block computes its
    distances with identical per-pair arithmetic and writes a disjoint
    output slice. Raises KTooLargeError when k >= N.
    """
    X = as_points(cloud)
    n = X.shape[0]
    if k < 1:
        raise KTooLargeError(f"k must be >= 1, got {k}")
    if k > n - 1:
        raise KTooLargeError(f"k={k} needs at least {k + 1} points, cloud has {n}")
    distances = np.empty((n, k), dtype=np.float64)
    indices = np.empty((n, k), dtype=np.int64)
    step = _block_rows(n, X.shape[1])
    bounds = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
    workers = min(resolve_threads(threads), len(bounds))
    if workers <= 1:
        _search_span(X, bounds, k, distances, indices)
    else:
        spans = [bounds[w::workers] for w in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_search_span, X, span, k, distances, indices)
                for span in spans
                if span
            ]
            for f in futures:
                f.result()
    return NeighborTable(distances=distances, indices=indices)


def _dedup_rows(X: np.ndarray) -> tuple[np.ndarray, int]:
    """Drop exact-duplicate rows, keeping first occurrences in order."""
    normalized = X + 0.0  # fold -0.0 into +0.0 so equal values key equally
    _, first = np.unique(normalized, axis=0, return_index=True)
    if first.size == X.shape[0]:
        return X, 0
    keep = np.sort(first)
    return X[keep], X.shape[0] - keep.size


def dedup(cloud: PointCloud | np.ndarray) -> tuple[PointCloud, int]:
    """Remove exact-duplicate points; returns the cloud and the removed count."""
    X = as_points(cloud)
    kept, removed = _dedup_rows(X)
    if kept.shape[0] < 3:
        raise TooFewPointsError(f"only {kept.shape[0]} distinct points remain after deduplication")
    source = cloud.source if isinstance(cloud, PointCloud) else None
    return PointCloud(kept, source=source), removed
