"""Input validation helpers shared by the estimators and IO layers."""
from __future__ import annotations

import numpy as np

from .errors import InvalidCloudError

MIN_CLOUD_POINTS = 3


def check_matrix(X, *, min_points: int = MIN_CLOUD_POINTS, dtype=None) -> np.ndarray:
    """Validate a 2-D point matrix and return it as an ndarray.

    Raises InvalidCloudError unless X is a 2-D real matrix with at least
    ``min_points`` rows, at least one column, and only finite entries.
    """
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim != 2:
        raise InvalidCloudError(f"expected a 2-D matrix, got ndim={arr.ndim}")
    if not np.issubdtype(arr.dtype, np.floating):
        if np.issubdtype(arr.dtype, np.integer):
            arr = arr.astype(np.float64)
        else:
            raise InvalidCloudError(f"expected a real matrix, got dtype={arr.dtype}")
    n, d = arr.shape
    if n < min_points:
        raise InvalidCloudError(f"need at least {min_points} points, got {n}")
    if d < 1:
        raise InvalidCloudError("points must have at least one coordinate")
    if not np.isfinite(arr).all():
        raise InvalidCloudError("matrix contains NaN or Inf entries")
    return arr


def as_points(X, *, min_points: int = MIN_CLOUD_POINTS) -> np.ndarray:
    """Coerce a PointCloud or array-like into a validated float64 matrix."""
    data = getattr(X, "data", X)
    return check_matrix(data, min_points=min_points, dtype=np.float64)
