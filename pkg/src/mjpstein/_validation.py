"""Input validation helpers shared by the estimators and the functional API."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import DimensionError


def check_square(M, name="matrix"):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    M = check_array(M, ensure_2d=True, dtype=np.float64, ensure_min_samples=1)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return M


def check_symmetric(M, name="matrix", rtol=1e-12):
    M = check_square(M, name)
    scale = max(np.max(np.abs(M)), 1.0)
    if np.max(np.abs(M - M.T)) > rtol * scale:
        raise DimensionError(f"{name} must be symmetric")
    return 0.5 * (M + M.T)


def check_vector(v, d=None, name="vector"):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional")
    if d is not None and v.shape[0] != d:
        raise DimensionError(f"{name} must have length {d}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def check_int_vector(v, d=None, name="vector"):
    a = np.atleast_1d(np.asarray(v))
    if not np.all(np.equal(np.mod(a, 1), 0)):
        raise ValueError(f"{name} must have integer coordinates")
    a = a.astype(np.int64)
    if d is not None and a.shape != (d,):
        raise DimensionError(f"{name} must have length {d}")
    return a
