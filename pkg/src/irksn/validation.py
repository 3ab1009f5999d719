"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import ParameterError


def check_vector(w, name="w"):
    """Return ``w`` as a 1-D float array with finite entries."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1:
        raise ParameterError(f"{name} must be 1-D, got shape {w.shape}")
    if w.size == 0:
        raise ParameterError(f"{name} must be non-empty")
    if not np.all(np.isfinite(w)):
        raise ParameterError(f"{name} contains non-finite values")
    return w


def check_design(X, y=None):
    """Validate a design matrix and an optional target of matching length.

    Returns
    -------
    X : ndarray of shape (n, d)
    y : ndarray of shape (n,) or None
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ParameterError(f"X must be a non-empty 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ParameterError("X contains non-finite values")
    if y is None:
        return X, None
    y = check_vector(y, "y")
    if y.shape[0] != X.shape[0]:
        raise ParameterError(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    return X, y


def check_sparsity(k, d):
    """Check ``1 <= k <= d`` and return ``k`` as int."""
    if isinstance(k, bool) or not isinstance(k, numbers.Integral):
        raise ParameterError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= d:
        raise ParameterError(f"k must satisfy 1 <= k <= {d}, got {k}")
    return int(k)


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ParameterError(f"{name} must be a finite real, got {value!r}")
    if value < 0 or (strict and value == 0):
        bound = "> 0" if strict else ">= 0"
        raise ParameterError(f"{name} must be {bound}, got {value}")
    return float(value)


def check_open_unit(value, name="alpha"):
    if not isinstance(value, numbers.Real) or not 0.0 < value < 1.0:
        raise ParameterError(f"{name} must lie in (0, 1), got {value!r}")
    return float(value)


def check_iterations(T, minimum=1, name="max_iter"):
    if isinstance(T, bool) or not isinstance(T, numbers.Integral) or T < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {T!r}")
    return int(T)


def operator_norm(X, norm="spectral"):
    """Norm of ``X`` used for step sizes and theory constants.

    ``"spectral"`` is the largest singular value, ``"nuclear"`` the sum of
    singular values.
    """
    if norm == "spectral":
        return float(np.linalg.norm(X, 2))
    if norm == "nuclear":
        return float(np.linalg.norm(X, "nuc"))
    raise ParameterError(f"norm must be 'spectral' or 'nuclear', got {norm!r}")
