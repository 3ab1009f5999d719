"""Penalised least-squares baselines.

All objectives use the ``0.5 * ||X w - y||^2`` loss, so the Lasso null
threshold is ``lambda_max = ||X^T y||_inf``.
"""

import warnings

import numpy as np

from ..exceptions import ConvergenceWarning, ParameterError
from ..ksupport import _ksup_norm, _prox
from ..validation import check_iterations, check_positive, check_sparsity, operator_norm
from ._base import _Recorder, check_finite

PATH_LENGTH = 100
PATH_EPS = 1e-3
INNER_TOL = 1e-8
INNER_MAX_ITER = 10_000
ENET_L1_RATIOS = (0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0)


def _soft(z, thresh):
    return np.sign(z) * np.maximum(np.abs(z) - thresh, 0.0)


def default_lambda_grid(instance, l1_ratio=1.0, n_lambdas=PATH_LENGTH, eps=PATH_EPS):
    """Geometric grid from the null-solution threshold down by ``eps``."""
    lam_max = float(np.max(np.abs(instance.X.T @ instance.y_delta))) / l1_ratio
    if lam_max == 0.0:
        return np.zeros(1)
    return np.geomspace(lam_max, lam_max * eps, n_lambdas)


def _check_grid(lambda_grid):
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("lambda_grid must be a non-empty 1-D sequence")
    if np.any(grid < 0) or np.any(np.diff(grid) > 0):
        raise ParameterError("lambda_grid must be non-negative and non-increasing")
    return grid


def _enet_path(instance, grid, l1_ratio, tol, max_inner):
    """FISTA with gradient-based restart, warm-started along ``grid``."""
    X, y = instance.X, instance.y_delta
    L = operator_norm(X) ** 2
    step = 1.0 / L if L > 0 else 1.0
    Xty = X.T @ y
    XtX = X.T @ X
    w = np.zeros(instance.d)
    path = []
    for lam in grid:
        l1 = step * lam * l1_ratio
        shrink = 1.0 + step * lam * (1.0 - l1_ratio)
        v, t_mom = w.copy(), 1.0
        for it in range(1, max_inner + 1):
            w_new = _soft(v - step * (XtX @ v - Xty), l1) / shrink
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_mom ** 2))
            if np.dot(v - w_new, w_new - w) > 0:
                # momentum points uphill: restart
                t_next = 1.0
                v = w_new
            else:
                v = w_new + ((t_mom - 1.0) / t_next) * (w_new - w)
            change = np.max(np.abs(w_new - w))
            w, t_mom = w_new, t_next
            check_finite("enet_path", it, w)
            if change <= tol:
                break
        else:
            warnings.warn(f"inner solver hit {max_inner} iterations at lambda={lam:g}",
                          ConvergenceWarning, stacklevel=3)
        path.append((float(lam), w.copy()))
    return path


def lasso_path(instance, lambda_grid=None, tol=INNER_TOL, max_inner=INNER_MAX_ITER):
    """Solutions of ``min 0.5||Xw - y||^2 + lam ||w||_1`` along a grid.

    Returns a list of ``(lam, w)`` in grid order.
    """
    grid = default_lambda_grid(instance) if lambda_grid is None else _check_grid(lambda_grid)
    return _enet_path(instance, grid, 1.0, tol, max_inner)


def elasticnet_path(instance, lambda_grid=None, l1_ratios=(0.8,), tol=INNER_TOL,
                    max_inner=INNER_MAX_ITER):
    """Elastic-net paths for each ratio ``r``.

    Penalty ``lam * (r ||w||_1 + (1 - r)/2 ||w||^2)``. When ``lambda_grid``
    is None each ratio gets its own default grid. Returns a list of
    ``(lam, r, w)``.
    """
    out = []
    for ratio in l1_ratios:
        if not 0.0 < ratio <= 1.0:
            raise ParameterError(f"l1 ratio must lie in (0, 1], got {ratio}")
        grid = (default_lambda_grid(instance, ratio) if lambda_grid is None
                else _check_grid(lambda_grid))
        for lam, w in _enet_path(instance, grid, float(ratio), tol, max_inner):
            out.append((lam, float(ratio), w))
    return out


def ksn_objective(instance, w, k, lam):
    r = instance.X @ w - instance.y_delta
    return 0.5 * float(r @ r) + 0.5 * lam * _ksup_norm(w, k) ** 2


def ksn_penalized(instance, k, lam, L=None, max_iter=1000, record_every=1):
    """Proximal gradient on ``0.5||Xw - y||^2 + (lam/2) ksup(w)^2``.

    Step ``1/L`` with ``L`` defaulting to ``||X||_2^2``; the prox scale is
    ``lam / L``.
    """
    X, y = instance.X, instance.y_delta
    k = check_sparsity(k, instance.d)
    lam = check_positive(lam, "lam", strict=False)
    L = operator_norm(X) ** 2 if L is None else check_positive(L, "L")
    max_iter = check_iterations(max_iter)
    rec = _Recorder("ksn", instance, max_iter, record_every)
    w = np.zeros(instance.d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, max_iter + 1):
            grad = X.T @ (X @ w - y)
            w = _prox(w - grad / L, k, lam / L)
            check_finite("ksn", t, w)
            if rec.due(t):
                rec.record(t, w, objective=ksn_objective(instance, w, k, lam))
    return rec.finish({"k": k, "lam": lam, "L": L, "max_iter": max_iter,
                       "record_every": record_every})
