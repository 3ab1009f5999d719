"""Exactly k-sparse baselines: iterative hard thresholding and OMP."""

import numpy as np

from ..ksupport import _hard_threshold
from ..validation import check_iterations, check_positive, check_sparsity
from ._base import _Recorder, check_finite


def iht(instance, k, eta, max_iter=1000, record_every=1):
    """Iterative hard thresholding (Blumensath and Davies, 2009).

    ``w <- H_k(w - eta * X^T (X w - y))`` starting from ``w = 0``.
    """
    X, y = instance.X, instance.y_delta
    k = check_sparsity(k, instance.d)
    eta = check_positive(eta, "eta")
    max_iter = check_iterations(max_iter)
    rec = _Recorder("iht", instance, max_iter, record_every)
    w = np.zeros(instance.d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, max_iter + 1):
            w = _hard_threshold(w - eta * (X.T @ (X @ w - y)), k)
            check_finite("iht", t, w)
            if rec.due(t):
                rec.record(t, w)
    return rec.finish({"k": k, "eta": eta, "max_iter": max_iter,
                       "record_every": record_every})


def omp(instance, k):
    """Orthogonal matching pursuit (Tropp and Gilbert, 2007).

    Each round adds the column most correlated with the residual (lowest
    index on ties) and refits least squares on the selected columns with a
    pseudo-inverse, so rank-deficient selections are handled silently.
    Columns are compared by correlation normalised by column norm.
    """
    X, y = instance.X, instance.y_delta
    k = check_sparsity(k, min(instance.n, instance.d))
    norms = np.linalg.norm(X, axis=0)
    norms[norms == 0] = np.inf
    selected = []
    coef = np.zeros(0)
    residual = y.copy()
    for _ in range(k):
        scores = np.abs(X.T @ residual) / norms
        scores[selected] = -np.inf
        selected.append(int(np.argmax(scores)))
        XS = X[:, selected]
        coef = np.linalg.pinv(XS) @ y
        residual = y - XS @ coef
    w = np.zeros(instance.d)
    w[selected] = coef
    return w
