"""l1-flavoured iterative regularisation baselines.

SRDI: linearized Bregman iteration of Osher et al. (2016)::

    z_{t} = z_{t-1} + (alpha / n) X^T (y - X w_{t-1})
    w_{t} = kappa * shrink(z_t, 1)

IROSR: Hadamard reparameterisation of Vaskevicius et al. (2019), with
``w = u*u - v*v``, ``u_0 = v_0 = alpha_init`` and
``g = (1/n) X^T (X w - y)``::

    u <- u * (1 - 4 eta g),  v <- v * (1 + 4 eta g)

IRCR: primal-dual iteration of Molinari et al. (2021) for
``min ||w||_1 s.t. X w = y`` with a reflected dual variable::

    w_{t} = shrink(w_{t-1} - tau X^T (2 u_{t-1} - u_{t-2}), tau)
    u_{t} = u_{t-1} + sigma (X w_t - y)

with ``tau = sigma = 0.9 / sqrt(2 ||X||^2)``.
"""

import numpy as np

from ..validation import check_iterations, check_positive, operator_norm
from ._base import _Recorder, check_finite


def _shrink(z, thresh):
    return np.sign(z) * np.maximum(np.abs(z) - thresh, 0.0)


def srdi(instance, kappa, alpha_srdi, max_iter=1000, record_every=1):
    X, y = instance.X, instance.y_delta
    kappa = check_positive(kappa, "kappa")
    alpha_srdi = check_positive(alpha_srdi, "alpha_srdi")
    max_iter = check_iterations(max_iter)
    rec = _Recorder("srdi", instance, max_iter, record_every)
    scale = alpha_srdi / instance.n
    z = np.zeros(instance.d)
    w = np.zeros(instance.d)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, max_iter + 1):
            z += scale * (X.T @ (y - X @ w))
            w = kappa * _shrink(z, 1.0)
            check_finite("srdi", t, w)
            if rec.due(t):
                rec.record(t, w)
    return rec.finish({"kappa": kappa, "alpha": alpha_srdi, "max_iter": max_iter,
                       "record_every": record_every})


def irosr(instance, eta, alpha_init, max_iter=1000, record_every=1):
    X, y = instance.X, instance.y_delta
    eta = check_positive(eta, "eta")
    alpha_init = check_positive(alpha_init, "alpha_init", strict=False)
    max_iter = check_iterations(max_iter)
    rec = _Recorder("irosr", instance, max_iter, record_every)
    u = np.full(instance.d, alpha_init)
    v = np.full(instance.d, alpha_init)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, max_iter + 1):
            g = (X.T @ (X @ (u * u - v * v) - y)) / instance.n
            u = u * (1.0 - 4.0 * eta * g)
            v = v * (1.0 + 4.0 * eta * g)
            w = u * u - v * v
            check_finite("irosr", t, w)
            if rec.due(t):
                rec.record(t, w)
    return rec.finish({"eta": eta, "alpha": alpha_init, "max_iter": max_iter,
                       "record_every": record_every})


def ircr_step_sizes(X, norm="spectral"):
    step = 0.9 / np.sqrt(2.0 * operator_norm(X, norm) ** 2)
    return step, step


def ircr(instance, max_iter=1000, record_every=1, norm="spectral"):
    X, y = instance.X, instance.y_delta
    max_iter = check_iterations(max_iter)
    tau, sigma = ircr_step_sizes(X, norm)
    rec = _Recorder("ircr", instance, max_iter, record_every)
    w = np.zeros(instance.d)
    u = np.zeros(instance.n)
    u_prev = np.zeros(instance.n)
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(1, max_iter + 1):
            w = _shrink(w - tau * (X.T @ (2.0 * u - u_prev)), tau)
            u_prev, u = u, u + sigma * (X @ w - y)
            check_finite("ircr", t, w, u)
            if rec.due(t):
                rec.record(t, w)
    return rec.finish({"tau": tau, "sigma": sigma, "max_iter": max_iter,
                       "record_every": record_every, "norm": norm})
