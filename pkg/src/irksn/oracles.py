"""Independent numerical oracles for the k-support machinery.

These deliberately avoid the breakpoint search and the sorted closed form so
they can check them: the prox optimum comes from a generic constrained solver
on the variational form, the norm from a generic solver on its dual-norm
characterisation.
"""

from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .ksupport import _prox, ksup_norm, topk_norm
from .validation import check_sparsity, check_vector

__all__ = [
    "prox_objective",
    "prox_oracle_value",
    "fenchel_young_residual",
    "ksup_norm_dual_oracle",
    "run_prox_battery",
]


def prox_objective(x, w, k, lam):
    """Value of ``(lam/2) ksup(x)^2 + 0.5 ||x - w||^2``."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    return 0.5 * lam * ksup_norm(x, k) ** 2 + 0.5 * float(np.sum((x - w) ** 2))


def prox_oracle_value(w, k, lam):
    """Optimal prox objective computed from the variational form.

    With ``ksup(x)^2 = min_theta sum x_i^2 / theta_i`` over
    ``{0 <= theta <= 1, sum(theta) <= k}``, minimising over ``x`` first
    leaves ``min_theta 0.5 * lam * sum w_i^2 / (theta_i + lam)``, a smooth
    convex program solved here with SLSQP.
    """
    w = check_vector(w)
    k = check_sparsity(k, w.size)
    if lam == 0.0:
        return 0.0
    d = w.size
    w2 = w * w

    def fun(t):
        return 0.5 * lam * np.sum(w2 / (t + lam))

    def jac(t):
        return -0.5 * lam * w2 / (t + lam) ** 2

    t0 = np.full(d, k / d)
    scale = fun(t0)
    res = minimize(
        lambda t: fun(t) / scale, t0, jac=lambda t: jac(t) / scale, method="SLSQP",
        bounds=[(0.0, 1.0)] * d,
        constraints=[{"type": "ineq", "fun": lambda t: k - t.sum(),
                      "jac": lambda t: -np.ones(d)}],
        options={"ftol": 1e-16, "maxiter": 2000},
    )
    # SLSQP may overshoot the capacity constraint slightly; evaluate at a
    # feasible repair so the value is a genuine upper bound on the optimum
    theta = np.clip(res.x, 0.0, 1.0)
    if theta.sum() > k:
        theta *= k / theta.sum()
    return float(fun(theta))


def fenchel_young_residual(x, w, k, lam):
    """Residual of the Moreau decomposition at a candidate prox output.

    ``x = prox(w)`` holds iff ``u = (w - x) / lam`` satisfies
    ``f(x) + f*(u) = <x, u>`` with ``f`` the half-squared k-support norm and
    ``f*`` the half-squared top-k norm.
    """
    x = np.asarray(x, dtype=float)
    u = (np.asarray(w, dtype=float) - x) / lam
    gap = 0.5 * ksup_norm(x, k) ** 2 + 0.5 * topk_norm(u, k) ** 2 - float(x @ u)
    return abs(gap)


def ksup_norm_dual_oracle(w, k):
    """``max <u, w>`` over the unit ball of the top-k norm.

    The ball is written as ``||u_I|| <= 1`` for every k-subset ``I``, so this
    is only practical for small dimensions.
    """
    w = check_vector(w)
    k = check_sparsity(k, w.size)
    d = w.size
    if not np.any(w):
        return 0.0
    subsets = [list(c) for c in combinations(range(d), k)]
    cons = []
    for idx in subsets:
        cons.append({
            "type": "ineq",
            "fun": lambda u, idx=idx: 1.0 - np.dot(u[idx], u[idx]),
            "jac": lambda u, idx=idx: _masked(-2.0 * u, idx),
        })
    start = w / (np.linalg.norm(w) * np.sqrt(d))
    res = minimize(lambda u: -u @ w, start, jac=lambda u: -w, method="SLSQP",
                   constraints=cons, options={"ftol": 1e-15, "maxiter": 2000})
    return float(-res.fun)


def _masked(v, idx):
    out = np.zeros_like(v)
    out[idx] = v[idx]
    return out


def run_prox_battery(trials=200, dim_max=12, seed=0, tol=1e-8):
    """Randomised prox checks; returns a summary dict.

    Each trial draws ``(w, k, lam)`` and checks objective optimality against
    :func:`prox_oracle_value`, the Moreau decomposition residual, the
    theta sum and non-expansiveness against a perturbed input.
    """
    rng = np.random.default_rng(seed)
    failures = []
    worst = {"objective_gap": 0.0, "moreau_residual": 0.0,
             "theta_sum_error": 0.0, "expansion": 0.0}
    for trial in range(trials):
        d = int(rng.integers(1, dim_max + 1))
        k = int(rng.integers(1, d + 1))
        lam = float(10.0 ** rng.uniform(-2, 1))
        w = rng.normal(size=d) * 10.0 ** rng.uniform(-1, 1)
        w2 = w + rng.normal(size=d) * 10.0 ** rng.uniform(-2, 0)

        x, profile = _prox(w, k, lam, with_profile=True)
        x2 = _prox(w2, k, lam)
        checks = {
            "objective_gap": abs(prox_objective(x, w, k, lam)
                                 - prox_oracle_value(w, k, lam)),
            "moreau_residual": fenchel_young_residual(x, w, k, lam),
            "theta_sum_error": abs(profile.theta.sum() - k),
            "expansion": max(0.0, np.linalg.norm(x - x2) - np.linalg.norm(w - w2)),
        }
        limits = {"objective_gap": tol, "moreau_residual": tol,
                  "theta_sum_error": 1e-9, "expansion": 1e-9}
        for name, value in checks.items():
            worst[name] = max(worst[name], value)
            if value > limits[name]:
                failures.append((trial, name, value))
    return {"trials": trials, "checks": 4 * trials, "failures": failures,
            "worst": worst, "passed": not failures}
