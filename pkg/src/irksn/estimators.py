"""scikit-learn style wrappers around the solvers.

Every iterative estimator keeps its recorded path: ``coef_path_[i]`` is the
estimate after ``iterations_[i]`` updates and ``coef_`` is the last one.
:meth:`select_iteration` switches ``coef_`` to the iterate with the lowest
held-out squared error, which is the practical early-stopping rule when no
ground truth is available. No intercept is fitted.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .solvers import (
    IrksnConfig,
    ProblemInstance,
    iht,
    ircr,
    irksn,
    irosr,
    ksn_penalized,
    omp,
    srdi,
)

__all__ = [
    "IRKSNRegressor",
    "IHTRegressor",
    "OMPRegressor",
    "KSNRegressor",
    "SRDIRegressor",
    "IROSRRegressor",
    "IRCRRegressor",
]


class _PathRegressor(RegressorMixin, BaseEstimator):
    """Shared fit/predict logic; subclasses implement ``_solve``."""

    def _solve(self, instance):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        run = self._solve(ProblemInstance(X, y, 0.0))
        self.iterations_ = np.asarray(run.iterations)
        self.coef_path_ = np.asarray(run.coefs)
        self.residual_norms_ = np.asarray(run.residual_norms)
        self.coef_ = self.coef_path_[-1].copy()
        self.n_iter_ = int(self.iterations_[-1])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_

    def select_iteration(self, X_val, y_val):
        """Keep the recorded iterate with the smallest validation MSE.

        Returns the chosen iteration count; ties go to the earliest one.
        """
        check_is_fitted(self, "coef_path_")
        X_val, y_val = check_X_y(X_val, y_val, dtype=float, y_numeric=True)
        mse = np.mean((self.coef_path_ @ X_val.T - y_val) ** 2, axis=1)
        i = int(np.argmin(mse))
        self.coef_ = self.coef_path_[i].copy()
        self.n_iter_ = int(self.iterations_[i])
        return self.n_iter_


class IRKSNRegressor(_PathRegressor):
    """Iterative regularization with the k-support norm.

    Parameters
    ----------
    k : int
        Sparsity level of the regularizer.
    alpha : float in (0, 1)
        Weight of the ridge part; smaller values give sparser iterates.
    gamma : float, optional
        Dual step size, ``alpha / ||X||_2^2`` by default.
    max_iter, record_every : int
    """

    def __init__(self, k=10, alpha=1e-3, gamma=None, max_iter=2000, record_every=1):
        self.k = k
        self.alpha = alpha
        self.gamma = gamma
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return irksn(instance, IrksnConfig(k=self.k, alpha=self.alpha, gamma=self.gamma,
                                           max_iter=self.max_iter,
                                           record_every=self.record_every))


class IHTRegressor(_PathRegressor):
    def __init__(self, k=10, eta=1e-3, max_iter=1000, record_every=1):
        self.k = k
        self.eta = eta
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return iht(instance, self.k, self.eta, self.max_iter, self.record_every)


class KSNRegressor(_PathRegressor):
    """Least squares penalised by ``(lam / 2) ksup(w)^2``, proximal gradient."""

    def __init__(self, k=10, lam=1.0, L=None, max_iter=1000, record_every=1):
        self.k = k
        self.lam = lam
        self.L = L
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return ksn_penalized(instance, self.k, self.lam, self.L, self.max_iter,
                             self.record_every)


class SRDIRegressor(_PathRegressor):
    def __init__(self, kappa=1.0, alpha=1e-3, max_iter=1000, record_every=1):
        self.kappa = kappa
        self.alpha = alpha
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return srdi(instance, self.kappa, self.alpha, self.max_iter, self.record_every)


class IROSRRegressor(_PathRegressor):
    def __init__(self, eta=1e-3, alpha=1e-3, max_iter=1000, record_every=1):
        self.eta = eta
        self.alpha = alpha
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return irosr(instance, self.eta, self.alpha, self.max_iter, self.record_every)


class IRCRRegressor(_PathRegressor):
    def __init__(self, max_iter=1000, record_every=1):
        self.max_iter = max_iter
        self.record_every = record_every

    def _solve(self, instance):
        return ircr(instance, self.max_iter, self.record_every)


class OMPRegressor(RegressorMixin, BaseEstimator):
    def __init__(self, k=10):
        self.k = k

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        self.coef_ = omp(ProblemInstance(X, y, 0.0), self.k)
        self.n_iter_ = int(self.k)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return X @ self.coef_
