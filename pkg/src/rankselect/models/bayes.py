"""Bayesian ridge regression fitted by evidence maximisation."""

from __future__ import annotations

import numpy as np

from ..exceptions import FeatureMismatch, TooFewRows


class BayesianRidge:
    """Linear model with Gaussian weight prior and Gamma hyperpriors.

    ``alpha`` is the noise precision and ``lambda`` the weight precision.
    Features are standardised and the target centred before fitting; the
    reported ``coef_`` and ``intercept_`` are in original units.

    The fit alternates the posterior mean of the weights with MacKay's
    fixed-point updates of both precisions::

        gamma  = sum(alpha * s_i / (lambda + alpha * s_i))
        lambda = (gamma + 2 * lambda_1) / (||w||^2 + 2 * lambda_2)
        alpha  = (n - gamma + 2 * alpha_1) / (||y - X w||^2 + 2 * alpha_2)

    where ``s_i`` are the eigenvalues of ``X.T @ X``. Iteration stops when
    no weight moves by more than ``tol`` or after ``max_iter`` rounds.

    Parameters
    ----------
    max_iter : int
    tol : float
    alpha_1, alpha_2, lambda_1, lambda_2 : float
        Shape and rate of the Gamma hyperpriors on ``alpha`` and ``lambda``.
    alpha_init, lambda_init : float
    fit_precisions : bool
        If False the precisions stay at their initial values and the fit is
        a single ridge solve with penalty ``lambda_init / alpha_init``.
    """

    def __init__(self, max_iter=300, tol=1e-3, alpha_1=1e-6, alpha_2=1e-6,
                 lambda_1=1e-6, lambda_2=1e-6, alpha_init=1.0, lambda_init=1.0,
                 fit_precisions=True):
        self.max_iter = max_iter
        self.tol = tol
        self.alpha_1 = alpha_1
        self.alpha_2 = alpha_2
        self.lambda_1 = lambda_1
        self.lambda_2 = lambda_2
        self.alpha_init = alpha_init
        self.lambda_init = lambda_init
        self.fit_precisions = fit_precisions

    def fit(self, X, y, feature_names=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, p = X.shape
        if n < 2:
            raise TooFewRows(f"bayesian ridge needs at least 2 rows, got {n}")

        x_mean = X.mean(axis=0)
        x_scale = X.std(axis=0)
        x_scale[x_scale == 0] = 1.0
        Xs = (X - x_mean) / x_scale
        y_mean = y.mean()
        yc = y - y_mean

        U, S, Vt = np.linalg.svd(Xs, full_matrices=False)
        eig = S ** 2
        Uty = U.T @ yc

        def posterior_mean(alpha, lam):
            return Vt.T @ (S / (eig + lam / alpha) * Uty)

        alpha, lam = float(self.alpha_init), float(self.lambda_init)
        if alpha <= 0 or lam <= 0:
            raise ValueError("initial precisions must be positive")
        n_iter = 0
        if self.fit_precisions:
            w_old = None
            for n_iter in range(1, self.max_iter + 1):
                w = posterior_mean(alpha, lam)
                sse = float(np.sum((yc - Xs @ w) ** 2))
                gamma = float(np.sum(alpha * eig / (lam + alpha * eig)))
                lam = (gamma + 2 * self.lambda_1) / (float(w @ w) + 2 * self.lambda_2)
                alpha = (n - gamma + 2 * self.alpha_1) / (sse + 2 * self.alpha_2)
                if w_old is not None and np.max(np.abs(w - w_old)) < self.tol:
                    break
                w_old = w
        w = posterior_mean(alpha, lam)

        self.coef_standardized_ = w
        self.coef_ = w / x_scale
        self.intercept_ = float(y_mean - x_mean @ self.coef_)
        self.alpha_ = alpha
        self.lambda_ = lam
        self.n_iter_ = n_iter
        self.x_mean_ = x_mean
        self.x_scale_ = x_scale
        self.y_mean_ = float(y_mean)
        self.n_features_in_ = p
        self.feature_names_in_ = tuple(feature_names) if feature_names is not None else None
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise FeatureMismatch(
                f"expected {self.n_features_in_} feature columns, got shape {X.shape}")
        return ((X - self.x_mean_) / self.x_scale_) @ self.coef_standardized_ + self.y_mean_
