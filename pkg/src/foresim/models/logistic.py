"""L2-regularised logistic regression with class-weighted cross-entropy.

Minimises sum_i w_i * BCE_i + (lambda/2) ||b||^2 with the intercept left
unpenalised. The Newton path is the workhorse; the L-BFGS tag runs scipy's
optimiser first and polishes with Newton steps until the gradient norm is
below tolerance. Failing to reach tolerance raises, carrying the final
gradient norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from ..errors import ConvergenceError, DataError
from .config import resolve_logistic_solver

GRAD_TOL = 1e-6
MAX_ITER = 10_000


@dataclass(frozen=True)
class LogisticModel:
    coef: np.ndarray
    intercept: float


def _check_inputs(X, y, sample_weight):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DataError(f"bad design shapes X{X.shape} y{y.shape}")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError("labels must be 0/1")
    if not (0.0 < y.mean() < 1.0):
        raise DataError("both classes must be present")
    if sample_weight is None:
        sw = np.ones(len(y))
    else:
        sw = np.asarray(sample_weight, dtype=float)
        if sw.shape != y.shape or (sw <= 0).any():
            raise DataError("sample weights must be positive and match y")
    return X, y, sw


def objective(params: np.ndarray, X: np.ndarray, y: np.ndarray,
              lam: float, sw: np.ndarray) -> tuple[float, np.ndarray]:
    """Weighted BCE + (lam/2)||coef||^2 and its gradient; params = [b, coef]."""
    b, coef = params[0], params[1:]
    z = X @ coef + b
    # log(1 + e^z) - y z, evaluated stably
    loss = float(np.sum(sw * (np.logaddexp(0.0, z) - y * z)))
    loss += 0.5 * lam * float(coef @ coef)
    residual = sw * (expit(z) - y)
    grad = np.concatenate([[residual.sum()], X.T @ residual + lam * coef])
    return loss, grad


def _newton(params, X, y, lam, sw, tol, max_iter):
    n_features = X.shape[1]
    penalty = np.zeros(n_features + 1)
    penalty[1:] = lam
    loss, grad = objective(params, X, y, lam, sw)
    for _ in range(max_iter):
        if np.linalg.norm(grad) < tol:
            return params
        z = X @ params[1:] + params[0]
        mu = expit(z)
        r = sw * mu * (1.0 - mu)
        Xa = np.column_stack([np.ones(len(y)), X])
        H = Xa.T @ (r[:, None] * Xa) + np.diag(penalty)
        # tiny jitter keeps the step defined when mu saturates
        H[np.diag_indices_from(H)] += 1e-12
        step = np.linalg.solve(H, grad)
        scale = 1.0
        for _ in range(60):
            candidate = params - scale * step
            new_loss, new_grad = objective(candidate, X, y, lam, sw)
            if new_loss <= loss:
                params, loss, grad = candidate, new_loss, new_grad
                break
            scale *= 0.5
        else:
            break  # no descent possible; report current gradient norm
    final_norm = float(np.linalg.norm(grad))
    if final_norm >= tol:
        raise ConvergenceError("logistic fit did not converge", final_norm)
    return params


def logistic_fit(X, y, lam: float, weights=None, solver: str = "lbfgs",
                 tol: float = GRAD_TOL, max_iter: int = MAX_ITER) -> LogisticModel:
    """Fit the weighted, L2-penalised logistic model.

    `weights` is a ClassWeights pair or an explicit per-sample vector; None
    means unweighted.
    """
    sample_weight = weights
    if weights is not None and hasattr(weights, "weight_positive"):
        yy = np.asarray(y, dtype=float)
        sample_weight = np.where(yy == 1.0, weights.weight_positive,
                                 weights.weight_negative)
    X, y, sw = _check_inputs(X, y, sample_weight)
    if lam < 0:
        raise DataError(f"lambda must be >= 0, got {lam}")
    method = resolve_logistic_solver(solver)
    params = np.zeros(X.shape[1] + 1)
    if method == "lbfgs":
        result = minimize(objective, params, args=(X, y, lam, sw),
                          method="L-BFGS-B", jac=True,
                          options={"maxiter": max_iter, "gtol": tol / 10.0,
                                   "ftol": 1e-14})
        params = result.x
        if np.linalg.norm(objective(params, X, y, lam, sw)[1]) >= tol:
            params = _newton(params, X, y, lam, sw, tol, max_iter)
    else:
        params = _newton(params, X, y, lam, sw, tol, max_iter)
    return LogisticModel(params[1:].copy(), float(params[0]))


def logistic_predict_proba(model: LogisticModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.coef.shape[0]:
        raise DataError(f"prediction design has shape {X.shape}, "
                        f"expected (*, {model.coef.shape[0]})")
    return expit(X @ model.coef + model.intercept)
