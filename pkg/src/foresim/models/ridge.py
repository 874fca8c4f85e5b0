"""Ridge regression with an unpenalised intercept.

Solves min ||y - Xb - c||^2 + lambda ||b||^2 on centred data, so shrinkage
never pulls the intercept. Two real solvers: a direct path (SVD or Cholesky
on the normal equations) and a conjugate-gradient path for the remaining
solver tags.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import cg as sparse_cg

from ..errors import DataError, NumericalError
from .config import resolve_ridge_solver


@dataclass(frozen=True)
class RidgeModel:
    coef: np.ndarray
    intercept: float


def _check_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DataError(f"bad design shapes X{X.shape} y{y.shape}")
    if X.shape[0] == 0:
        raise DataError("empty design matrix")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise DataError("design matrix or targets contain non-finite values")
    return X, y


def ridge_fit(X, y, lam: float, solver: str = "svd") -> RidgeModel:
    """Fit ridge coefficients; lam=0 falls back to plain least squares and
    errors on a rank-deficient design (lam>0 is always solvable)."""
    X, y = _check_xy(X, y)
    if lam < 0:
        raise DataError(f"lambda must be >= 0, got {lam}")
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    yc = y - y_mean
    method = resolve_ridge_solver(solver)

    if lam == 0.0:
        coef, _, rank, _ = np.linalg.lstsq(Xc, yc, rcond=None)
        if rank < X.shape[1]:
            raise NumericalError(
                "rank-deficient design with lambda=0; increase lambda"
            )
    elif method == "svd":
        u, s, vt = np.linalg.svd(Xc, full_matrices=False)
        shrink = s / (s**2 + lam)
        coef = vt.T @ (shrink * (u.T @ yc))
    elif method == "cholesky":
        A = Xc.T @ Xc + lam * np.eye(X.shape[1])
        coef = np.linalg.solve(A, Xc.T @ yc)
    else:  # conjugate gradient on the regularised normal equations
        A = Xc.T @ Xc + lam * np.eye(X.shape[1])
        b = Xc.T @ yc
        coef, info = sparse_cg(A, b, rtol=1e-12, atol=0.0, maxiter=10_000)
        if info != 0:
            raise NumericalError(f"conjugate gradient did not converge (info={info})")
    intercept = y_mean - float(x_mean @ coef)
    return RidgeModel(np.asarray(coef, dtype=float), intercept)


def ridge_predict(model: RidgeModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.coef.shape[0]:
        raise DataError(f"prediction design has shape {X.shape}, "
                        f"expected (*, {model.coef.shape[0]})")
    return X @ model.coef + model.intercept
