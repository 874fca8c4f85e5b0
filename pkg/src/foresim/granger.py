"""Granger-causality feature selection over lags 1..14.

Per-lag mode regresses the target on its own lags plus a single lagged
feature value and reads the t-test p-value of that coefficient; joint mode
runs the nested-model F-test over all feature lags at once. Both control
for the target's own history, which is what makes the test Granger rather
than plain correlation.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .errors import DataError

logger = logging.getLogger(__name__)

MAX_LAG_DEFAULT = 14
OWN_LAGS_DEFAULT = 14


def _lag_matrix(y: np.ndarray, lags: int, start: int) -> np.ndarray:
    return np.column_stack([y[start - j:len(y) - j] for j in range(1, lags + 1)])


def _check_pair(target, feature, needed: int, name: str) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(target, dtype=float)
    x = np.asarray(feature, dtype=float)
    if y.shape != x.shape or y.ndim != 1:
        raise DataError(f"{name}: target and feature must be equal-length vectors")
    if np.isnan(y).any() or np.isnan(x).any():
        raise DataError(f"{name}: missing values not allowed")
    if len(y) <= needed:
        raise DataError(f"{name}: series too short ({len(y)} <= {needed})")
    return y, x


def _ols(X: np.ndarray, y: np.ndarray, name: str) -> tuple[np.ndarray, float]:
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DataError(f"{name}: rank-deficient design matrix")
    resid = y - X @ beta
    return beta, float(resid @ resid)


def granger_per_lag(target, feature, lag: int,
                    own_lags: int = OWN_LAGS_DEFAULT) -> float:
    """p-value for one lagged feature value given the target's own history.

    OLS of y_t on intercept, y_{t-1..t-own_lags} and x_{t-lag}; returns the
    two-sided t-test p-value of the x coefficient.
    """
    if lag < 1:
        raise DataError("granger_per_lag: lag must be >= 1")
    start = max(own_lags, lag)
    y, x = _check_pair(target, feature, start + 10, "granger_per_lag")
    n = len(y) - start
    X = np.column_stack([
        np.ones(n),
        _lag_matrix(y, own_lags, start),
        x[start - lag:len(x) - lag],
    ])
    yy = y[start:]
    beta, ssr = _ols(X, yy, "granger_per_lag")
    df = n - X.shape[1]
    if df <= 0:
        raise DataError("granger_per_lag: not enough rows for the design")
    sigma2 = ssr / df
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(sigma2 * xtx_inv[-1, -1])
    if se == 0.0:
        return 0.0
    t_stat = beta[-1] / se
    return float(2.0 * stats.t.sf(abs(t_stat), df))


def granger_joint(target, feature, max_lag: int = MAX_LAG_DEFAULT,
                  own_lags: int = OWN_LAGS_DEFAULT) -> float:
    """Nested-model F-test p-value for all feature lags 1..max_lag jointly."""
    if max_lag < 1:
        raise DataError("granger_joint: max_lag must be >= 1")
    start = max(own_lags, max_lag)
    y, x = _check_pair(target, feature, start + 10, "granger_joint")
    n = len(y) - start
    yy = y[start:]
    X0 = np.column_stack([np.ones(n), _lag_matrix(y, own_lags, start)])
    X1 = np.column_stack([X0, _lag_matrix(x, max_lag, start)])
    _, ssr0 = _ols(X0, yy, "granger_joint (restricted)")
    _, ssr1 = _ols(X1, yy, "granger_joint (unrestricted)")
    df_den = n - X1.shape[1]
    if df_den <= 0:
        raise DataError("granger_joint: not enough rows for the design")
    if ssr1 <= 0.0:
        return 0.0
    f_stat = ((ssr0 - ssr1) / max_lag) / (ssr1 / df_den)
    return float(stats.f.sf(max(f_stat, 0.0), max_lag, df_den))


@dataclass(frozen=True)
class LagSelection:
    """Result of Granger feature selection.

    `selected` holds (column, lag) pairs in per-lag mode and (column, None)
    in joint mode, ordered by column name then lag. `p_values` keeps every
    tested unit so the selection CSV can report non-selected units too.
    """

    mode: str
    max_lag: int
    alpha: float
    selected: tuple[tuple[str, int | None], ...]
    p_values: dict[tuple[str, int | None], float] = field(default_factory=dict)


def select_features(columns: dict[str, np.ndarray], target: np.ndarray,
                    mode: str = "per_lag", max_lag: int = MAX_LAG_DEFAULT,
                    own_lags: int = OWN_LAGS_DEFAULT,
                    alpha: float = 0.05) -> LagSelection:
    """Run the mode-appropriate Granger test for every feature column.

    All vectors must be aligned and free of missing values (the fold runner
    slices the common defined range before calling). An empty result is not
    an error; training then falls back to the target's own lags.
    """
    if mode not in ("per_lag", "joint"):
        raise DataError(f"unknown Granger mode '{mode}'")
    p_values: dict[tuple[str, int | None], float] = {}
    skipped = 0

    def run_unit(key, test, *args):
        nonlocal skipped
        try:
            p_values[key] = test(*args)
        except DataError:
            # e.g. a feature lag exactly collinear with the own-lag controls
            # (duplicated indicator columns do this); untestable units are
            # recorded as NaN and never selected
            p_values[key] = float("nan")
            skipped += 1

    for column in sorted(columns):
        if mode == "per_lag":
            for lag in range(1, max_lag + 1):
                run_unit((column, lag), granger_per_lag,
                         target, columns[column], lag, own_lags)
        else:
            run_unit((column, None), granger_joint,
                     target, columns[column], max_lag, own_lags)
    if skipped:
        logger.info("%d of %d Granger units untestable (skipped)",
                    skipped, len(p_values))
    selected = tuple(
        key for key in sorted(p_values, key=lambda k: (k[0], k[1] or 0))
        if p_values[key] <= alpha
    )
    return LagSelection(mode, max_lag, alpha, selected, p_values)


def save_selection(selection: LagSelection, path: str | Path) -> None:
    """Emit the per-unit p-values and the selection flags as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chosen = set(selection.selected)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["column", "lag", "p_value", "selected"])
        for (column, lag) in sorted(selection.p_values,
                                    key=lambda k: (k[0], k[1] or 0)):
            p = selection.p_values[(column, lag)]
            writer.writerow([
                column,
                "" if lag is None else lag,
                "" if np.isnan(p) else repr(p),
                str((column, lag) in chosen).lower(),
            ])
