"""Design-matrix assembly from (column, lag) pairs, plus feature scaling.

Rows are panel day indices; the feature value for (column, lag) at row t is
the column's value at t - lag, so every feature only ever looks backwards.
Scaler parameters are fitted on training rows and reused verbatim on test
rows -- refitting on test data is exactly the leak the pipeline audit exists
to catch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class Scaler:
    kind: str                    # none | standardise | minmax
    center: np.ndarray | None = None
    scale: np.ndarray | None = None

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.kind == "none":
            return X
        return (X - self.center) / self.scale


def fit_scaler(X: np.ndarray, kind: str) -> Scaler:
    if kind == "none":
        return Scaler("none")
    if kind == "standardise":
        center = X.mean(axis=0)
        scale = X.std(axis=0)
    elif kind == "minmax":
        center = X.min(axis=0)
        scale = X.max(axis=0) - center
    else:
        raise DataError(f"unknown scaling '{kind}'")
    scale = np.where(scale == 0.0, 1.0, scale)
    return Scaler(kind, center, scale)


@dataclass(frozen=True)
class DesignMatrix:
    X: np.ndarray
    feature_names: tuple[str, ...]
    rows: np.ndarray          # panel day index of each design row
    scaler: Scaler | None = None


OWN_LAG_PREFIX = "__target__"


def feature_pairs(selected, own_lags: int) -> list[tuple[str, int]]:
    """Selected (column, lag) pairs, or the target's own lags when the
    selection came back empty."""
    pairs = [(c, l) for c, l in selected if l is not None]
    if pairs:
        return pairs
    return [(OWN_LAG_PREFIX, lag) for lag in range(1, own_lags + 1)]


def assemble(columns: dict[str, np.ndarray], target_values: np.ndarray,
             pairs: list[tuple[str, int]], row_range: tuple[int, int],
             label_mask: np.ndarray | None = None,
             require_labels: bool = True) -> tuple[DesignMatrix, np.ndarray]:
    """Build (design, labels) for the rows of `row_range` where every lagged
    feature is finite and (when required) the label is defined."""
    if not pairs:
        raise DataError("no feature pairs to assemble")
    lo, hi = row_range
    n = len(target_values)
    if not (0 <= lo < hi <= n):
        raise DataError(f"bad row range {row_range} for {n} rows")
    rows = np.arange(lo, hi)

    names = []
    cols = []
    for column, lag in pairs:
        source = target_values if column == OWN_LAG_PREFIX else columns[column]
        shifted = np.full(n, np.nan)
        shifted[lag:] = source[:n - lag]
        cols.append(shifted[rows])
        label = "target" if column == OWN_LAG_PREFIX else column
        names.append(f"{label}@lag{lag}")
    X = np.column_stack(cols)
    labels = target_values[rows]

    valid = np.isfinite(X).all(axis=1)
    if require_labels:
        valid &= np.isfinite(labels)
        if label_mask is not None:
            valid &= label_mask[rows]
    if not valid.any():
        raise DataError("no valid design rows in the requested range")
    design = DesignMatrix(X[valid], tuple(names), rows[valid])
    return design, labels[valid]
