"""Target constructions: next-day log return, binary up/down, local extrema.

All five targets (continuous, binary, and the extrema pairs for windows 7,
14, 21) are built on raw prices. Values align index-for-index with the input
price series; `defined_mask` marks where a label is computable (the last day
for next-day targets, the full +/-w interior for extrema).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError

KIND_CONTINUOUS = "continuous_return"
KIND_BINARY = "binary_updown"
KIND_EXTREMA = "extrema_pair"

EXTREMA_WINDOWS = (7, 14, 21)


@dataclass(frozen=True)
class TargetSeries:
    """One target construction aligned to a price series.

    For extrema pairs `values` is the is_min vector and `values_max` the
    is_max vector; both are 0/1 floats under the shared defined mask.
    """

    kind: str
    values: np.ndarray
    defined_mask: np.ndarray
    window: int | None = None
    values_max: np.ndarray | None = None

    @property
    def is_min(self) -> np.ndarray:
        if self.kind != KIND_EXTREMA:
            raise DataError("is_min only exists for extrema targets")
        return self.values

    @property
    def is_max(self) -> np.ndarray:
        if self.kind != KIND_EXTREMA:
            raise DataError("is_max only exists for extrema targets")
        assert self.values_max is not None
        return self.values_max

    def defined_values(self) -> np.ndarray:
        return self.values[self.defined_mask]


def _check_prices(prices, min_len: int, positive: bool) -> np.ndarray:
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1:
        raise DataError(f"prices must be 1-D, got shape {p.shape}")
    if len(p) < min_len:
        raise DataError(f"price series too short ({len(p)} < {min_len})")
    if np.isnan(p).any():
        raise DataError("price series contains missing values")
    if positive and np.min(p) <= 0.0:
        raise DataError("prices must be strictly positive")
    return p


def continuous_return_target(prices) -> TargetSeries:
    """Next-day log price change: value at t is ln(p[t+1]) - ln(p[t])."""
    p = _check_prices(prices, 2, positive=True)
    values = np.full(len(p), np.nan)
    values[:-1] = np.diff(np.log(p))
    mask = np.ones(len(p), dtype=bool)
    mask[-1] = False
    return TargetSeries(KIND_CONTINUOUS, values, mask)


def binary_updown_target(prices) -> TargetSeries:
    """Next-day direction: 1 for a price increase, 0 for no change or a drop."""
    p = _check_prices(prices, 2, positive=False)
    values = np.zeros(len(p))
    values[:-1] = (p[1:] > p[:-1]).astype(float)
    mask = np.ones(len(p), dtype=bool)
    mask[-1] = False
    return TargetSeries(KIND_BINARY, values, mask)


def extrema_targets(prices, window: int) -> TargetSeries:
    """Local-extrema labels: day t is a minimum iff p[t] is strictly below
    every price within `window` days on both sides (maxima symmetric).

    Plateaus produce no extremum (strict inequality keeps is_min and is_max
    mutually exclusive), and labels are undefined wherever the +/-window
    interval runs off the ends of the series.
    """
    if window < 1:
        raise DataError(f"window must be >= 1, got {window}")
    p = _check_prices(prices, 2 * window + 1, positive=False)
    n = len(p)
    is_min = np.ones(n, dtype=bool)
    is_max = np.ones(n, dtype=bool)
    for offset in range(1, window + 1):
        left = np.full(n, np.inf)
        right = np.full(n, np.inf)
        left[offset:] = p[:-offset]
        right[:-offset] = p[offset:]
        is_min &= (p < left) & (p < right)
        neg_left = np.full(n, -np.inf)
        neg_right = np.full(n, -np.inf)
        neg_left[offset:] = p[:-offset]
        neg_right[:-offset] = p[offset:]
        is_max &= (p > neg_left) & (p > neg_right)
    mask = np.zeros(n, dtype=bool)
    mask[window:n - window] = True
    return TargetSeries(
        KIND_EXTREMA,
        np.where(mask, is_min, 0.0).astype(float),
        mask,
        window=window,
        values_max=np.where(mask, is_max, 0.0).astype(float),
    )


def build_target(prices, kind: str, window: int | None = None) -> TargetSeries:
    """Dispatch on target kind; extrema require the +/- window size."""
    if kind == KIND_CONTINUOUS:
        return continuous_return_target(prices)
    if kind == KIND_BINARY:
        return binary_updown_target(prices)
    if kind == KIND_EXTREMA:
        if window is None:
            raise DataError("extrema target needs a window")
        return extrema_targets(prices, window)
    raise DataError(f"unknown target kind '{kind}'")


@dataclass(frozen=True)
class ClassWeights:
    """Inverse-frequency class weights normalised to average 1."""

    weight_positive: float
    weight_negative: float


def class_weights(labels) -> ClassWeights:
    """weight_c = n / (2 * n_c); errors when only one class is present."""
    y = np.asarray(labels, dtype=float)
    if y.size == 0:
        raise DataError("empty label vector")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DataError("labels must be 0/1")
    n_pos = int(np.sum(y == 1.0))
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("both classes must be present to compute weights")
    n = len(y)
    return ClassWeights(n / (2.0 * n_pos), n / (2.0 * n_neg))


def sample_weights(labels, weights: ClassWeights | None) -> np.ndarray:
    """Per-sample multipliers from class weights (all ones when None)."""
    y = np.asarray(labels, dtype=float)
    if weights is None:
        return np.ones(len(y))
    return np.where(y == 1.0, weights.weight_positive, weights.weight_negative)


def save_target(target: TargetSeries, dates: Sequence[date],
                path: str | Path) -> None:
    """Emit a target as CSV: date,kind,value (extrema: date,is_min,is_max,defined)."""
    if len(dates) != len(target.values):
        raise DataError("dates and target values differ in length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if target.kind == KIND_EXTREMA:
            writer.writerow(["date", "is_min", "is_max", "defined"])
            for i, d in enumerate(dates):
                writer.writerow([d.isoformat(), int(target.values[i]),
                                 int(target.values_max[i]),
                                 str(bool(target.defined_mask[i])).lower()])
        else:
            writer.writerow(["date", "kind", "value"])
            for i, d in enumerate(dates):
                value = target.values[i]
                defined = bool(target.defined_mask[i]) and not np.isnan(value)
                writer.writerow([d.isoformat(), target.kind,
                                 repr(float(value)) if defined else ""])
