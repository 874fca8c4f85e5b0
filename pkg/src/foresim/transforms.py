"""Per-column preprocessing: log heteroskedastic columns, difference unit roots.

Decision order matches the pipeline contract: the variance vote runs on
levels and (only for strictly positive columns) triggers a natural log, then
the column is differenced until the unit-root vote says stationary or the
differencing cap is hit. The price column stays raw for the simulator and
contributes a transformed copy (``<price>_transformed``) to the feature set.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import stattests
from .errors import DataError
from .panel import ROLE_FEATURE, Panel

logger = logging.getLogger(__name__)

MAX_DIFF_DEFAULT = 2


@dataclass(frozen=True)
class FeatureMeta:
    """Fitted transform record for one column."""

    column: str
    order_of_integration: int
    logged: bool
    unit_root_votes: tuple[bool, bool, bool]  # (adf, pp, kpss): True = unit root
    het_votes: tuple[bool, bool, bool]        # (white, bp, gq): True = heteroskedastic
    alpha: float
    capped: bool = False  # differencing cap reached before stationarity


def _usable(values: np.ndarray, column: str) -> np.ndarray:
    finite = np.flatnonzero(~np.isnan(values))
    if finite.size == 0:
        raise DataError(f"column '{column}' is entirely missing")
    segment = values[finite[0]:]
    if np.isnan(segment).any():
        raise DataError(
            f"column '{column}' has interior missing values; impute first"
        )
    return segment


def _difference(values: np.ndarray, order: int) -> np.ndarray:
    out = values
    for _ in range(order):
        out = np.concatenate([[np.nan], np.diff(out)])
    return out


def fit_column_transform(values: np.ndarray, column: str,
                         alpha: float = stattests.DEFAULT_ALPHA,
                         max_diff: int = MAX_DIFF_DEFAULT,
                         max_lag: int = 14) -> tuple[np.ndarray, FeatureMeta]:
    """Fit and apply the log/difference decision for a single column.

    Returns the transformed full-length values (NaN where undefined) and the
    fitted meta. Decisions are made on the column's usable segment only.
    """
    segment = _usable(values, column)

    is_het, het_results = stattests.het_vote(segment, alpha)
    logged = bool(is_het and np.min(segment) > 0.0)
    if is_het and not logged:
        logger.info("column %s: heteroskedastic but not strictly positive; "
                    "log transform skipped", column)
    working_full = np.log(values) if logged else values.astype(float)
    working = np.log(segment) if logged else segment

    order = 0
    capped = False
    has_unit_root, ur_results = stattests.unit_root_vote(working, alpha, max_lag)
    while has_unit_root:
        if order >= max_diff:
            capped = True
            logger.warning("column %s: still non-stationary after %d differences",
                           column, max_diff)
            break
        working = np.diff(working)
        order += 1
        has_unit_root, ur_results = stattests.unit_root_vote(working, alpha, max_lag)

    meta = FeatureMeta(
        column=column,
        order_of_integration=order,
        logged=logged,
        unit_root_votes=(
            not ur_results[0].rejects_null,
            not ur_results[1].rejects_null,
            ur_results[2].rejects_null,
        ),
        het_votes=tuple(r.rejects_null for r in het_results),
        alpha=alpha,
        capped=capped,
    )
    return _difference(working_full, order), meta


def apply_column_transform(values: np.ndarray, meta: FeatureMeta) -> np.ndarray:
    """Apply an already-fitted transform to (possibly longer) column values.

    Logged columns map non-positive cells to NaN rather than silently
    changing the fitted decision.
    """
    if meta.logged:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.log(values)
        out[~np.isfinite(out)] = np.nan
    else:
        out = values.astype(float)
    return _difference(out, meta.order_of_integration)


def fit_transforms(panel: Panel, alpha: float = stattests.DEFAULT_ALPHA,
                   max_diff: int = MAX_DIFF_DEFAULT,
                   max_lag: int = 14) -> tuple[Panel, list[FeatureMeta]]:
    """Fit and apply transforms to every feature column of an imputed panel.

    The price column is kept raw (the simulator trades raw prices) and a
    transformed copy named ``<price>_transformed`` joins the feature set.
    The output panel drops its first ``max(order_of_integration)`` rows so
    every differenced column is defined on a common grid.
    """
    price = panel.price_column
    metas: list[FeatureMeta] = []
    transformed: dict[str, np.ndarray] = {}
    roles = dict(panel.roles)

    for column in panel.feature_columns:
        values, meta = fit_column_transform(panel.columns[column], column,
                                            alpha, max_diff, max_lag)
        transformed[column] = values
        metas.append(meta)

    price_feature = f"{price}_transformed"
    if price_feature not in panel.columns:
        values, meta = fit_column_transform(panel.columns[price], price_feature,
                                            alpha, max_diff, max_lag)
        transformed[price_feature] = values
        roles[price_feature] = ROLE_FEATURE
        metas.append(meta)

    transformed[price] = panel.columns[price].copy()

    drop = max((m.order_of_integration for m in metas), default=0)
    columns = {name: vals[drop:] for name, vals in transformed.items()}
    out = Panel(panel.dates[drop:], columns, roles)
    return out, metas


def save_feature_meta(metas: list[FeatureMeta], path: str | Path) -> None:
    """Emit the fitted-transform table as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["column", "order_of_integration", "logged",
                         "adf", "pp", "kpss", "white", "bp", "gq"])
        for m in metas:
            writer.writerow(
                [m.column, m.order_of_integration, str(m.logged).lower()]
                + [str(v).lower() for v in m.unit_root_votes]
                + [str(v).lower() for v in m.het_votes]
            )
