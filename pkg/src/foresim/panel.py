"""Daily feature panels: CSV loading, validation, exclusions, forward imputation.

A panel is a date-indexed table of numeric columns on a strictly daily grid.
Missing values are NaN; calendar gaps in the source file are materialised as
all-missing rows so downstream lag arithmetic always sees a uniform grid.
Panels are treated as immutable: every operation returns a new panel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

ROLE_PRICE = "price"
ROLE_FEATURE = "feature"
ROLE_NLP = "nlp_score"

_ROLES = (ROLE_PRICE, ROLE_FEATURE, ROLE_NLP)


@dataclass(frozen=True)
class Panel:
    """Date-indexed table of named float columns with per-column roles."""

    dates: tuple[date, ...]
    columns: dict[str, np.ndarray]
    roles: dict[str, str]

    def __post_init__(self):
        n = len(self.dates)
        for name, values in self.columns.items():
            if len(values) != n:
                raise DataError(
                    f"column '{name}' has {len(values)} values for {n} dates"
                )
            if name not in self.roles:
                raise DataError(f"column '{name}' has no role")
        for name, role in self.roles.items():
            if role not in _ROLES:
                raise DataError(f"column '{name}' has unknown role '{role}'")
        price_cols = [c for c, r in self.roles.items() if r == ROLE_PRICE]
        if len(price_cols) != 1:
            raise DataError(f"expected exactly one price column, got {price_cols}")
        for i in range(1, n):
            if (self.dates[i] - self.dates[i - 1]).days != 1:
                raise DataError(
                    f"dates must advance by exactly one day; "
                    f"{self.dates[i - 1]} -> {self.dates[i]}"
                )

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def price_column(self) -> str:
        return next(c for c, r in self.roles.items() if r == ROLE_PRICE)

    @property
    def feature_columns(self) -> list[str]:
        """All non-price columns (features and NLP scores), in table order."""
        return [c for c in self.columns if self.roles[c] != ROLE_PRICE]

    def prices(self) -> np.ndarray:
        return self.columns[self.price_column]

    def first_observed(self, column: str) -> int:
        """Index of the first non-missing value; n_rows if all missing."""
        finite = np.flatnonzero(~np.isnan(self.columns[column]))
        return int(finite[0]) if finite.size else self.n_rows

    def date_index(self, d: date) -> int:
        offset = (d - self.dates[0]).days
        if offset < 0 or offset >= self.n_rows:
            raise DataError(f"date {d} outside panel span "
                            f"{self.dates[0]}..{self.dates[-1]}")
        return offset

    def with_columns(self, columns: dict[str, np.ndarray],
                     roles: dict[str, str] | None = None) -> "Panel":
        return Panel(self.dates, columns, roles if roles is not None else dict(self.roles))


@dataclass(frozen=True)
class ExclusionList:
    """Cell ranges to blank out before imputation (known-bad source data)."""

    entries: tuple[tuple[str, date, date], ...]


def _parse_date(text: str, lineno: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError as exc:
        raise DataError(f"line {lineno}: bad date '{text}': {exc}") from None


def _parse_cell(text: str, lineno: int, column: str) -> float:
    text = text.strip()
    if text == "" or text.lower() == "nan":
        return np.nan
    try:
        return float(text)
    except ValueError:
        raise DataError(
            f"line {lineno}, column '{column}': unparsable numeric cell '{text}'"
        ) from None


def load_panel(path: str | Path, price_column: str,
               nlp_columns: Iterable[str] = ()) -> Panel:
    """Load a daily panel from CSV.

    The file must have a header row with a `date` column (ISO-8601). Empty
    cells (and the literal text NaN) read as missing. Calendar gaps become
    all-missing rows. Duplicate or non-increasing dates are errors.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"panel file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if "date" not in header:
            raise DataError(f"{path}: no 'date' column in header {header}")
        date_pos = header.index("date")
        names = [h for h in header if h != "date"]
        if len(set(names)) != len(names):
            raise DataError(f"{path}: duplicate column names in header")
        if price_column not in names:
            raise DataError(f"{path}: price column '{price_column}' not in header")

        rows: list[tuple[date, list[float]]] = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(cell.strip() == "" for cell in raw):
                continue
            if len(raw) != len(header):
                raise DataError(
                    f"{path} line {lineno}: {len(raw)} cells for "
                    f"{len(header)} header columns"
                )
            d = _parse_date(raw[date_pos], lineno)
            values = [
                _parse_cell(cell, lineno, header[i])
                for i, cell in enumerate(raw) if i != date_pos
            ]
            rows.append((d, values))

    if not rows:
        raise DataError(f"{path}: no data rows")
    for (d_prev, _), (d_next, _) in zip(rows, rows[1:]):
        if d_next == d_prev:
            raise DataError(f"{path}: duplicate date {d_next}")
        if d_next < d_prev:
            raise DataError(f"{path}: non-increasing dates {d_prev} -> {d_next}")

    start, end = rows[0][0], rows[-1][0]
    n = (end - start).days + 1
    dates = tuple(start + timedelta(days=i) for i in range(n))
    data = np.full((n, len(names)), np.nan)
    for d, values in rows:
        data[(d - start).days, :] = values

    nlp = set(nlp_columns)
    unknown = nlp - set(names)
    if unknown:
        raise DataError(f"nlp_columns not in panel: {sorted(unknown)}")
    roles = {}
    for name in names:
        if name == price_column:
            roles[name] = ROLE_PRICE
        elif name in nlp:
            roles[name] = ROLE_NLP
        else:
            roles[name] = ROLE_FEATURE
    columns = {name: data[:, j].copy() for j, name in enumerate(names)}
    return Panel(dates, columns, roles)


def save_panel(panel: Panel, path: str | Path) -> None:
    """Write a panel back to CSV; missing values become empty cells."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(panel.columns)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + names)
        for i, d in enumerate(panel.dates):
            row = [d.isoformat()]
            for name in names:
                v = panel.columns[name][i]
                row.append("" if np.isnan(v) else repr(float(v)))
            writer.writerow(row)


def load_exclusions(path: str | Path) -> ExclusionList:
    """Read an exclusion list CSV with columns column,start_date,end_date."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"exclusion file not found: {path}")
    entries = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header != ["column", "start_date", "end_date"]:
            raise DataError(
                f"{path}: expected header column,start_date,end_date, got {header}"
            )
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(c.strip() == "" for c in raw):
                continue
            if len(raw) != 3:
                raise DataError(f"{path} line {lineno}: expected 3 cells")
            column = raw[0].strip()
            lo = _parse_date(raw[1], lineno)
            hi = _parse_date(raw[2], lineno)
            if hi < lo:
                raise DataError(f"{path} line {lineno}: end before start")
            entries.append((column, lo, hi))
    return ExclusionList(tuple(entries))


def apply_exclusions(panel: Panel, excl: ExclusionList) -> Panel:
    """Blank the listed (column, date-range) cells to missing."""
    columns = {name: values.copy() for name, values in panel.columns.items()}
    for column, lo, hi in excl.entries:
        if column not in columns:
            raise DataError(f"exclusion names unknown column '{column}'")
        i = panel.date_index(lo)
        j = panel.date_index(hi)
        columns[column][i:j + 1] = np.nan
    return panel.with_columns(columns)


def _forward_fill(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    missing = np.isnan(out)
    if not missing.any():
        return out
    idx = np.where(~missing, np.arange(len(out)), -1)
    np.maximum.accumulate(idx, out=idx)
    has_source = idx >= 0
    out[has_source] = values[idx[has_source]]
    return out


def impute_forward(panel: Panel) -> Panel:
    """Fill each missing value with the previous day's value (cascading).

    Leading missing values stay missing: they mark the column's usable start
    and must never be back-filled from the future.
    """
    columns = {name: _forward_fill(values) for name, values in panel.columns.items()}
    return panel.with_columns(columns)
