"""Increasing-window cross-validation geometry.

The timeline is cut into k+1 equal contiguous blocks (remainder days handed
one-per-block from the front); fold i trains on blocks 1..i and tests on
block i+1, so each successive fold trains on strictly more history and the
test blocks jointly tile everything after block 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError


@dataclass(frozen=True)
class FoldSplit:
    index: int                 # 1-based fold number
    train: tuple[int, int]     # [start, end) row range
    test: tuple[int, int]


@dataclass(frozen=True)
class CvPlan:
    k: int
    n_days: int
    boundaries: tuple[int, ...]      # k+2 cut points including 0 and n_days
    splits: tuple[FoldSplit, ...]


def make_cv_splits(n_days: int, k: int = 7) -> CvPlan:
    """Pure arithmetic: reproducible from (n_days, k) alone."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    if n_days < 2 * (k + 1):
        raise DataError(
            f"need at least {2 * (k + 1)} days for {k}-fold CV, got {n_days}"
        )
    blocks = k + 1
    base, remainder = divmod(n_days, blocks)
    sizes = [base + (1 if i < remainder else 0) for i in range(blocks)]
    boundaries = [0]
    for size in sizes:
        boundaries.append(boundaries[-1] + size)
    splits = tuple(
        FoldSplit(i, (0, boundaries[i]), (boundaries[i], boundaries[i + 1]))
        for i in range(1, blocks)
    )
    return CvPlan(k, n_days, tuple(boundaries), splits)
