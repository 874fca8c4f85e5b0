"""Classification metrics: accuracy, AUC ROC, and the probability-threshold search."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from ..errors import DataError

# 0.00..1.00 in hundredths; the resolution of the accuracy grid search.
DEFAULT_THRESHOLD_GRID = np.arange(101) / 100.0


def accuracy(predictions, labels) -> float:
    """Fraction of exact matches between 0/1 predictions and labels."""
    pred = np.asarray(predictions, dtype=float)
    y = np.asarray(labels, dtype=float)
    if pred.shape != y.shape or pred.ndim != 1:
        raise DataError("predictions and labels must be equal-length vectors")
    if pred.size == 0:
        raise DataError("accuracy of an empty vector is undefined")
    return float(np.mean(pred == y))


def auc_roc(scores, labels) -> float:
    """Area under the ROC curve via the rank (Mann-Whitney) statistic.

    Equals the probability that a random positive outranks a random
    negative, counting ties as half.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    if s.shape != y.shape or s.ndim != 1:
        raise DataError("scores and labels must be equal-length vectors")
    n_pos = int(np.sum(y == 1.0))
    n_neg = int(np.sum(y == 0.0))
    if n_pos + n_neg != len(y):
        raise DataError("labels must be 0/1")
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes present")
    ranks = rankdata(s)
    rank_sum_pos = float(np.sum(ranks[y == 1.0]))
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def threshold_search(probs, labels, grid=None) -> tuple[float, float]:
    """Grid-search the probability cutoff that maximises accuracy of
    1[prob > tau]; ties break towards the smallest tau (most trades kept).
    """
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels, dtype=float)
    if p.shape != y.shape or p.ndim != 1 or p.size == 0:
        raise DataError("probs and labels must be equal-length non-empty vectors")
    g = DEFAULT_THRESHOLD_GRID if grid is None else np.asarray(grid, dtype=float)
    if g.size == 0:
        raise DataError("threshold grid is empty")
    if np.any(np.diff(g) < 0) or g[0] < 0.0 or g[-1] > 1.0:
        raise DataError("threshold grid must be sorted within [0, 1]")
    predictions = p[None, :] > g[:, None]
    accuracies = np.mean(predictions == y[None, :], axis=1)
    best = int(np.argmax(accuracies))  # first maximiser = smallest tau
    return float(g[best]), float(accuracies[best])
