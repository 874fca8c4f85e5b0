"""Shared builders for synthetic panels used across the test suite."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np
import pytest

from foresim.cv import make_cv_splits
from foresim.panel import Panel


def make_dates(n, start=date(2018, 1, 1)):
    return tuple(start + timedelta(days=i) for i in range(n))


def make_panel(columns: dict, price_column: str = "price_close",
               nlp: tuple = ()) -> Panel:
    n = len(next(iter(columns.values())))
    roles = {}
    for name in columns:
        if name == price_column:
            roles[name] = "price"
        elif name in nlp:
            roles[name] = "nlp_score"
        else:
            roles[name] = "feature"
    return Panel(make_dates(n), {k: np.asarray(v, dtype=float)
                                 for k, v in columns.items()}, roles)


def planted_binary_panel(n=480, seed=5, k=7):
    """Panel whose next-day direction is a deterministic function of one
    feature's lag-1 value; every test block opens with an up-move so the
    strategy's forced entry matches perfect knowledge."""
    rng = np.random.default_rng(seed)
    x = rng.choice([-1.0, 1.0], size=n) + 0.05 * rng.standard_normal(n)
    plan = make_cv_splits(n, k)
    for b in plan.boundaries[1:-1]:
        x[b - 1] = abs(x[b - 1])
    y = np.zeros(n)
    y[1:] = (x[:-1] > 0).astype(float)
    price = np.empty(n)
    price[0] = 100.0
    magnitude = 0.015 + 0.01 * rng.random(n)
    for t in range(n - 1):
        move = magnitude[t] if y[t] == 1.0 else -magnitude[t]
        price[t + 1] = price[t] * np.exp(move)
    noise = rng.standard_normal(n)
    panel = make_panel({"price_close": price, "signal": x, "noise": noise})
    return panel, y


def noise_panel(n=360, seed=0, n_features=3):
    """Pure-noise panel: GBM price, iid standard-normal features."""
    rng = np.random.default_rng(seed)
    price = 100.0 * np.exp(np.cumsum(rng.standard_normal(n) * 0.02))
    columns = {"price_close": price}
    for j in range(n_features):
        columns[f"f{j}"] = rng.standard_normal(n)
    return make_panel(columns)


@pytest.fixture
def planted_panel():
    return planted_binary_panel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
