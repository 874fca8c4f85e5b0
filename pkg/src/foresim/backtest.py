"""Trading simulation: signal-driven long/flat walks and their metrics.

Execution convention: the signal available at day t trades at day t's close,
so day t+1's price move accrues to the position taken at t. A signal vector
therefore has one entry per price transition (len(prices) - 1). Model-driven
strategies force a buy at the first timestep (signals act from t=1 onwards)
and liquidate at the last; perfect-knowledge runs skip the forced entry --
an oracle never takes an uninformed position.

Profit starts from one currency unit; the Sharpe ratio is annualised as
365 * mean(r) / (sqrt(365) * std(r)) with the sample (n-1) deviation and a
zero risk-free rate, and is flagged undefined when the deviation is zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError
from .targets import KIND_BINARY, KIND_CONTINUOUS, KIND_EXTREMA, TargetSeries

DAYS_PER_YEAR = 365

HOLD = -1  # sentinel in desired-position vectors: keep the current position


@dataclass(frozen=True)
class TradeEvent:
    index: int
    action: str  # "buy" | "sell"
    price: float
    when: date | None = None


@dataclass(frozen=True)
class TradeLog:
    """Event list plus the daily portfolio value it produces."""

    events: tuple[TradeEvent, ...]
    portfolio_value: np.ndarray
    prices: np.ndarray
    dates: tuple[date, ...] | None = None

    @property
    def daily_returns(self) -> np.ndarray:
        v = self.portfolio_value
        return v[1:] / v[:-1] - 1.0

    @property
    def trade_count(self) -> int:
        return len(self.events)

    @property
    def final_value(self) -> float:
        return float(self.portfolio_value[-1])


@dataclass(frozen=True)
class BacktestMetrics:
    profit: float
    excess_profit: float | None
    sharpe: float | None  # None when the return deviation is zero
    r_bar: float
    sigma: float
    n_days: int
    trades: int


def sharpe_annualised(daily_returns) -> tuple[float | None, float, float]:
    """(sharpe, r_bar, sigma); sharpe is None when sigma is 0 or n < 2."""
    r = np.asarray(daily_returns, dtype=float)
    if r.size == 0:
        raise DataError("no daily returns to annualise")
    r_bar = float(np.mean(r))
    if r.size < 2:
        return None, r_bar, 0.0
    sigma = float(np.std(r, ddof=1))
    if sigma == 0.0:
        return None, r_bar, sigma
    return DAYS_PER_YEAR * r_bar / (np.sqrt(DAYS_PER_YEAR) * sigma), r_bar, sigma


def _check_prices(prices) -> np.ndarray:
    p = np.asarray(prices, dtype=float)
    if p.ndim != 1 or len(p) < 2:
        raise DataError("need a 1-D price series of length >= 2")
    if not np.isfinite(p).all() or np.min(p) <= 0:
        raise DataError("prices must be finite and strictly positive")
    return p


def _walk(desired: np.ndarray, prices: np.ndarray, cost: float,
          forced_entry: bool, dates=None) -> TradeLog:
    """Core long/flat walk.

    `desired[t]` (0, 1, or HOLD) is the position to hold over (t, t+1],
    traded at prices[t]. With forced_entry the walk opens long at t=0 and
    ignores desired[0]; the final day always liquidates.
    """
    n = len(prices)
    if len(desired) != n - 1:
        raise DataError(
            f"signal length {len(desired)} != number of transitions {n - 1}"
        )
    if not (0.0 <= cost < 1.0):
        raise DataError(f"proportional cost must be in [0, 1), got {cost}")
    factor = 1.0 - cost
    events: list[TradeEvent] = []
    value = np.empty(n)
    position = 0
    cash = 1.0       # portfolio value while flat
    units = 0.0      # asset units while long

    def trade(t: int, target: int):
        nonlocal position, cash, units
        if target == position:
            return
        when = None if dates is None else dates[t]
        if target == 1:
            units = cash * factor / prices[t]
            events.append(TradeEvent(t, "buy", float(prices[t]), when))
        else:
            cash = units * prices[t] * factor
            events.append(TradeEvent(t, "sell", float(prices[t]), when))
        position = target

    first = 1 if forced_entry else desired[0]
    if first == 1:
        trade(0, 1)
    value[0] = units * prices[0] if position == 1 else cash
    for t in range(1, n):
        if t < n - 1:
            if desired[t] != HOLD:
                trade(t, int(desired[t]))
        else:
            trade(t, 0)
        value[t] = units * prices[t] if position == 1 else cash
    return TradeLog(tuple(events), value, prices,
                    None if dates is None else tuple(dates))


def _signal_array(signals, n: int, name: str) -> np.ndarray:
    s = np.asarray(signals, dtype=float)
    if s.ndim != 1 or len(s) != n - 1:
        raise DataError(
            f"{name}: expected one signal per transition ({n - 1}), got {len(s)}"
        )
    if not np.isfinite(s).all():
        raise DataError(f"{name}: signals contain non-finite values")
    return s


def simulate_regression_strategy(forecasts, prices, cost: float = 0.0,
                                 dates=None) -> TradeLog:
    """Long while the forecast return is positive, flat while negative.

    A zero forecast holds the current position. Entry at the first timestep
    is forced; the last timestep liquidates.
    """
    p = _check_prices(prices)
    f = _signal_array(forecasts, len(p), "forecasts")
    desired = np.where(f > 0, 1, np.where(f < 0, 0, HOLD))
    return _walk(desired, p, cost, forced_entry=True, dates=dates)


def simulate_binary_strategy(probs, tau: float, prices, cost: float = 0.0,
                             dates=None) -> TradeLog:
    """Long exactly while the predicted up-probability exceeds tau."""
    p = _check_prices(prices)
    q = _signal_array(probs, len(p), "probs")
    if np.min(q) < 0.0 or np.max(q) > 1.0:
        raise DataError("probabilities must lie in [0, 1]")
    desired = (q > tau).astype(int)
    return _walk(desired, p, cost, forced_entry=True, dates=dates)


def simulate_extrema_strategy(p_min, p_max, tau: float, prices,
                              cost: float = 0.0, dates=None,
                              forced_entry: bool = True) -> TradeLog:
    """Buy when only the minimum probability clears tau, sell when only the
    maximum does; conflicting or silent signals hold the current position."""
    p = _check_prices(prices)
    qmin = _signal_array(p_min, len(p), "p_min")
    qmax = _signal_array(p_max, len(p), "p_max")
    buy = (qmin > tau) & (qmax <= tau)
    sell = (qmax > tau) & (qmin <= tau)
    desired = np.full(len(p) - 1, HOLD)
    desired[buy] = 1
    desired[sell] = 0
    return _walk(desired, p, cost, forced_entry=forced_entry, dates=dates)


def buy_and_hold(prices, cost: float = 0.0, dates=None) -> "BacktestMetrics":
    """Passive benchmark: buy the first day, liquidate the last (2 trades)."""
    log = buy_and_hold_log(prices, cost, dates)
    return compute_metrics(log, benchmark_profit=None)


def buy_and_hold_log(prices, cost: float = 0.0, dates=None) -> TradeLog:
    p = _check_prices(prices)
    desired = np.ones(len(p) - 1, dtype=int)
    return _walk(desired, p, cost, forced_entry=True, dates=dates)


def _optimal_label_walk(buy_ok: np.ndarray, sell_ok: np.ndarray,
                        prices: np.ndarray, cost: float) -> TradeLog:
    """Best long/flat policy that may only buy on buy_ok days and sell on
    sell_ok days (plus the forced final liquidation). Viterbi over the two
    position states in log-value; ties prefer not trading."""
    n = len(prices)
    log_p = np.log(prices)
    log_keep = np.log1p(-cost)
    neg = -np.inf
    flat = np.zeros(n)
    long_ = np.full(n, neg)
    from_flat = np.zeros((n, 2), dtype=bool)  # [t, state]: predecessor was flat
    if buy_ok[0]:
        long_[0] = -log_p[0] + log_keep
        from_flat[0, 1] = True
    for t in range(1, n):
        flat[t], long_[t] = flat[t - 1], long_[t - 1]
        from_flat[t, 0], from_flat[t, 1] = True, False
        if (sell_ok[t] or t == n - 1) and long_[t - 1] + log_p[t] + log_keep > flat[t]:
            flat[t] = long_[t - 1] + log_p[t] + log_keep
            from_flat[t, 0] = False
        if t < n - 1 and buy_ok[t] and flat[t - 1] - log_p[t] + log_keep > long_[t]:
            long_[t] = flat[t - 1] - log_p[t] + log_keep
            from_flat[t, 1] = True

    # the walk ends flat; backtrack to the position held after each close
    end_state = np.zeros(n, dtype=int)
    state = 0
    for t in range(n - 1, 0, -1):
        end_state[t] = state
        state = 0 if from_flat[t, state] else 1
    end_state[0] = state
    # end_state[t] is the position over (t, t+1], exactly _walk's desired[t]
    return _walk(end_state[:n - 1], prices, cost, forced_entry=False)


def perfect_knowledge(target: TargetSeries, prices, cost: float = 0.0,
                      benchmark: "BacktestMetrics | None" = None
                      ) -> "BacktestMetrics":
    """Profit ceiling of a target: the best trading consistent with its
    true labels.

    Daily targets go long exactly on true up-days (the optimal daily
    policy). Extrema targets get the optimal long/flat policy that only
    buys at labelled minima and sells at labelled maxima -- the analogue of
    the daily optimum under the extrema strategy's trade placement. No
    entry is forced; an oracle never takes an uninformed position.
    """
    p = _check_prices(prices)
    n = len(p)
    if len(target.values) != n:
        raise DataError("target is not aligned to the price series")
    if target.kind in (KIND_BINARY, KIND_CONTINUOUS):
        labels = target.values[:n - 1]
        if target.kind == KIND_CONTINUOUS:
            desired = (labels > 0).astype(int)
        else:
            desired = (labels == 1.0).astype(int)
        log = _walk(desired, p, cost, forced_entry=False)
    elif target.kind == KIND_EXTREMA:
        log = _optimal_label_walk(target.is_min == 1.0, target.is_max == 1.0,
                                  p, cost)
    else:
        raise DataError(f"unknown target kind '{target.kind}'")
    bench = benchmark.profit if benchmark is not None else None
    return compute_metrics(log, benchmark_profit=bench)


def compute_metrics(log: TradeLog,
                    benchmark_profit: float | None = None) -> BacktestMetrics:
    """Fill the metric block for one trade log (profit measured from the
    1.0-unit start value, excess measured against the benchmark's profit)."""
    returns = log.daily_returns
    sharpe, r_bar, sigma = sharpe_annualised(returns)
    profit = log.final_value - 1.0
    excess = None if benchmark_profit is None else profit - benchmark_profit
    return BacktestMetrics(
        profit=profit,
        excess_profit=excess,
        sharpe=sharpe,
        r_bar=r_bar,
        sigma=sigma,
        n_days=len(returns),
        trades=log.trade_count,
    )


def save_trade_log(log: TradeLog, path: str | Path) -> None:
    """One row per day: date,action,price,portfolio_value (action blank on
    no-trade days)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    actions = {e.index: e.action for e in log.events}
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "action", "price", "portfolio_value"])
        for i in range(len(log.prices)):
            when = log.dates[i].isoformat() if log.dates else str(i)
            writer.writerow([when, actions.get(i, ""), repr(float(log.prices[i])),
                             repr(float(log.portfolio_value[i]))])
