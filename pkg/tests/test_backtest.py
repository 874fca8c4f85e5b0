"""Trading simulators, benchmarks, perfect knowledge, and the Sharpe formula."""

import itertools

import numpy as np
import pytest

from foresim import backtest as bt
from foresim.errors import DataError
from foresim.targets import (
    binary_updown_target,
    continuous_return_target,
    extrema_targets,
)

from conftest import make_dates


def sharpe_oracle(returns):
    """Direct evaluation of 365*rbar / (sqrt(365)*sigma), sample std."""
    r = np.asarray(returns, dtype=float)
    rbar = sum(r) / len(r)
    sigma = (sum((x - rbar) ** 2 for x in r) / (len(r) - 1)) ** 0.5
    if sigma == 0.0:
        return None
    return 365.0 * rbar / (365.0 ** 0.5 * sigma)


class TestRegressionStrategy:
    def test_all_positive_equals_buy_and_hold(self):
        log = bt.simulate_regression_strategy([1.0, 1.0], [1.0, 2.0, 4.0])
        assert log.final_value == 4.0
        assert [e.action for e in log.events] == ["buy", "sell"]

    def test_hand_enumerated_walk(self):
        log = bt.simulate_regression_strategy([1.0, -1.0], [1.0, 2.0, 1.0])
        assert log.final_value == 2.0
        assert [(e.action, e.price) for e in log.events] == \
            [("buy", 1.0), ("sell", 2.0)]

    def test_forced_entry_overrides_first_signal(self):
        log = bt.simulate_regression_strategy([-1.0], [2.0, 1.0])
        assert log.final_value == 0.5
        assert log.trade_count == 2

    def test_zero_forecast_holds_position(self):
        log = bt.simulate_regression_strategy([1.0, 0.0, -1.0],
                                              [1.0, 2.0, 4.0, 2.0])
        # held through the zero forecast, exits on the negative one
        assert log.final_value == 4.0

    def test_length_mismatch_errors(self):
        with pytest.raises(DataError, match="one signal per transition"):
            bt.simulate_regression_strategy([1.0], [1.0, 2.0, 3.0])


class TestBinaryStrategy:
    def test_hand_walk(self):
        log = bt.simulate_binary_strategy([0.9, 0.1], 0.5, [1.0, 2.0, 1.0])
        assert log.final_value == 2.0

    def test_tau_one_exits_at_first_evaluation(self):
        log = bt.simulate_binary_strategy([1.0, 1.0], 1.0, [2.0, 1.0, 1.0])
        ref = bt.simulate_regression_strategy([-1.0, -1.0], [2.0, 1.0, 1.0])
        assert log.final_value == ref.final_value == 0.5

    def test_constant_prob_above_tau_is_buy_and_hold(self, rng):
        prices = np.exp(rng.standard_normal(40).cumsum() * 0.05) * 10
        log = bt.simulate_binary_strategy(np.full(39, 0.6), 0.5, prices)
        benchmark = bt.buy_and_hold(prices)
        metrics = bt.compute_metrics(log, benchmark.profit)
        assert abs(metrics.profit - benchmark.profit) < 1e-12
        assert metrics.excess_profit == 0.0
        assert metrics.trades == benchmark.trades == 2

    def test_probability_bounds_checked(self):
        with pytest.raises(DataError, match="probabilities"):
            bt.simulate_binary_strategy([1.5], 0.5, [1.0, 2.0])


class TestExtremaStrategy:
    def test_triangle_wave(self):
        log = bt.simulate_extrema_strategy([1.0, 0.0, 1.0], [0.0, 1.0, 0.0],
                                           0.5, [1.0, 2.0, 1.0, 2.0])
        assert log.final_value == 4.0
        assert log.trade_count == 4

    def test_conflicting_signals_hold(self, rng):
        prices = np.exp(rng.standard_normal(30).cumsum() * 0.05) * 10
        same = np.full(29, 0.9)
        log = bt.simulate_extrema_strategy(same, same, 0.5, prices)
        benchmark = bt.buy_and_hold(prices)
        assert abs(bt.compute_metrics(log).profit - benchmark.profit) < 1e-12

    def test_all_zero_probabilities_is_buy_and_hold(self, rng):
        prices = np.exp(rng.standard_normal(30).cumsum() * 0.05) * 10
        zeros = np.zeros(29)
        log = bt.simulate_extrema_strategy(zeros, zeros, 0.5, prices)
        assert abs(log.final_value - prices[-1] / prices[0]) < 1e-12


class TestBuyAndHold:
    def test_definition(self):
        m = bt.buy_and_hold([100.0, 150.0])
        assert abs(m.profit - 0.5) < 1e-15
        assert m.trades == 2

    def test_flat_prices(self):
        m = bt.buy_and_hold([5.0, 5.0, 5.0])
        assert m.profit == 0.0
        assert m.sharpe is None  # zero variance

    def test_singleton_errors(self):
        with pytest.raises(DataError):
            bt.buy_and_hold([1.0])


class TestPerfectKnowledge:
    def test_alternating_prices(self):
        p = np.array([1.0, 2.0, 1.0, 2.0])
        m = bt.perfect_knowledge(binary_updown_target(p), p)
        assert abs(m.profit - 3.0) < 1e-12

    def test_monotone_equals_buy_and_hold(self):
        p = np.exp(np.linspace(0.0, 1.0, 30))
        pk = bt.perfect_knowledge(binary_updown_target(p), p)
        bh = bt.buy_and_hold(p)
        assert abs(pk.profit - bh.profit) < 1e-12

    def test_continuous_target_same_policy(self, rng):
        p = np.exp(rng.standard_normal(50).cumsum() * 0.05) * 10
        a = bt.perfect_knowledge(binary_updown_target(p), p)
        b = bt.perfect_knowledge(continuous_return_target(p), p)
        assert abs(a.profit - b.profit) < 1e-12

    def test_small_series_brute_force_optimum(self):
        for prices in itertools.product([1.0, 2.0, 3.0], repeat=6):
            prices = np.array(prices)
            ratios = prices[1:] / prices[:-1]
            best = max(
                np.prod(np.where(mask, ratios, 1.0))
                for mask in itertools.product([True, False], repeat=5)
            )
            m = bt.perfect_knowledge(binary_updown_target(prices), prices)
            assert abs(m.profit - (best - 1.0)) < 1e-9

    def test_extrema_w_shape(self):
        p = np.array([5.0, 4, 3, 2, 1, 2, 3, 4, 5, 4, 3, 2, 1, 2, 3, 4, 5])
        m = bt.perfect_knowledge(extrema_targets(p, 2), p)
        assert abs(m.profit - 24.0) < 1e-12  # 1->5 twice
        assert m.trades == 4

    def test_extrema_never_negative(self, rng):
        for _ in range(100):
            n = int(rng.integers(50, 150))
            p = np.exp(rng.standard_normal(n).cumsum() * 0.03) * 20
            m = bt.perfect_knowledge(extrema_targets(p, 7), p)
            assert m.profit >= -1e-12

    def test_extrema_beats_label_driven_simulator(self, rng):
        # the ceiling is at least what trading every labelled extremum earns
        for _ in range(50):
            n = int(rng.integers(60, 200))
            p = np.exp(rng.standard_normal(n).cumsum() * 0.03) * 20
            t = extrema_targets(p, 7)
            mechanical = bt.compute_metrics(bt.simulate_extrema_strategy(
                t.is_min[:n - 1], t.is_max[:n - 1], 0.5, p,
                forced_entry=False))
            optimal = bt.perfect_knowledge(t, p)
            assert optimal.profit >= mechanical.profit - 1e-9

    def test_monotone_decreasing_extrema_stays_flat(self):
        p = np.linspace(10.0, 1.0, 40)
        m = bt.perfect_knowledge(extrema_targets(p, 3), p)
        assert m.profit == 0.0
        assert m.trades == 0


class TestMetricsAndSharpe:
    def test_alternating_returns_match_oracle(self):
        # +1% / -1% alternating: portfolio built by construction
        returns = np.tile([0.01, -0.01], 10)
        value = np.concatenate([[1.0], np.cumprod(1.0 + returns)])
        prices = value * 100.0
        log = bt.buy_and_hold_log(prices)
        m = bt.compute_metrics(log)
        oracle = sharpe_oracle(returns)
        assert abs(m.sharpe - oracle) < 1e-12
        assert abs(m.r_bar - np.mean(returns)) < 1e-15

    def test_twenty_fixed_vectors_match_oracle(self, rng):
        for _ in range(20):
            returns = rng.standard_normal(int(rng.integers(5, 200))) * 0.02
            value = np.concatenate([[1.0], np.cumprod(1.0 + returns)])
            m = bt.compute_metrics(bt.buy_and_hold_log(value * 50.0))
            oracle = sharpe_oracle(m.daily_returns if hasattr(m, "daily_returns")
                                   else returns)
            assert abs(m.sharpe - sharpe_oracle(returns)) < 1e-10

    def test_zero_variance_flags_undefined(self):
        # doubling prices give exactly-representable constant returns, so the
        # sample deviation is identically zero (1.01**t would leave 1e-17 noise)
        constant_up = 100.0 * 2.0 ** np.arange(10)
        m = bt.compute_metrics(bt.buy_and_hold_log(constant_up))
        assert m.sharpe is None
        assert m.sigma == 0.0

    def test_event_walk_value_identity(self, rng):
        # final value equals start * prod(exit/entry) * cost factors
        prices = np.exp(rng.standard_normal(60).cumsum() * 0.05) * 10
        probs = rng.random(59)
        cost = 0.002
        log = bt.simulate_binary_strategy(probs, 0.5, prices, cost=cost)
        value = 1.0
        entry = None
        for e in log.events:
            if e.action == "buy":
                entry = e.price
                value *= (1.0 - cost)
            else:
                value *= (e.price / entry) * (1.0 - cost)
        assert abs(value - log.final_value) < 1e-10

    def test_alternation_and_flat_termination(self, rng):
        prices = np.exp(rng.standard_normal(80).cumsum() * 0.05) * 10
        log = bt.simulate_binary_strategy(rng.random(79), 0.5, prices)
        actions = [e.action for e in log.events]
        assert actions[::2] == ["buy"] * len(actions[::2])
        assert actions[1::2] == ["sell"] * len(actions[1::2])
        assert len(actions) % 2 == 0  # ends flat

    def test_zero_cost_constant_prob_reproduces_buy_and_hold_metrics(self, rng):
        prices = np.exp(rng.standard_normal(50).cumsum() * 0.04) * 10
        strat = bt.compute_metrics(
            bt.simulate_binary_strategy(np.full(49, 0.9), 0.5, prices))
        bench = bt.buy_and_hold(prices)
        assert abs(strat.profit - bench.profit) < 1e-12
        assert abs(strat.sharpe - bench.sharpe) < 1e-12
        assert strat.trades == bench.trades


class TestTradeLogCsv:
    def test_schema_and_content(self, tmp_path, rng):
        prices = np.exp(rng.standard_normal(10).cumsum() * 0.05) * 10
        log = bt.simulate_binary_strategy(rng.random(9), 0.5, prices,
                                          dates=make_dates(10))
        path = tmp_path / "trades.csv"
        bt.save_trade_log(log, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "date,action,price,portfolio_value"
        assert len(lines) == 11
        assert lines[1].startswith("2018-01-01,buy,")
