"""Per-fold training/evaluation pipeline with a built-in leakage audit.

Everything fitted -- transform decisions, Granger selection, scaler, class
weights, model parameters, probability threshold -- consumes training-range
rows only, re-fitted per fold. Every row read goes through the audit choke
point; a fit-stage read that touches the test range raises immediately, so
a finished run certifies zero test-range reads before simulation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import backtest as bt
from . import design, granger, targets, transforms
from .cv import CvPlan, FoldSplit, make_cv_splits
from .errors import ConfigError, DataError, ForesimError, LeakageError
from .models import (
    DEFAULT_THRESHOLD_GRID,
    MLP,
    ModelConfig,
    accuracy,
    auc_roc,
    logistic_fit,
    logistic_predict_proba,
    ridge_fit,
    ridge_predict,
)
from .panel import Panel

logger = logging.getLogger(__name__)

FIT_STAGES = frozenset({
    "fit_transforms", "targets_train", "granger", "design_train",
    "scaler", "class_weights", "model_fit", "threshold",
})
PREDICT_STAGES = frozenset({"apply_transforms", "design_test", "evaluate",
                            "simulate"})


@dataclass
class FoldAudit:
    """Row-access ledger for one fold."""

    test_start: int
    test_end: int
    events: list[tuple[str, int, int]] = field(default_factory=list)
    fit_closed: bool = False

    def read(self, stage: str, lo: int, hi: int) -> None:
        if stage not in FIT_STAGES and stage not in PREDICT_STAGES:
            raise LeakageError(f"unknown audit stage '{stage}'")
        self.events.append((stage, lo, hi))
        if stage in FIT_STAGES:
            if self.fit_closed:
                raise LeakageError(f"fit-stage read ('{stage}') after fitting closed")
            if hi > self.test_start:
                raise LeakageError(
                    f"fit stage '{stage}' read rows [{lo}, {hi}) crossing "
                    f"test start {self.test_start}"
                )

    def close_fit(self) -> None:
        self.fit_closed = True

    @property
    def fit_test_reads(self) -> int:
        return sum(1 for stage, _, hi in self.events
                   if stage in FIT_STAGES and hi > self.test_start)


@dataclass(frozen=True)
class FoldReport:
    fold: int
    train: tuple[int, int]
    test: tuple[int, int]
    config: ModelConfig
    failed: bool = False
    reason: str = ""
    metrics: bt.BacktestMetrics | None = None
    benchmark: bt.BacktestMetrics | None = None
    auc: float | None = None
    acc: float | None = None
    tau: float | None = None
    n_train_rows: int = 0
    n_test_rows: int = 0
    trade_log: bt.TradeLog | None = None
    selection: granger.LagSelection | None = None
    audit: FoldAudit | None = None


@dataclass(frozen=True)
class PipelineSettings:
    """Everything run_fold needs besides the panel and the split."""

    target_kind: str
    window: int | None = None
    alpha: float = 0.05
    max_diff: int = 2
    granger_mode: str = "per_lag"
    max_lag: int = 14
    own_lags: int = 14
    granger_alpha: float = 0.05
    cost: float = 0.0
    k: int = 7
    seed: int = 0


def fold_seed(seed: int, fold_index: int) -> int:
    """Stable per-fold model seed derived from the experiment seed."""
    return int(np.random.SeedSequence(seed, spawn_key=(fold_index,))
               .generate_state(1)[0])


def _fit_classifier(config: ModelConfig, X, y, weights, seed: int):
    """Returns (predict_proba: X -> probs in [0,1])."""
    if config.family == "logistic":
        model = logistic_fit(X, y, config.logistic_lambda, weights,
                             solver=config.logistic_solver)
        return model, lambda Z: logistic_predict_proba(model, Z)
    if config.family == "mlp":
        net = MLP(config.mlp_layers, config.mlp_activation, "classification",
                  config.mlp_l2, config.mlp_learning_rate, config.mlp_optimiser,
                  config.mlp_epochs, config.mlp_batch_size, seed)
        net.fit(X, y, targets.sample_weights(y, weights))
        return net, net.predict
    raise ConfigError(f"family '{config.family}' cannot classify")


def _fit_regressor(config: ModelConfig, X, y, seed: int):
    if config.family == "ridge":
        model = ridge_fit(X, y, config.ridge_lambda, solver=config.ridge_solver)
        return model, lambda Z: ridge_predict(model, Z)
    if config.family == "mlp":
        net = MLP(config.mlp_layers, config.mlp_activation, "regression",
                  config.mlp_l2, config.mlp_learning_rate, config.mlp_optimiser,
                  config.mlp_epochs, config.mlp_batch_size, seed)
        net.fit(X, y)
        return net, net.predict
    raise ConfigError(f"family '{config.family}' cannot regress")


class _FoldRunner:
    """One fold of the pipeline. All panel rows flow through take()."""

    def __init__(self, panel: Panel, settings: PipelineSettings,
                 config: ModelConfig, split: FoldSplit):
        self.panel = panel
        self.s = settings
        self.config = config
        self.split = split
        self.audit = FoldAudit(split.test[0], split.test[1])

    def take(self, stage: str, column: str, lo: int, hi: int) -> np.ndarray:
        self.audit.read(stage, lo, hi)
        return self.panel.columns[column][lo:hi]

    # -- fit phase -----------------------------------------------------------

    def _fit_transforms(self) -> dict[str, transforms.FeatureMeta]:
        ts = self.split.test[0]
        metas = {}
        for column in self.panel.feature_columns:
            series = self.take("fit_transforms", column, 0, ts)
            _, meta = transforms.fit_column_transform(
                series, column, self.s.alpha, self.s.max_diff, self.s.max_lag)
            metas[column] = meta
        price = self.panel.price_column
        name = f"{price}_transformed"
        if name not in self.panel.columns:
            series = self.take("fit_transforms", price, 0, ts)
            _, metas[name] = transforms.fit_column_transform(
                series, name, self.s.alpha, self.s.max_diff, self.s.max_lag)
        return metas

    def _train_target(self) -> targets.TargetSeries:
        ts = self.split.test[0]
        prices = self.take("targets_train", self.panel.price_column, 0, ts)
        return targets.build_target(prices, self.s.target_kind, self.s.window)

    def _transformed_columns(self, stage: str, hi: int,
                             metas: dict) -> dict[str, np.ndarray]:
        out = {}
        for column, meta in metas.items():
            source = (self.panel.price_column
                      if column.endswith("_transformed") else column)
            raw = self.take(stage, source, 0, hi)
            out[column] = transforms.apply_column_transform(raw, meta)
        return out

    def _select(self, columns: dict[str, np.ndarray],
                label_values: np.ndarray,
                label_mask: np.ndarray) -> granger.LagSelection:
        defined = np.flatnonzero(label_mask)
        if defined.size == 0:
            raise DataError("no defined training labels for Granger selection")
        lo, hi = int(defined[0]), int(defined[-1]) + 1
        starts = [int(np.flatnonzero(np.isfinite(v))[0]) if np.isfinite(v).any()
                  else hi for v in columns.values()]
        lo = max([lo] + starts)
        if hi - lo <= self.s.own_lags + self.s.max_lag + 10:
            raise DataError("training range too short for Granger selection")
        self.audit.read("granger", lo, hi)
        sliced = {c: v[lo:hi] for c, v in columns.items()}
        return granger.select_features(
            sliced, label_values[lo:hi], self.s.granger_mode,
            self.s.max_lag, self.s.own_lags, self.s.granger_alpha)

    # -- run -----------------------------------------------------------------

    def run(self) -> FoldReport:
        s, split, config = self.s, self.split, self.config
        (tr_lo, tr_hi), (te_lo, te_hi) = split.train, split.test
        metas = self._fit_transforms()
        train_target = self._train_target()
        train_cols = self._transformed_columns("fit_transforms", tr_hi, metas)

        is_extrema = s.target_kind == targets.KIND_EXTREMA
        heads: list[dict] = []  # one per classifier head (two for extrema)
        if is_extrema:
            label_sets = [("min", train_target.is_min),
                          ("max", train_target.is_max)]
        elif s.target_kind == targets.KIND_BINARY:
            label_sets = [("updown", train_target.values)]
        else:
            label_sets = [("return", train_target.values)]

        train_probs_all, train_labels_all = [], []
        n_train_rows = 0
        for name, label_values in label_sets:
            selection = self._select(train_cols, label_values,
                                     train_target.defined_mask)
            pairs = design.feature_pairs(selection.selected, s.own_lags)
            self.audit.read("design_train", 0, tr_hi)
            train_design, y_train = design.assemble(
                train_cols, label_values, pairs, (0, tr_hi),
                train_target.defined_mask)
            n_train_rows = len(y_train)
            self.audit.read("scaler", 0, tr_hi)
            scaler = design.fit_scaler(train_design.X, config.scaling)
            X_train = scaler.transform(train_design.X)

            seed = fold_seed(s.seed, split.index)
            if s.target_kind == targets.KIND_CONTINUOUS:
                self.audit.read("model_fit", 0, tr_hi)
                _, predict = _fit_regressor(config, X_train, y_train, seed)
            else:
                if y_train.min() == y_train.max():
                    raise DataError(
                        f"single-class training labels for head '{name}'")
                weights = None
                if is_extrema:
                    self.audit.read("class_weights", 0, tr_hi)
                    weights = targets.class_weights(y_train)
                self.audit.read("model_fit", 0, tr_hi)
                _, predict = _fit_classifier(config, X_train, y_train,
                                             weights, seed)
                train_probs_all.append(predict(X_train))
                train_labels_all.append(y_train)
            heads.append(dict(name=name, predict=predict, scaler=scaler,
                              pairs=pairs, selection=selection))

        tau = None
        if s.target_kind != targets.KIND_CONTINUOUS:
            # one shared threshold maximising the heads' mean accuracy,
            # fitted on training predictions only
            self.audit.read("threshold", 0, tr_hi)
            grid = DEFAULT_THRESHOLD_GRID
            acc_rows = [
                np.mean((p[None, :] > grid[:, None]) == y[None, :], axis=1)
                for p, y in zip(train_probs_all, train_labels_all)
            ]
            tau = float(grid[int(np.argmax(np.mean(acc_rows, axis=0)))])

        self.audit.close_fit()

        # -- predict phase ---------------------------------------------------
        full_cols = self._transformed_columns("apply_transforms", te_hi, metas)
        self.audit.read("evaluate", 0, len(self.panel.dates))
        full_prices = self.panel.prices()
        full_target = targets.build_target(full_prices, s.target_kind, s.window)

        signal_rows = (np.arange(te_lo + 1, te_hi) if is_extrema
                       else np.arange(te_lo, te_hi - 1))
        head_probs, aucs, accs = {}, [], []
        for head in heads:
            label_values = (full_target.is_min if head["name"] == "min" else
                            full_target.is_max if head["name"] == "max" else
                            full_target.values)
            self.audit.read("design_test", 0, te_hi)
            test_design, _ = design.assemble(
                full_cols, label_values[:te_hi], head["pairs"],
                (int(signal_rows[0]), int(signal_rows[-1]) + 1),
                require_labels=False)
            if len(test_design.rows) != len(signal_rows):
                raise DataError("missing feature rows in the test range")
            preds = head["predict"](head["scaler"].transform(test_design.X))
            head_probs[head["name"]] = preds

            defined = full_target.defined_mask[signal_rows]
            y_true = label_values[signal_rows]
            if s.target_kind == targets.KIND_CONTINUOUS:
                updown = (y_true[defined] > 0).astype(float)
                point = preds[defined]
                if defined.any() and 0.0 < updown.mean() < 1.0:
                    aucs.append(auc_roc(point, updown))
                    accs.append(accuracy((point > 0).astype(float), updown))
            else:
                yd = y_true[defined]
                if defined.any():
                    if 0.0 < yd.mean() < 1.0:
                        aucs.append(auc_roc(preds[defined], yd))
                    accs.append(accuracy((preds[defined] > tau).astype(float), yd))

        # -- simulate ---------------------------------------------------------
        self.audit.read("simulate", te_lo, te_hi)
        test_prices = full_prices[te_lo:te_hi]
        test_dates = self.panel.dates[te_lo:te_hi]
        if s.target_kind == targets.KIND_CONTINUOUS:
            log = bt.simulate_regression_strategy(
                head_probs["return"], test_prices, s.cost, test_dates)
        elif s.target_kind == targets.KIND_BINARY:
            log = bt.simulate_binary_strategy(
                head_probs["updown"], tau, test_prices, s.cost, test_dates)
        else:
            log = bt.simulate_extrema_strategy(
                head_probs["min"], head_probs["max"], tau, test_prices,
                s.cost, test_dates)
        benchmark = bt.buy_and_hold(test_prices, s.cost)
        metrics = bt.compute_metrics(log, benchmark.profit)

        return FoldReport(
            fold=split.index, train=split.train, test=split.test, config=config,
            metrics=metrics, benchmark=benchmark,
            auc=float(np.mean(aucs)) if aucs else None,
            acc=float(np.mean(accs)) if accs else None,
            tau=tau,
            n_train_rows=n_train_rows,
            n_test_rows=len(signal_rows),
            trade_log=log,
            selection=heads[0]["selection"],
            audit=self.audit,
        )


def run_fold(panel: Panel, settings: PipelineSettings, config: ModelConfig,
             split: FoldSplit) -> FoldReport:
    """Run one fold; pipeline failures (degenerate labels, short ranges)
    come back as failed reports, leakage violations always raise."""
    runner = _FoldRunner(panel, settings, config, split)
    try:
        return runner.run()
    except LeakageError:
        raise
    except ForesimError as exc:
        logger.warning("fold %d failed: %s", split.index, exc)
        return FoldReport(fold=split.index, train=split.train, test=split.test,
                          config=config, failed=True, reason=str(exc),
                          audit=runner.audit)


@dataclass(frozen=True)
class ExperimentResult:
    plan: CvPlan
    folds: tuple[FoldReport, ...]
    aggregate: dict[str, float | None]
    n_failed: int

    @property
    def audit_fit_test_reads(self) -> int:
        return sum(f.audit.fit_test_reads for f in self.folds
                   if f.audit is not None)


def aggregate_reports(folds) -> dict[str, float | None]:
    """Arithmetic means over successful folds; None-valued metrics (undefined
    Sharpe, single-class AUC) are averaged over folds where they exist."""
    ok = [f for f in folds if not f.failed]
    if not ok:
        return {"profit": None, "excess_profit": None, "sharpe": None,
                "auc": None, "accuracy": None, "trades": None}

    def mean_of(values):
        values = [v for v in values if v is not None]
        return float(np.mean(values)) if values else None

    return {
        "profit": mean_of([f.metrics.profit for f in ok]),
        "excess_profit": mean_of([f.metrics.excess_profit for f in ok]),
        "sharpe": mean_of([f.metrics.sharpe for f in ok]),
        "auc": mean_of([f.auc for f in ok]),
        "accuracy": mean_of([f.acc for f in ok]),
        "trades": mean_of([f.metrics.trades for f in ok]),
    }


def run_cv(panel: Panel, settings: PipelineSettings, config: ModelConfig,
           jobs: int = 1) -> ExperimentResult:
    """Run every fold of the increasing-window plan and aggregate."""
    plan = make_cv_splits(panel.n_rows, settings.k)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(
                lambda sp: run_fold(panel, settings, config, sp), plan.splits))
    else:
        folds = [run_fold(panel, settings, config, sp) for sp in plan.splits]
    n_failed = sum(f.failed for f in folds)
    if n_failed:
        logger.warning("%d of %d folds failed and are excluded from aggregates",
                       n_failed, len(folds))
    return ExperimentResult(plan, tuple(folds), aggregate_reports(folds),
                            n_failed)
