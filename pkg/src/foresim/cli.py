"""Command-line interface.

Subcommands: validate, preprocess, select, label, backtest, cv, tune,
report. Exit codes: 0 success, 1 usage/config error, 2 data error,
3 numerical failure. Artifacts land under --out with fixed names
(metrics.csv, trades_<fold>.csv, selection.csv, report.md,
profit_by_split.svg, ...).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import granger as granger_mod
from . import panel as panel_io
from . import report as report_mod
from . import targets as targets_mod
from . import transforms
from .backtest import save_trade_log
from .config import load_config, load_experiment_panel, override
from .cv import make_cv_splits
from .errors import ConfigError, DataError, ForesimError, NumericalError
from .pipeline import ExperimentResult, PipelineSettings, run_cv, run_fold
from .tuning import SearchSpace, config_to_flat_text, save_trace, tune

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are exit code 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="foresim",
                     description="Forecasting and trading-backtest engine "
                                 "for daily panels.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="experiment TOML file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the experiment seed")
        p.add_argument("--out", default="out", help="artifact directory")
        p.add_argument("--cost", type=float, default=None,
                       help="proportional transaction cost per trade event")
        p.add_argument("--jobs", type=int, default=1,
                       help="concurrent fold/candidate evaluations")
        p.add_argument("--verbose", action="store_true")

    for name, desc in [
        ("validate", "check the panel file against the schema"),
        ("preprocess", "fit and apply column transforms, emit feature meta"),
        ("select", "run Granger feature selection, emit selection.csv"),
        ("label", "emit the configured target series as CSV"),
        ("backtest", "train/test once on the final chronological split"),
        ("cv", "run the full increasing-window cross-validation"),
        ("tune", "random-search hyperparameters on cross-fold profit"),
    ]:
        common(sub.add_parser(name, help=desc))

    rep = sub.add_parser("report", help="profit-by-split report from metrics CSVs")
    rep.add_argument("metrics", nargs="+", help="metrics.csv files, one per variant")
    rep.add_argument("--out", default="out")
    rep.add_argument("--verbose", action="store_true")
    return parser


def _load(args):
    config = load_config(args.config)
    config = override(config, seed=args.seed, cost=args.cost)
    base = Path(args.config).resolve().parent
    panel = load_experiment_panel(config, base_dir=base)
    return config, panel


def _cmd_validate(args) -> int:
    config, panel = _load(args)
    print(f"panel ok: {panel.n_rows} days "
          f"({panel.dates[0]}..{panel.dates[-1]}), "
          f"{len(panel.columns)} columns, price column "
          f"'{panel.price_column}'")
    missing = {c: int(np.isnan(v).sum()) for c, v in panel.columns.items()
               if np.isnan(v).sum()}
    if missing:
        print(f"leading missing cells after imputation: {missing}")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    config, panel = _load(args)
    out = Path(args.out)
    transformed, metas = transforms.fit_transforms(
        panel, config.settings.alpha, config.settings.max_diff,
        config.settings.max_lag)
    panel_io.save_panel(transformed, out / "panel_transformed.csv")
    transforms.save_feature_meta(metas, out / "feature_meta.csv")
    print(f"wrote {out / 'panel_transformed.csv'} and {out / 'feature_meta.csv'}")
    return EXIT_OK


def _cmd_select(args) -> int:
    config, panel = _load(args)
    s = config.settings
    out = Path(args.out)
    transformed, _ = transforms.fit_transforms(panel, s.alpha, s.max_diff,
                                               s.max_lag)
    target = targets_mod.build_target(transformed.prices(), s.target_kind,
                                      s.window)
    defined = np.flatnonzero(target.defined_mask)
    columns = {c: transformed.columns[c] for c in transformed.feature_columns}
    starts = [int(np.flatnonzero(np.isfinite(v))[0]) for v in columns.values()
              if np.isfinite(v).any()]
    lo = max([int(defined[0])] + starts)
    hi = int(defined[-1]) + 1
    selection = granger_mod.select_features(
        {c: v[lo:hi] for c, v in columns.items()},
        target.values[lo:hi], s.granger_mode, s.max_lag, s.own_lags,
        s.granger_alpha)
    granger_mod.save_selection(selection, out / "selection.csv")
    print(f"{len(selection.selected)} of {len(selection.p_values)} units "
          f"selected; wrote {out / 'selection.csv'}")
    return EXIT_OK


def _cmd_label(args) -> int:
    config, panel = _load(args)
    s = config.settings
    target = targets_mod.build_target(panel.prices(), s.target_kind, s.window)
    out = Path(args.out)
    targets_mod.save_target(target, panel.dates, out / "targets.csv")
    print(f"wrote {out / 'targets.csv'}")
    return EXIT_OK


def _run_and_write(config, panel, out: Path, jobs: int,
                   splits=None) -> ExperimentResult:
    s = config.settings
    if splits is None:
        result = run_cv(panel, s, config.model, jobs=jobs)
    else:
        folds = [run_fold(panel, s, config.model, sp) for sp in splits]
        from .pipeline import aggregate_reports
        result = ExperimentResult(
            make_cv_splits(panel.n_rows, s.k), tuple(folds),
            aggregate_reports(folds), sum(f.failed for f in folds))
    report_mod.write_metrics_csv(result, s.target_kind, config.model.family,
                                 out / "metrics.csv")
    for f in result.folds:
        if f.trade_log is not None:
            save_trade_log(f.trade_log, out / f"trades_{f.fold}.csv")
        if f.selection is not None:
            granger_mod.save_selection(f.selection, out / "selection.csv")
    return result


def _cmd_backtest(args) -> int:
    config, panel = _load(args)
    plan = make_cv_splits(panel.n_rows, config.settings.k)
    result = _run_and_write(config, panel, Path(args.out), args.jobs,
                            splits=[plan.splits[-1]])
    _print_summary(result)
    return EXIT_OK


def _cmd_cv(args) -> int:
    config, panel = _load(args)
    result = _run_and_write(config, panel, Path(args.out), args.jobs)
    _print_summary(result)
    print(f"leakage audit: {result.audit_fit_test_reads} test-range reads "
          f"during fit stages")
    return EXIT_OK


def _cmd_tune(args) -> int:
    config, panel = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    space = SearchSpace(config.model.family, config.iterations,
                        config.settings.seed, config.time_budget_s)
    result = tune(panel, config.settings, space, jobs=args.jobs)
    save_trace(result, out / "tuning_trace.csv")
    (out / "best_config.txt").write_text(config_to_flat_text(result.best),
                                         encoding="utf-8")
    print(f"best mean cross-fold profit {result.best_profit:.6f} after "
          f"{len(result.trace)} candidates; wrote "
          f"{out / 'tuning_trace.csv'} and {out / 'best_config.txt'}")
    return EXIT_OK


def _cmd_report(args) -> int:
    variants = [report_mod.read_metrics_csv(p) for p in args.metrics]
    report_mod.profit_by_split_report(variants, args.out)
    out = Path(args.out)
    print(f"wrote {out / 'report.md'}, {out / 'profit_by_split.csv'}, "
          f"{out / 'profit_by_split.svg'}")
    return EXIT_OK


def _print_summary(result: ExperimentResult) -> None:
    agg = result.aggregate

    def show(value):
        return "n/a" if value is None else f"{value:.6f}"

    for f in result.folds:
        if f.failed:
            print(f"fold {f.fold}: FAILED ({f.reason})")
        else:
            print(f"fold {f.fold}: profit {show(f.metrics.profit)} "
                  f"excess {show(f.metrics.excess_profit)} "
                  f"sharpe {show(f.metrics.sharpe)} "
                  f"auc {show(f.auc)} acc {show(f.acc)} "
                  f"trades {f.metrics.trades}")
    print(f"mean: profit {show(agg['profit'])} "
          f"excess {show(agg['excess_profit'])} sharpe {show(agg['sharpe'])} "
          f"auc {show(agg['auc'])} acc {show(agg['accuracy'])} "
          f"({result.n_failed} failed folds)")


_COMMANDS = {
    "validate": _cmd_validate,
    "preprocess": _cmd_preprocess,
    "select": _cmd_select,
    "label": _cmd_label,
    "backtest": _cmd_backtest,
    "cv": _cmd_cv,
    "tune": _cmd_tune,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s")
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ForesimError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
