"""Result artifacts: the per-fold metrics CSV and the profit-by-split report.

The report consumes one metrics CSV per model variant and renders, per CV
fold, the distribution of profits across variants (min/quartiles/max table
plus a violin/box SVG) alongside excess profit and Sharpe -- the view used
to judge whether performance persists across time splits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import DataError
from .pipeline import ExperimentResult

METRIC_FIELDS = ["profit", "excess_profit", "sharpe", "r_bar", "sigma",
                 "n_days", "trades", "auc", "accuracy", "tau",
                 "n_train_rows", "n_test_rows"]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_metrics_csv(result: ExperimentResult, target: str, family: str,
                      path: str | Path) -> None:
    """One row per fold plus the cross-fold mean row (fold = 'mean')."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "target", "family", "status", "reason"]
                        + METRIC_FIELDS)
        for f in result.folds:
            if f.failed:
                writer.writerow([f.fold, target, family, "failed", f.reason]
                                + [""] * len(METRIC_FIELDS))
                continue
            m = f.metrics
            writer.writerow([
                f.fold, target, family, "ok", "",
                _fmt(m.profit), _fmt(m.excess_profit), _fmt(m.sharpe),
                _fmt(m.r_bar), _fmt(m.sigma), _fmt(m.n_days), _fmt(m.trades),
                _fmt(f.auc), _fmt(f.acc), _fmt(f.tau),
                _fmt(f.n_train_rows), _fmt(f.n_test_rows),
            ])
        agg = result.aggregate
        writer.writerow([
            "mean", target, family, f"{result.n_failed} failed", "",
            _fmt(agg["profit"]), _fmt(agg["excess_profit"]), _fmt(agg["sharpe"]),
            "", "", "", _fmt(agg["trades"]), _fmt(agg["auc"]),
            _fmt(agg["accuracy"]), "", "", "",
        ])


@dataclass(frozen=True)
class VariantMetrics:
    """Per-fold metric rows of one model variant, as read back from CSV."""

    name: str
    folds: list[int]
    profit: list[float]
    excess_profit: list[float]
    sharpe: list[float | None]


def read_metrics_csv(path: str | Path, name: str | None = None) -> VariantMetrics:
    path = Path(path)
    if not path.exists():
        raise DataError(f"metrics file not found: {path}")
    folds, profit, excess, sharpe = [], [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"fold", "status", "profit", "excess_profit", "sharpe"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise DataError(f"{path}: not a metrics CSV")
        for row in reader:
            if row["fold"] == "mean" or row["status"] != "ok":
                continue
            folds.append(int(row["fold"]))
            profit.append(float(row["profit"]))
            excess.append(float(row["excess_profit"]))
            sharpe.append(float(row["sharpe"]) if row["sharpe"] else None)
    if not folds:
        raise DataError(f"{path}: no successful folds to report")
    return VariantMetrics(name or path.stem, folds, profit, excess, sharpe)


def fold_quantiles(values: list[float]) -> dict[str, float]:
    q = np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100],
                      method="linear")
    return {"min": float(q[0]), "q1": float(q[1]), "median": float(q[2]),
            "q3": float(q[3]), "max": float(q[4])}


def profit_by_split_report(variants: list[VariantMetrics],
                           out_dir: str | Path) -> None:
    """Write profit_by_split.csv, profit_by_split.svg and report.md."""
    if not variants:
        raise DataError("no variants to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fold_ids = sorted({f for v in variants for f in v.folds})

    def by_fold(variant: VariantMetrics, fold: int, series: list):
        lookup = dict(zip(variant.folds, series))
        return lookup.get(fold)

    with (out / "profit_by_split.csv").open("w", newline="",
                                            encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fold", "variant", "profit", "excess_profit", "sharpe"])
        for fold in fold_ids:
            for v in variants:
                p = by_fold(v, fold, v.profit)
                if p is None:
                    continue
                e = by_fold(v, fold, v.excess_profit)
                s = by_fold(v, fold, v.sharpe)
                writer.writerow([fold, v.name, repr(p), repr(e),
                                 "" if s is None else repr(s)])

    lines = ["# Profit by cross-validation split", "",
             f"Variants: {', '.join(v.name for v in variants)}", "",
             "## Per-fold profit distribution across variants", "",
             "| fold | n | min | q1 | median | q3 | max |",
             "| --- | --- | --- | --- | --- | --- | --- |"]
    distributions = []
    for fold in fold_ids:
        values = [by_fold(v, fold, v.profit) for v in variants]
        values = [x for x in values if x is not None]
        distributions.append(values)
        q = fold_quantiles(values)
        lines.append(
            f"| {fold} | {len(values)} | {q['min']:.6f} | {q['q1']:.6f} "
            f"| {q['median']:.6f} | {q['q3']:.6f} | {q['max']:.6f} |")
    lines += ["", "## Mean excess profit per fold", "",
              "| fold | mean excess profit | mean Sharpe |",
              "| --- | --- | --- |"]
    for fold in fold_ids:
        ex = [by_fold(v, fold, v.excess_profit) for v in variants]
        ex = [x for x in ex if x is not None]
        sh = [by_fold(v, fold, v.sharpe) for v in variants]
        sh = [x for x in sh if x is not None]
        sh_text = f"{np.mean(sh):.6f}" if sh else "n/a"
        lines.append(f"| {fold} | {np.mean(ex):.6f} | {sh_text} |")
    (out / "report.md").write_text("\n".join(lines) + "\n", encoding="utf-8")

    plt.rcParams["svg.hashsalt"] = "foresim"
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if all(len(d) > 1 for d in distributions):
        parts = ax.violinplot(distributions, positions=fold_ids,
                              showmedians=True, widths=0.8)
        for body in parts["bodies"]:
            body.set_alpha(0.6)
    box = ax.boxplot(distributions, positions=fold_ids, widths=0.25,
                     showfliers=False, medianprops={"color": "black"})
    del box
    ax.axhline(0.0, color="grey", linewidth=0.8, linestyle="--")
    ax.set_xlabel("cross-validation fold")
    ax.set_ylabel("profit (fraction of start value)")
    ax.set_title("Trading profit by cross-validation split")
    fig.tight_layout()
    fig.savefig(out / "profit_by_split.svg", format="svg",
                metadata={"Date": None})
    plt.close(fig)
