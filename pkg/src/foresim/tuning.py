"""Seeded random hyperparameter search with trading profit as the objective.

Candidates are drawn up-front from one seeded generator (so the trajectory
is independent of how many workers evaluate them), each is scored by the
mean cross-fold profit of a full CV run, and the argmax wins. Scale
parameters (regularisation strength, learning rate) sample log-uniformly,
menus and integer counts uniformly, all within the published search ranges.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalError
from .models.config import (
    MLP_ACTIVATIONS,
    MLP_BATCH_SIZES,
    MLP_OPTIMISERS,
    LOGISTIC_SOLVERS,
    RANGES,
    RIDGE_SOLVERS,
    SCALINGS,
    ModelConfig,
    SearchRanges,
)
from .panel import Panel
from .pipeline import PipelineSettings, run_cv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchSpace:
    family: str
    iterations: int = 200
    seed: int = 0
    time_budget_s: float | None = None
    ranges: SearchRanges = field(default_factory=lambda: RANGES)

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("search needs at least one iteration")


def _log_uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def sample_config(space: SearchSpace, rng: np.random.Generator,
                  seed: int) -> ModelConfig:
    r = space.ranges
    if space.family == "ridge":
        config = ModelConfig(
            family="ridge", seed=seed,
            ridge_lambda=_log_uniform(rng, r.ridge_lambda),
            ridge_solver=str(rng.choice(RIDGE_SOLVERS)),
        )
    elif space.family == "logistic":
        config = ModelConfig(
            family="logistic", seed=seed,
            logistic_lambda=_log_uniform(rng, r.logistic_lambda),
            logistic_solver=str(rng.choice(LOGISTIC_SOLVERS)),
        )
    elif space.family == "mlp":
        n_layers = int(rng.integers(r.mlp_layers[0], r.mlp_layers[1] + 1))
        layers = tuple(
            int(rng.integers(r.mlp_layer_size[0], r.mlp_layer_size[1] + 1))
            for _ in range(n_layers))
        config = ModelConfig(
            family="mlp", seed=seed,
            scaling=str(rng.choice(SCALINGS)),
            mlp_layers=layers,
            mlp_activation=str(rng.choice(MLP_ACTIVATIONS)),
            mlp_optimiser=str(rng.choice(MLP_OPTIMISERS)),
            mlp_l2=_log_uniform(rng, r.mlp_l2),
            mlp_learning_rate=_log_uniform(rng, r.mlp_learning_rate),
            mlp_epochs=int(rng.integers(r.mlp_epochs[0], r.mlp_epochs[1] + 1)),
            mlp_batch_size=int(rng.choice(MLP_BATCH_SIZES)),
        )
    else:
        raise ConfigError(f"cannot sample family '{space.family}'")
    config.validate(space.ranges)
    return config


@dataclass(frozen=True)
class TuneTraceEntry:
    iteration: int
    config: ModelConfig
    mean_profit: float | None
    n_failed_folds: int


@dataclass(frozen=True)
class TuneResult:
    best: ModelConfig
    best_profit: float
    trace: tuple[TuneTraceEntry, ...]


def tune(panel: Panel, settings: PipelineSettings, space: SearchSpace,
         candidates: list[ModelConfig] | None = None,
         jobs: int = 1) -> TuneResult:
    """Search the space; returns the config with the highest mean cross-fold
    profit plus the full evaluation trace. Candidates with no successful
    folds score None; if every candidate fails, that's a numerical error."""
    if candidates is None:
        rng = np.random.default_rng(space.seed)
        candidates = [sample_config(space, rng, seed=settings.seed)
                      for _ in range(space.iterations)]
    started = time.monotonic()
    trace: list[TuneTraceEntry] = []
    best: tuple[float, int] | None = None  # (profit, iteration)
    for i, config in enumerate(candidates):
        if (space.time_budget_s is not None and trace
                and time.monotonic() - started > space.time_budget_s):
            logger.warning("time budget exhausted after %d candidates", i)
            break
        result = run_cv(panel, settings, config, jobs=jobs)
        profit = result.aggregate["profit"]
        trace.append(TuneTraceEntry(i, config, profit, result.n_failed))
        if profit is not None and (best is None or profit > best[0]):
            best = (profit, i)
    if best is None:
        raise NumericalError("hyperparameter search produced no successful "
                             "candidate")
    return TuneResult(candidates[best[1]], best[0], tuple(trace))


def config_to_flat_text(config: ModelConfig) -> str:
    """Flat key = value lines, the format used inside experiment configs."""
    lines = [f'family = "{config.family}"', f"seed = {config.seed}",
             f'scaling = "{config.scaling}"']
    if config.family == "ridge":
        lines += [f"ridge_lambda = {config.ridge_lambda!r}",
                  f'ridge_solver = "{config.ridge_solver}"']
    elif config.family == "logistic":
        lines += [f"logistic_lambda = {config.logistic_lambda!r}",
                  f'logistic_solver = "{config.logistic_solver}"']
    else:
        lines += [
            f"mlp_layers = [{', '.join(str(s) for s in config.mlp_layers)}]",
            f'mlp_activation = "{config.mlp_activation}"',
            f'mlp_optimiser = "{config.mlp_optimiser}"',
            f"mlp_l2 = {config.mlp_l2!r}",
            f"mlp_learning_rate = {config.mlp_learning_rate!r}",
            f"mlp_epochs = {config.mlp_epochs}",
            f"mlp_batch_size = {config.mlp_batch_size}",
        ]
    return "\n".join(lines) + "\n"


def save_trace(result: TuneResult, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "mean_profit", "n_failed_folds", "config"])
        for entry in result.trace:
            flat = config_to_flat_text(entry.config).replace("\n", "; ").rstrip("; ")
            writer.writerow([
                entry.iteration,
                "" if entry.mean_profit is None else repr(entry.mean_profit),
                entry.n_failed_folds,
                flat,
            ])
