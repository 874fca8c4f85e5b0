"""Model configuration and the tuning search ranges.

The ranges pin down what the random search is allowed to sample per family:
ridge lambda 0.001..100; logistic lambda 0.0005..1000; MLP with 1-4 layers of
10..200 neurons each (tuned individually), activation/optimiser/scaling
menus, L2 0.0001..0.1, learning rate 0.001..0.1, 10..1000 epochs and batch
sizes {16, 32, 64, 128}. Solver tags outside the two implementations kept
per family alias to the nearest supported one with a logged notice.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from ..errors import ConfigError

logger = logging.getLogger(__name__)

FAMILIES = ("ridge", "logistic", "mlp")

RIDGE_SOLVERS = ("svd", "cholesky", "lsqr", "sparse_cg", "sag", "saga")
LOGISTIC_SOLVERS = ("lbfgs", "liblinear", "newton_cg", "newton_cholesky",
                    "sag", "saga")
MLP_ACTIVATIONS = ("identity", "logistic", "tanh", "relu")
MLP_OPTIMISERS = ("lbfgs", "sgd", "adam")
SCALINGS = ("none", "standardise", "minmax")
MLP_BATCH_SIZES = (16, 32, 64, 128)

_RIDGE_SOLVER_ALIASES = {"svd": "svd", "cholesky": "cholesky",
                         "sparse_cg": "cg", "lsqr": "cg", "sag": "cg",
                         "saga": "cg"}
_LOGISTIC_SOLVER_ALIASES = {"lbfgs": "lbfgs", "newton_cg": "newton",
                            "newton_cholesky": "newton", "liblinear": "lbfgs",
                            "sag": "lbfgs", "saga": "lbfgs"}


@dataclass(frozen=True)
class SearchRanges:
    """Numeric bounds for the hyperparameter search, per family."""

    ridge_lambda: tuple[float, float] = (0.001, 100.0)
    logistic_lambda: tuple[float, float] = (0.0005, 1000.0)
    mlp_layers: tuple[int, int] = (1, 4)
    mlp_layer_size: tuple[int, int] = (10, 200)
    mlp_l2: tuple[float, float] = (0.0001, 0.1)
    mlp_learning_rate: tuple[float, float] = (0.001, 0.1)
    mlp_epochs: tuple[int, int] = (10, 1000)


RANGES = SearchRanges()


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters for one model instance. Unused families' fields are
    ignored but still validated when the family is active."""

    family: str = "logistic"
    seed: int = 0
    scaling: str = "none"
    ridge_lambda: float = 1.0
    ridge_solver: str = "svd"
    logistic_lambda: float = 1.0
    logistic_solver: str = "lbfgs"
    mlp_layers: tuple[int, ...] = (64,)
    mlp_activation: str = "relu"
    mlp_optimiser: str = "adam"
    mlp_l2: float = 0.001
    mlp_learning_rate: float = 0.01
    mlp_epochs: int = 100
    mlp_batch_size: int = 32

    def validate(self, ranges: SearchRanges = RANGES) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown model family '{self.family}'")
        if self.scaling not in SCALINGS:
            raise ConfigError(f"unknown scaling '{self.scaling}'")
        if self.family == "ridge":
            _check_range("ridge_lambda", self.ridge_lambda, ranges.ridge_lambda)
            _check_menu("ridge_solver", self.ridge_solver, RIDGE_SOLVERS)
        elif self.family == "logistic":
            _check_range("logistic_lambda", self.logistic_lambda,
                         ranges.logistic_lambda)
            _check_menu("logistic_solver", self.logistic_solver, LOGISTIC_SOLVERS)
        else:
            n_layers = len(self.mlp_layers)
            _check_range("number of MLP layers", n_layers, ranges.mlp_layers)
            for size in self.mlp_layers:
                _check_range("MLP layer size", size, ranges.mlp_layer_size)
            _check_menu("mlp_activation", self.mlp_activation, MLP_ACTIVATIONS)
            _check_menu("mlp_optimiser", self.mlp_optimiser, MLP_OPTIMISERS)
            _check_range("mlp_l2", self.mlp_l2, ranges.mlp_l2)
            _check_range("mlp_learning_rate", self.mlp_learning_rate,
                         ranges.mlp_learning_rate)
            _check_range("mlp_epochs", self.mlp_epochs, ranges.mlp_epochs)
            _check_menu("mlp_batch_size", self.mlp_batch_size, MLP_BATCH_SIZES)

    def with_seed(self, seed: int) -> "ModelConfig":
        return replace(self, seed=seed)


def _check_range(name, value, bounds):
    lo, hi = bounds
    if not (lo <= value <= hi):
        raise ConfigError(f"{name}={value} outside allowed range [{lo}, {hi}]")


def _check_menu(name, value, menu):
    if value not in menu:
        raise ConfigError(f"{name}='{value}' not one of {menu}")


def resolve_ridge_solver(tag: str) -> str:
    solver = _RIDGE_SOLVER_ALIASES[tag]
    if solver == "cg" and tag != "sparse_cg":
        logger.info("ridge solver '%s' aliased to conjugate gradient", tag)
    return solver


def resolve_logistic_solver(tag: str) -> str:
    solver = _LOGISTIC_SOLVER_ALIASES[tag]
    if tag in ("liblinear", "sag", "saga"):
        logger.info("logistic solver '%s' aliased to L-BFGS", tag)
    return solver
