"""Trainable predictors (ridge, logistic, MLP) and classification metrics."""

from .config import ModelConfig, SearchRanges  # noqa: F401
from .logistic import LogisticModel, logistic_fit, logistic_predict_proba  # noqa: F401
from .metrics import (  # noqa: F401
    DEFAULT_THRESHOLD_GRID,
    accuracy,
    auc_roc,
    threshold_search,
)
from .mlp import MLP  # noqa: F401
from .ridge import RidgeModel, ridge_fit, ridge_predict  # noqa: F401
from .serialize import load_model, save_model  # noqa: F401
