"""Experiment definition: a single TOML file drives every CLI subcommand.

Sections: [data] paths and column roles, [features] the with/without-NLP
variant switch, [preprocess]/[granger]/[target]/[cv]/[model]/[backtest]
pipeline knobs, [search] the tuning budget. Unknown keys are errors -- a
typo silently falling back to a default would un-pin the experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import panel as panel_io
from .errors import ConfigError
from .models import ModelConfig
from .panel import ROLE_NLP, Panel
from .pipeline import PipelineSettings
from .targets import KIND_EXTREMA

NLP_COLUMN_SUFFIX = "_score"


@dataclass(frozen=True)
class ExperimentConfig:
    panel_path: str
    price_column: str
    exclusions_path: str | None
    nlp_columns: tuple[str, ...] | None  # None: autodetect by suffix
    use_nlp: bool
    settings: PipelineSettings
    model: ModelConfig
    iterations: int = 200
    time_budget_s: float | None = None


def _section(raw: dict, name: str, allowed: set[str]) -> dict:
    section = raw.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return section


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    top_unknown = set(raw) - {"seed", "data", "features", "preprocess",
                              "granger", "target", "cv", "model", "backtest",
                              "search"}
    if top_unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(top_unknown)}")

    data = _section(raw, "data", {"panel", "price_column", "exclusions",
                                  "nlp_columns"})
    if "panel" not in data or "price_column" not in data:
        raise ConfigError("[data] needs 'panel' and 'price_column'")
    features = _section(raw, "features", {"use_nlp"})
    pre = _section(raw, "preprocess", {"alpha", "max_diff"})
    gr = _section(raw, "granger", {"mode", "max_lag", "own_lags", "alpha"})
    target = _section(raw, "target", {"kind", "window"})
    cv = _section(raw, "cv", {"k"})
    model_raw = _section(raw, "model", {
        "family", "scaling", "ridge_lambda", "ridge_solver", "logistic_lambda",
        "logistic_solver", "mlp_layers", "mlp_activation", "mlp_optimiser",
        "mlp_l2", "mlp_learning_rate", "mlp_epochs", "mlp_batch_size"})
    back = _section(raw, "backtest", {"cost"})
    search = _section(raw, "search", {"iterations", "time_budget_s"})

    kind = target.get("kind", "binary_updown")
    window = target.get("window")
    if kind == KIND_EXTREMA and window is None:
        raise ConfigError("[target] extrema_pair needs a 'window'")

    seed = int(raw.get("seed", 0))
    settings = PipelineSettings(
        target_kind=kind,
        window=None if window is None else int(window),
        alpha=float(pre.get("alpha", 0.05)),
        max_diff=int(pre.get("max_diff", 2)),
        granger_mode=gr.get("mode", "per_lag"),
        max_lag=int(gr.get("max_lag", 14)),
        own_lags=int(gr.get("own_lags", 14)),
        granger_alpha=float(gr.get("alpha", 0.05)),
        cost=float(back.get("cost", 0.0)),
        k=int(cv.get("k", 7)),
        seed=seed,
    )
    if not (0.0 <= settings.cost < 1.0):
        raise ConfigError(f"cost must be in [0, 1), got {settings.cost}")

    model_kwargs = dict(model_raw)
    if "mlp_layers" in model_kwargs:
        model_kwargs["mlp_layers"] = tuple(int(s) for s in
                                           model_kwargs["mlp_layers"])
    try:
        model = ModelConfig(seed=seed, **model_kwargs)
    except TypeError as exc:
        raise ConfigError(f"[model]: {exc}") from None
    model.validate()

    nlp_cols = data.get("nlp_columns")
    return ExperimentConfig(
        panel_path=str(data["panel"]),
        price_column=str(data["price_column"]),
        exclusions_path=(str(data["exclusions"])
                         if "exclusions" in data else None),
        nlp_columns=None if nlp_cols is None else tuple(map(str, nlp_cols)),
        use_nlp=bool(features.get("use_nlp", True)),
        settings=settings,
        model=model,
        iterations=int(search.get("iterations", 200)),
        time_budget_s=(float(search["time_budget_s"])
                       if "time_budget_s" in search else None),
    )


def override(config: ExperimentConfig, seed: int | None = None,
             cost: float | None = None) -> ExperimentConfig:
    """Apply CLI flag overrides on top of the file configuration."""
    settings = config.settings
    model = config.model
    if seed is not None:
        settings = replace(settings, seed=seed)
        model = model.with_seed(seed)
    if cost is not None:
        if not (0.0 <= cost < 1.0):
            raise ConfigError(f"cost must be in [0, 1), got {cost}")
        settings = replace(settings, cost=cost)
    return replace(config, settings=settings, model=model)


def load_experiment_panel(config: ExperimentConfig,
                          base_dir: Path | None = None) -> Panel:
    """Load, exclude, and impute the panel; drop NLP columns when the
    experiment variant runs without them."""
    base = Path(base_dir) if base_dir is not None else Path(".")

    def resolve(p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else base / path

    if config.nlp_columns is not None:
        nlp = config.nlp_columns
        loaded = panel_io.load_panel(resolve(config.panel_path),
                                     config.price_column, nlp)
    else:
        loaded = panel_io.load_panel(resolve(config.panel_path),
                                     config.price_column)
        autodetected = tuple(c for c in loaded.feature_columns
                             if c.endswith(NLP_COLUMN_SUFFIX))
        if autodetected:
            loaded = panel_io.load_panel(resolve(config.panel_path),
                                         config.price_column, autodetected)
    if config.exclusions_path is not None:
        excl = panel_io.load_exclusions(resolve(config.exclusions_path))
        loaded = panel_io.apply_exclusions(loaded, excl)
    loaded = panel_io.impute_forward(loaded)
    if not config.use_nlp:
        keep = {c: v for c, v in loaded.columns.items()
                if loaded.roles[c] != ROLE_NLP}
        roles = {c: r for c, r in loaded.roles.items() if c in keep}
        loaded = Panel(loaded.dates, keep, roles)
    return loaded
