"""foresim: forecasting and trading-backtest engine for daily panels."""

__version__ = "0.1.0"
