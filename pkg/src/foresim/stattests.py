"""Stationarity and heteroskedasticity tests with two-of-three voting.

Unit roots: augmented Dickey-Fuller (constant, AIC lag selection), plus
Phillips-Perron Z-tau and KPSS implemented here (statsmodels has no PP
test, and its KPSS warns un-suppressably from worker threads when the
statistic leaves the p-value table). Heteroskedasticity: White,
Breusch-Pagan, and Goldfeld-Quandt applied to the residuals of an
auxiliary regression on intercept + linear trend.

A column is treated as having a unit root unless at least two of the three
unit-root tests indicate stationarity, and as heteroskedastic unless at
least two of the three variance tests indicate homoskedasticity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from statsmodels.stats.diagnostic import (
    het_breuschpagan,
    het_goldfeldquandt,
    het_white,
)
from statsmodels.tsa.adfvalues import mackinnonp
from statsmodels.tsa.stattools import adfuller

from .errors import DataError

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test at a fixed significance level.

    `p_bracketed` flags p-values clamped to the bounds of a critical-value
    table (KPSS only); the verdict then comes from the statistic against the
    critical value rather than the clamped p.
    """

    name: str
    statistic: float
    p_value: float
    rejects_null: bool
    alpha: float
    p_bracketed: bool = False


def _as_clean_series(series, min_len: int, name: str) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DataError(f"{name}: expected 1-D series, got shape {x.shape}")
    if np.isnan(x).any():
        raise DataError(f"{name}: series contains missing values")
    if not np.isfinite(x).all():
        raise DataError(f"{name}: series contains non-finite values")
    if len(x) < min_len:
        raise DataError(f"{name}: series too short ({len(x)} < {min_len})")
    if np.ptp(x) == 0.0:
        raise DataError(f"{name}: series is constant")
    return x


def _bartlett_lags(n: int) -> int:
    # Newey-West bandwidth floor(4 * (n/100)^(2/9))
    return int(np.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def _bartlett_long_run_variance(e: np.ndarray, lags: int) -> float:
    n = len(e)
    lrv = float(e @ e) / n
    for j in range(1, lags + 1):
        w = 1.0 - j / (lags + 1.0)
        lrv += 2.0 * w * float(e[j:] @ e[:-j]) / n
    return lrv


def adf_test(series, max_lag: int = 14, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Augmented Dickey-Fuller test with constant; null = unit root.

    Lag order is chosen by AIC up to `max_lag`; the verdict uses MacKinnon
    p-values.
    """
    x = _as_clean_series(series, 20 + max_lag, "adf")
    stat, p, *_ = adfuller(x, maxlag=max_lag, regression="c", autolag="AIC")
    return TestResult("adf", float(stat), float(p), bool(p <= alpha), alpha)


def pp_test(series, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Phillips-Perron Z-tau test with constant; null = unit root.

    Serial correlation is absorbed by a Newey-West long-run variance with
    Bartlett weights at the floor(4*(n/100)^(2/9)) bandwidth; p-values come
    from the same MacKinnon surface as the ADF.
    """
    x = _as_clean_series(series, 25, "pp")
    y, ylag = x[1:], x[:-1]
    n = len(y)
    X = np.column_stack([np.ones(n), ylag])
    beta, res_ss, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < 2:
        raise DataError("pp: rank-deficient regression (constant series?)")
    u = y - X @ beta
    k = 2
    s2 = float(u @ u) / (n - k)
    xtx_inv = np.linalg.inv(X.T @ X)
    se_rho = float(np.sqrt(s2 * xtx_inv[1, 1]))
    if se_rho <= 0:
        raise DataError("pp: zero standard error in unit-root regression")
    rho = float(beta[1])

    gamma0 = float(u @ u) / n
    lam2 = max(_bartlett_long_run_variance(u, _bartlett_lags(n)), 1e-300)

    t_rho = (rho - 1.0) / se_rho
    stat = np.sqrt(gamma0 / lam2) * t_rho - 0.5 * (lam2 - gamma0) / np.sqrt(lam2) * (
        n * se_rho / np.sqrt(s2)
    )
    p = float(mackinnonp(stat, regression="c", N=1))
    return TestResult("pp", float(stat), p, bool(p <= alpha), alpha)


_KPSS_CRIT = {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739}
_KPSS_TABLE_STATS = (0.347, 0.463, 0.574, 0.739)
_KPSS_TABLE_PVALS = (0.10, 0.05, 0.025, 0.01)


def kpss_test(series, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """KPSS level-stationarity test; null = stationary (reversed polarity).

    rejects_null=True therefore means evidence of a unit root, which is the
    polarity the two-of-three vote needs. The asymptotic distribution is
    only tabulated for the 1%..10% tail, so out-of-table p-values are
    clamped and flagged.
    """
    if alpha not in _KPSS_CRIT:
        raise DataError(f"kpss: alpha must be one of {sorted(_KPSS_CRIT)}")
    x = _as_clean_series(series, 25, "kpss")
    n = len(x)
    e = x - x.mean()
    partial_sums = np.cumsum(e)
    lrv = _bartlett_long_run_variance(e, _bartlett_lags(n))
    if lrv <= 0:
        raise DataError("kpss: nonpositive long-run variance")
    stat = float(partial_sums @ partial_sums) / (n * n * lrv)
    p = float(np.interp(stat, _KPSS_TABLE_STATS, _KPSS_TABLE_PVALS))
    bracketed = bool(stat <= _KPSS_TABLE_STATS[0]
                     or stat >= _KPSS_TABLE_STATS[-1])
    rejects = bool(stat > _KPSS_CRIT[alpha])
    return TestResult("kpss", stat, p, rejects, alpha, bracketed)


def _trend_residuals(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(x)
    X = np.column_stack([np.ones(n), np.arange(n, dtype=float)])
    beta, *_ = np.linalg.lstsq(X, x, rcond=None)
    return x - X @ beta, X

def white_test(series, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """White LM test on intercept+trend residuals; null = homoskedastic."""
    x = _as_clean_series(series, 30, "white")
    resid, X = _trend_residuals(x)
    stat, p, *_ = het_white(resid, X)
    return TestResult("white", float(stat), float(p), bool(p <= alpha), alpha)


def breusch_pagan_test(series, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Breusch-Pagan LM test on intercept+trend residuals; null = homoskedastic."""
    x = _as_clean_series(series, 30, "breusch_pagan")
    resid, X = _trend_residuals(x)
    stat, p, *_ = het_breuschpagan(resid, X)
    return TestResult("breusch_pagan", float(stat), float(p), bool(p <= alpha), alpha)


def goldfeld_quandt_test(series, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Goldfeld-Quandt test (outer thirds, middle third dropped); null = homoskedastic."""
    x = _as_clean_series(series, 30, "goldfeld_quandt")
    n = len(x)
    X = np.column_stack([np.ones(n), np.arange(n, dtype=float)])
    stat, p, _ = het_goldfeldquandt(
        x, X, split=1.0 / 3.0, drop=1.0 / 3.0, alternative="two-sided"
    )
    return TestResult("goldfeld_quandt", float(stat), float(p), bool(p <= alpha), alpha)


def unit_root_vote(series, alpha: float = DEFAULT_ALPHA,
                   max_lag: int = 14) -> tuple[bool, tuple[TestResult, TestResult, TestResult]]:
    """Two-of-three unit-root vote over (ADF, PP, KPSS).

    Returns (has_unit_root, results). The series keeps its unit-root label
    unless at least two tests indicate stationarity.
    """
    results = (adf_test(series, max_lag, alpha), pp_test(series, alpha),
               kpss_test(series, alpha))
    # ADF/PP reject a unit-root null; KPSS rejects a stationarity null.
    stationary_votes = (
        results[0].rejects_null,
        results[1].rejects_null,
        not results[2].rejects_null,
    )
    return sum(stationary_votes) < 2, results


def het_vote(series, alpha: float = DEFAULT_ALPHA
             ) -> tuple[bool, tuple[TestResult, TestResult, TestResult]]:
    """Two-of-three heteroskedasticity vote over (White, BP, GQ).

    Returns (is_heteroskedastic, results): heteroskedastic unless at least
    two tests fail to reject homoskedasticity.
    """
    results = (white_test(series, alpha), breusch_pagan_test(series, alpha),
               goldfeld_quandt_test(series, alpha))
    homoskedastic_votes = tuple(not r.rejects_null for r in results)
    return sum(homoskedastic_votes) < 2, results
