"""Forecast evaluation under nested information sets."""

from ._core import (
    ConfigError,
    DataError,
    DegenerateVarianceError,
    DmTestResult,
    GarchParams,
    __version__,
    backtest,
    dm_test,
    expectile_score,
    fit_garch,
    garch_preset,
    mean_sstar,
    mixture_demo,
    quantile_score_sstar,
    run_experiment,
    simulate_dcc,
    simulate_garch,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateVarianceError",
    "DmTestResult",
    "GarchParams",
    "backtest",
    "dm_test",
    "expectile_score",
    "fit_garch",
    "garch_preset",
    "mean_sstar",
    "mixture_demo",
    "quantile_score_sstar",
    "run_experiment",
    "simulate_dcc",
    "simulate_garch",
]
