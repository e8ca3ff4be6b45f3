from __future__ import annotations

from green_dc.forecast.knn import (
    ApeStats,
    ForecastConfig,
    SolarForecaster,
    SolarSample,
    ape_stats,
    build_samples,
    forecast_next,
    forecast_series,
    knn_weights,
)


__all__ = [
    "ApeStats",
    "ForecastConfig",
    "SolarForecaster",
    "SolarSample",
    "ape_stats",
    "build_samples",
    "forecast_next",
    "forecast_series",
    "knn_weights",
]
