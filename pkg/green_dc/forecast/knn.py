import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from green_dc.utils.errors import DimensionError, DomainError, HistoryError


logger = logging.getLogger(__name__)

# Порог APE, для которого считается доля точных прогнозов
APE_THRESHOLD = 0.30


class ForecastConfig(BaseModel):
    """Parameters of the k-NN generation forecaster.

    Attributes:
        k_neighbors (int): Number of neighbours averaged.
        window_len (int): Trailing power values included in the feature vector.
        zero_ape_floor_w (float): Actual values below this floor are left out of
            the APE statistics.
    """

    model_config = ConfigDict(frozen=True)

    k_neighbors: int = Field(5, ge=1)
    window_len: int = Field(3, ge=0)
    zero_ape_floor_w: float = Field(10.0, ge=0)


@dataclass(frozen=True)
class SolarSample:
    """One historical observation.

    Attributes:
        slot_index (int): Absolute slot of the observation.
        power_w (float): Generation observed in that slot, W.
        feature_vec (tuple[float, ...]): Time-of-day slot followed by the
            ``window_len`` powers that preceded it.
    """

    slot_index: int
    power_w: float
    feature_vec: tuple[float, ...]

    def __post_init__(self):
        if self.power_w < 0:
            raise DomainError(f"slot {self.slot_index}: generation must be non-negative")


@dataclass(frozen=True)
class ApeStats:
    """Absolute percentage error summary.

    Attributes:
        fraction_under_30pct (float | None): Share of included slots with APE < 0.30;
            ``None`` when no slot was included.
        mean_ape (float | None): Mean APE of the included slots.
        n_included (int): Number of slots whose actual value passed the floor.
    """

    fraction_under_30pct: float | None
    mean_ape: float | None
    n_included: int


def features_for(
    series: Sequence[float] | NDArray, t: int, window_len: int, slots_per_day: int = 24
) -> tuple[float, ...]:
    """Feature vector of slot ``t``: its time-of-day slot and the preceding window."""
    if t < window_len:
        raise HistoryError(f"slot {t} has fewer than {window_len} preceding values")
    window = [float(v) for v in series[t - window_len : t]]
    return (float(t % slots_per_day), *window)


def build_samples(
    series: Sequence[float] | NDArray, window_len: int, slots_per_day: int = 24, start: int = 0
) -> list[SolarSample]:
    """Turn a generation series into samples, one per slot with a full window.

    Args:
        series: Generation per slot, W.
        window_len (int): Trailing values per feature vector.
        slots_per_day (int): Period of the time-of-day feature.
        start (int): Absolute slot index of ``series[0]``.
    """
    return [
        SolarSample(
            slot_index=start + t,
            power_w=float(series[t]),
            feature_vec=features_for(series, t, window_len, slots_per_day),
        )
        for t in range(window_len, len(series))
    ]


def knn_weights(distances: ArrayLike) -> NDArray[np.float64]:
    """Inverse-distance weights normalised to sum to one.

    Raises:
        DomainError: If ``distances`` is empty or holds a non-positive value.
    """
    d = np.asarray(distances, dtype=float).ravel()
    if d.size == 0:
        raise DomainError("at least one distance is required")
    if np.any(d <= 0):
        raise DomainError("distances must be positive; exact matches are resolved by the caller")
    inverse = 1.0 / d
    return inverse / inverse.sum()


def forecast_next(
    history: Sequence[SolarSample], query_features: ArrayLike, config: ForecastConfig
) -> float:
    """Predict the generation of the slot described by ``query_features``.

    The ``k`` nearest historical samples (Euclidean distance on the feature
    vectors) are averaged with inverse-distance weights. A sample at distance
    zero is returned as is.

    Raises:
        HistoryError: If ``history`` holds fewer than ``k_neighbors`` samples.
        DimensionError: If the query length differs from the sample features.
    """
    if len(history) < config.k_neighbors:
        raise HistoryError(
            f"need {config.k_neighbors} samples of history, have {len(history)}"
        )
    features = np.array([s.feature_vec for s in history], dtype=float)
    query = np.asarray(query_features, dtype=float)
    if features.shape[1] != query.shape[0]:
        raise DimensionError(
            f"query has {query.shape[0]} features, history has {features.shape[1]}"
        )
    powers = np.array([s.power_w for s in history], dtype=float)

    distances = np.linalg.norm(features - query, axis=1)
    exact = np.flatnonzero(distances == 0)
    if exact.size:
        return float(powers[exact[0]])

    nearest = np.argsort(distances, kind="stable")[: config.k_neighbors]
    weights = knn_weights(distances[nearest])
    return float(np.dot(weights, powers[nearest]))


def ape_stats(
    predicted_series: ArrayLike, actual_series: ArrayLike, config: ForecastConfig
) -> ApeStats:
    """Absolute percentage errors of a forecast against the realised series.

    Slots whose actual value is below ``zero_ape_floor_w`` are excluded.

    Raises:
        DimensionError: If the two series differ in length.
    """
    predicted = np.asarray(predicted_series, dtype=float)
    actual = np.asarray(actual_series, dtype=float)
    if predicted.shape != actual.shape:
        raise DimensionError(f"series lengths differ: {predicted.shape} vs {actual.shape}")

    included = actual >= config.zero_ape_floor_w
    if config.zero_ape_floor_w == 0:
        included &= actual > 0
    n = int(np.count_nonzero(included))
    if n == 0:
        return ApeStats(None, None, 0)
    ape = np.abs(predicted[included] - actual[included]) / actual[included]
    return ApeStats(
        fraction_under_30pct=float(np.count_nonzero(ape < APE_THRESHOLD) / n),
        mean_ape=float(ape.mean()),
        n_included=n,
    )


def forecast_series(
    series: Sequence[float] | NDArray,
    config: ForecastConfig,
    slots_per_day: int = 24,
) -> NDArray[np.float64]:
    """Rolling one-step-ahead forecasts over a whole series.

    Slot ``t`` is predicted from samples strictly before ``t``. Slots without
    enough history are marked ``NaN``.
    """
    values = np.asarray(series, dtype=float)
    predictions = np.full(values.shape, np.nan)
    forecaster = SolarForecaster(config, slots_per_day)
    for t, value in enumerate(values):
        predicted = forecaster.predict()
        if predicted is not None:
            predictions[t] = predicted
        forecaster.observe(float(value))
    return predictions


class SolarForecaster:
    """Stateful forecaster fed one observation per slot.

    ``predict`` answers for the slot following the last observation, or returns
    ``None`` while fewer than ``k_neighbors`` samples exist (warm-up).
    """

    def __init__(self, config: ForecastConfig, slots_per_day: int = 24):
        """Create an empty forecaster.

        Args:
            config (ForecastConfig): k-NN parameters.
            slots_per_day (int): Period of the time-of-day feature.
        """
        self.config = config
        self.slots_per_day = slots_per_day
        self._series: list[float] = []
        self._samples: list[SolarSample] = []

    def __len__(self) -> int:
        return len(self._samples)

    @property
    def ready(self) -> bool:  # noqa: D102
        return len(self._samples) >= self.config.k_neighbors

    def observe(self, power_w: float) -> None:
        """Append the generation realised in the next slot."""
        self._series.append(float(power_w))
        t = len(self._series) - 1
        if t >= self.config.window_len:
            self._samples.append(
                SolarSample(
                    slot_index=t,
                    power_w=float(power_w),
                    feature_vec=features_for(
                        self._series, t, self.config.window_len, self.slots_per_day
                    ),
                )
            )

    def prime(self, series: Sequence[float] | NDArray) -> None:
        """Observe a block of past generation, oldest first."""
        for value in series:
            self.observe(float(value))

    def predict(self) -> float | None:
        """Forecast for the next slot, ``None`` during warm-up."""
        t = len(self._series)
        if not self.ready or t < self.config.window_len:
            return None
        query = features_for(self._series, t, self.config.window_len, self.slots_per_day)
        return forecast_next(self._samples, query, self.config)
