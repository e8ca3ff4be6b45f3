"""Strategy objects driven by the slot engine.

Every strategy receives the state with the new slot's demands and a
``SlotContext`` and returns an ``ActionPlan``. After the slot is served,
``observe`` feeds back the realised generation.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging

from green_dc.datacenter import ActionPlan, DatacenterState
from green_dc.energy.objective import ModelBundle
from green_dc.forecast import ForecastConfig, SolarForecaster
from green_dc.strategies.enumerates import StrategyName
from green_dc.strategies.genetic import GAConfig
from green_dc.strategies.heuristics import ThresholdConfig, dlb_step, dvmc_step
from green_dc.strategies.jop import jop_step


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SlotContext:
    """Exogenous conditions of the slot being planned.

    Attributes:
        slot_index (int): Slot being planned.
        t_out_c (float): Outside temperature, °C.
        green_actual_w (float): Realised generation; only read by strategies
            while their forecaster warms up.
    """

    slot_index: int
    t_out_c: float
    green_actual_w: float


class MigrationStrategy(ABC):
    """Base class of the migration strategies."""

    name: StrategyName

    def __init__(self):
        self.last_forecast_w: float | None = None
        self.last_forecast_warmup = False

    @abstractmethod
    def plan(self, state: DatacenterState, context: SlotContext) -> ActionPlan:
        """Decide placement and activity for the slot described by ``context``."""

    def observe(self, green_actual_w: float) -> None:  # noqa: B027
        """Receive the generation realised in the slot just served."""


class NoopStrategy(MigrationStrategy):
    """Keeps the current placement and activity."""

    name = StrategyName.NOOP

    def plan(self, state: DatacenterState, context: SlotContext) -> ActionPlan:  # noqa: D102
        return ActionPlan.keep(state)


class DLBStrategy(MigrationStrategy):
    """Load balancing over all PMs."""

    name = StrategyName.DLB

    def __init__(self, thresholds: ThresholdConfig):  # noqa: D107
        super().__init__()
        self.thresholds = thresholds

    def plan(self, state: DatacenterState, context: SlotContext) -> ActionPlan:  # noqa: D102
        return dlb_step(state, self.thresholds)


class DVMCStrategy(MigrationStrategy):
    """Threshold consolidation with sleeping of empty PMs."""

    name = StrategyName.DVMC

    def __init__(self, thresholds: ThresholdConfig):  # noqa: D107
        super().__init__()
        self.thresholds = thresholds

    def plan(self, state: DatacenterState, context: SlotContext) -> ActionPlan:  # noqa: D102
        return dvmc_step(state, self.thresholds)


class JOPStrategy(MigrationStrategy):
    """Genetic joint optimization against a k-NN forecast of green generation.

    While the forecaster lacks history the realised generation is used and
    ``last_forecast_warmup`` is set.
    """

    name = StrategyName.JOP

    def __init__(  # noqa: PLR0913
        self,
        ga_config: GAConfig,
        models: ModelBundle,
        forecast_config: ForecastConfig,
        thresholds: ThresholdConfig | None = None,
        solar_history_w: list[float] | None = None,
        slots_per_day: int = 24,
    ):
        """Create the strategy.

        Args:
            ga_config (GAConfig): Search parameters.
            models (ModelBundle): Physical and economic models.
            forecast_config (ForecastConfig): Forecaster parameters.
            thresholds (ThresholdConfig | None): Thresholds of the heuristic seeds.
            solar_history_w (list[float] | None): Generation preceding the first
                simulated slot, oldest first.
            slots_per_day (int): Period of the time-of-day feature.
        """
        super().__init__()
        self.ga_config = ga_config
        self.models = models
        self.thresholds = thresholds or ThresholdConfig()
        self.forecaster = SolarForecaster(forecast_config, slots_per_day)
        if solar_history_w:
            self.forecaster.prime(solar_history_w)

    def plan(self, state: DatacenterState, context: SlotContext) -> ActionPlan:  # noqa: D102
        predicted = self.forecaster.predict()
        self.last_forecast_warmup = predicted is None
        forecast_w = context.green_actual_w if predicted is None else max(0.0, predicted)
        self.last_forecast_w = forecast_w
        return jop_step(
            state,
            forecast_w,
            self.ga_config,
            self.models,
            context.t_out_c,
            thresholds=self.thresholds,
        )

    def observe(self, green_actual_w: float) -> None:  # noqa: D102
        self.forecaster.observe(green_actual_w)


def build_strategy(  # noqa: PLR0913
    name: StrategyName | str,
    thresholds: ThresholdConfig,
    ga_config: GAConfig,
    models: ModelBundle,
    forecast_config: ForecastConfig,
    solar_history_w: list[float] | None = None,
    slots_per_day: int = 24,
) -> MigrationStrategy:
    """Instantiate the strategy called ``name``."""
    match StrategyName.parse(name):
        case StrategyName.DLB:
            return DLBStrategy(thresholds)
        case StrategyName.DVMC:
            return DVMCStrategy(thresholds)
        case StrategyName.JOP:
            return JOPStrategy(
                ga_config, models, forecast_config, thresholds, solar_history_w, slots_per_day
            )
        case StrategyName.NOOP:
            return NoopStrategy()
