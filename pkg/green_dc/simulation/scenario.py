"""Scenario: everything a simulation run is parameterised by.

Each section model corresponds to one section of the INI configuration.
"""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from green_dc.datacenter import DatacenterState
from green_dc.energy.economics import CostModel
from green_dc.energy.objective import ModelBundle, TransitionDelays
from green_dc.energy.power import PowerModel
from green_dc.energy.revenue import DEFAULT_PROFILES, RevenueFunction
from green_dc.energy.thermal import CoolingModel, ThermalModel, default_d_matrix, load_d_matrix
from green_dc.forecast import ForecastConfig
from green_dc.strategies import GAConfig, StrategyName, ThresholdConfig


class DatacenterSettings(BaseModel):
    """Size of the datacenter and the homogeneous PM template."""

    model_config = ConfigDict(frozen=True)

    n_pms: int = Field(40, ge=1)
    n_vms: int = Field(100, ge=1)
    capacity_mips: float = Field(1500.0, gt=0)
    p_max_watts: float = Field(259.0, gt=0)
    idle_ratio: float = Field(0.66, ge=0, le=1)
    sleep_power_w: float = Field(0.0, ge=0)


class ThermalSettings(CoolingModel):
    """Cooling plant plus the heat-recirculation matrix.

    Attributes:
        t_supply_c (float): Air temperature supplied to every machine, °C.
        d_diag (float): Self-heating coefficient of the generated matrix, °C/W.
        d_neighbor (float): Coefficient between adjacent machines, °C/W.
        d_matrix_path (str | None): CSV with an explicit ``N x N`` matrix;
            overrides the generated one.
    """

    t_supply_c: float = 18.0
    d_diag: float = Field(0.015, ge=0)
    d_neighbor: float = Field(0.003, ge=0)
    d_matrix_path: str | None = None

    @field_validator("d_matrix_path", mode="before")
    @classmethod
    def _empty_path(cls, value):
        if isinstance(value, str) and not value.strip():
            return None
        return value

    def cooling(self) -> CoolingModel:  # noqa: D102
        return CoolingModel(**{name: getattr(self, name) for name in CoolingModel.model_fields})


class SimulationSettings(BaseModel):
    """Slot grid, transition delays and the master seed."""

    model_config = ConfigDict(frozen=True)

    slot_length_s: float = Field(3600.0, gt=0)
    n_slots: int = Field(24, ge=1)
    migration_delay_s: float = Field(5.0, ge=0)
    wakeup_delay_s: float = Field(15.0, ge=0)
    rng_seed: int = 0

    @model_validator(mode="after")
    def _check_delays(self) -> "SimulationSettings":
        for name in ("migration_delay_s", "wakeup_delay_s"):
            if getattr(self, name) >= self.slot_length_s:
                raise ValueError(f"{name} must be shorter than slot_length_s")
        return self

    def delays(self) -> TransitionDelays:  # noqa: D102
        return TransitionDelays(
            migration_delay_s=self.migration_delay_s, wakeup_delay_s=self.wakeup_delay_s
        )


class StrategySettings(ThresholdConfig):
    """Strategy to run and the thresholds of the heuristics."""

    name: StrategyName = StrategyName.JOP

    @field_validator("name", mode="before")
    @classmethod
    def _parse_name(cls, value):
        return StrategyName.parse(value)

    def thresholds(self) -> ThresholdConfig:  # noqa: D102
        return ThresholdConfig(upper_util=self.upper_util, lower_util=self.lower_util)


class TraceSettings(BaseModel):
    """Shape of the synthetic traces.

    Attributes:
        peak_demand_fraction (float): Aggregate demand peak as a share of the
            total PM capacity.
        solar_peak_w (float): Midday generation, W.
        solar_noise (float): Relative uniform noise on the generation.
        t_out_min_c (float): Pre-dawn outside temperature, °C.
        t_out_max_c (float): Mid-afternoon outside temperature, °C.
        noise_low (float): Lower bound of the per-VM demand noise.
        noise_high (float): Upper bound of the per-VM demand noise.
        history_days (int): Days of generation synthesised before the first
            slot to prime the forecaster.
    """

    model_config = ConfigDict(frozen=True)

    peak_demand_fraction: float = Field(0.7, gt=0, le=1)
    solar_peak_w: float = Field(10000.0, ge=0)
    solar_noise: float = Field(0.1, ge=0, lt=1)
    t_out_min_c: float = 10.0
    t_out_max_c: float = 30.0
    noise_low: float = Field(0.7, ge=0)
    noise_high: float = Field(1.3, ge=0)
    history_days: int = Field(7, ge=0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "TraceSettings":
        if self.t_out_min_c > self.t_out_max_c:
            raise ValueError("t_out_min_c must not exceed t_out_max_c")
        if self.noise_low > self.noise_high:
            raise ValueError("noise_low must not exceed noise_high")
        return self


class AppSettings(BaseModel):
    """Revenue profiles cycled over the VMs."""

    model_config = ConfigDict(frozen=True)

    profiles: tuple[RevenueFunction, ...] = Field(DEFAULT_PROFILES, min_length=1)

    @field_validator("profiles", mode="before")
    @classmethod
    def _parse_profiles(cls, value):
        if isinstance(value, str):
            return tuple(RevenueFunction.from_text(p) for p in value.split(";") if p.strip())
        return value

    def to_text(self) -> str:  # noqa: D102
        return "; ".join(p.to_text() for p in self.profiles)


class Scenario(BaseModel):
    """Complete description of a simulation run.

    Typical usage:
        scenario = Scenario()
        state = scenario.initial_state()
        models = scenario.models()
    """

    model_config = ConfigDict(frozen=True)

    datacenter: DatacenterSettings = DatacenterSettings()
    costs: CostModel = CostModel()
    thermal: ThermalSettings = ThermalSettings()
    simulation: SimulationSettings = SimulationSettings()
    strategy: StrategySettings = StrategySettings()
    ga: GAConfig = GAConfig()
    forecast: ForecastConfig = ForecastConfig()
    traces: TraceSettings = TraceSettings()
    apps: AppSettings = AppSettings()

    def ga_config(self) -> GAConfig:
        """GA parameters seeded from the scenario's master seed."""
        return self.ga.model_copy(update={"rng_seed": self.simulation.rng_seed})

    def with_seed(self, seed: int) -> "Scenario":  # noqa: D102
        return self.model_copy(
            update={"simulation": self.simulation.model_copy(update={"rng_seed": seed})}
        )

    def with_strategy(self, name: StrategyName | str) -> "Scenario":  # noqa: D102
        return self.model_copy(
            update={"strategy": self.strategy.model_copy(update={"name": StrategyName.parse(name)})}
        )

    def initial_state(self) -> DatacenterState:
        """All PMs active, VMs placed round-robin, zero demand."""
        dc = self.datacenter
        return DatacenterState.build(
            dc.n_pms,
            dc.n_vms,
            profiles=self.apps.profiles,
            capacity_mips=dc.capacity_mips,
            p_max_watts=dc.p_max_watts,
            idle_ratio=dc.idle_ratio,
            slot_length_s=self.simulation.slot_length_s,
        )

    def models(self) -> ModelBundle:
        """Physical and economic models of the scenario."""
        dc, thermal = self.datacenter, self.thermal
        if thermal.d_matrix_path:
            d_matrix = load_d_matrix(thermal.d_matrix_path, dc.n_pms)
        else:
            d_matrix = default_d_matrix(dc.n_pms, thermal.d_diag, thermal.d_neighbor)
        return ModelBundle(
            power=PowerModel(
                p_max_watts=dc.p_max_watts,
                idle_ratio=dc.idle_ratio,
                sleep_power_w=dc.sleep_power_w,
            ),
            cooling=thermal.cooling(),
            thermal=ThermalModel.uniform(d_matrix, thermal.t_supply_c),
            costs=self.costs,
            delays=self.simulation.delays(),
        )
