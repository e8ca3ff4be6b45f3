import numpy as np
import pytest

from green_dc.datacenter import DatacenterState, PhysicalMachine, VirtualMachine, apply_plan
from green_dc.strategies import ThresholdConfig, dlb_step, dvmc_step


@pytest.fixture(scope="module")
def thresholds():  # noqa: D103
    return ThresholdConfig(upper_util=0.85, lower_util=0.30)


def make_state(hosts, demands, active=None, capacity=1000.0):  # noqa: D103
    active = active if active is not None else [True] * (max(hosts) + 1)
    return DatacenterState(
        pms=tuple(PhysicalMachine(i, capacity, active=a) for i, a in enumerate(active)),
        vms=tuple(
            VirtualMachine(j, demand_mips=d, host=h)
            for j, (h, d) in enumerate(zip(hosts, demands, strict=True))
        ),
    )


def post_load(state, plan):  # noqa: D103
    load = np.zeros(state.n_pms)
    np.add.at(load, plan.new_placement.as_array(), state.demands)
    return load / state.capacities


def test_threshold_order_is_validated():  # noqa: D103
    with pytest.raises(ValueError):
        ThresholdConfig(upper_util=0.3, lower_util=0.5)


def test_dlb_relieves_overloaded_pm(thresholds):  # noqa: D103
    state = make_state([0, 0, 1], [500.0, 450.0, 200.0])
    plan = dlb_step(state, thresholds)
    assert plan.migrated_vms(state) == [0]
    assert post_load(state, plan)[0] <= 0.85
    assert not plan.sleeps


def test_dlb_nothing_overloaded(thresholds):  # noqa: D103
    state = make_state([0, 1], [500.0, 200.0])
    assert dlb_step(state, thresholds).is_noop(state)


def test_dlb_single_pm_has_nowhere_to_go(thresholds):  # noqa: D103
    state = make_state([0, 0], [500.0, 450.0])
    assert dlb_step(state, thresholds).is_noop(state)


def test_dlb_wakes_sleeping_pms(thresholds):  # noqa: D103
    state = make_state([0, 0], [300.0, 200.0], active=[True, False, False])
    plan = dlb_step(state, thresholds)
    assert plan.wakeups == frozenset({1, 2})
    new_state, _ = apply_plan(state, plan)
    assert new_state.active.all()


def test_dvmc_consolidates_and_sleeps(thresholds):  # noqa: D103
    state = make_state([0, 1], [100.0, 500.0])
    plan = dvmc_step(state, thresholds)
    assert plan.new_placement.hosts == (1, 1)
    assert plan.sleeps == frozenset({0})
    assert post_load(state, plan)[1] == pytest.approx(0.6)


def test_dvmc_no_trigger(thresholds):  # noqa: D103
    state = make_state([0, 1], [500.0, 500.0])
    assert dvmc_step(state, thresholds).is_noop(state)


def test_dvmc_keeps_pm_whose_vms_fit_nowhere(thresholds):  # noqa: D103
    state = make_state([0, 1], [200.0, 800.0])
    plan = dvmc_step(state, thresholds)
    assert plan.is_noop(state)


def test_dvmc_wakes_pm_only_when_needed(thresholds):  # noqa: D103
    state = make_state([0, 0], [500.0, 450.0], active=[True, False])
    plan = dvmc_step(state, thresholds)
    assert plan.wakeups == frozenset({1})
    assert post_load(state, plan).max() <= 0.85


def test_dvmc_sleeps_idle_active_pms(thresholds):  # noqa: D103
    state = make_state([0, 0], [300.0, 200.0], active=[True, True])
    plan = dvmc_step(state, thresholds)
    assert plan.sleeps == frozenset({1})


@pytest.mark.parametrize("seed", range(10))
def test_plans_apply_and_keep_invariants(thresholds, seed):  # noqa: D103
    rng = np.random.default_rng(seed)
    state = make_state(
        rng.integers(0, 6, size=15).tolist(), rng.uniform(0, 400, size=15).tolist(), [True] * 6
    )
    dlb = dlb_step(state, thresholds)
    assert not dlb.sleeps
    dlb_state, _ = apply_plan(state, dlb)
    assert dlb_state.active.all()

    dvmc = dvmc_step(state, thresholds)
    dvmc_state, _ = apply_plan(state, dvmc)
    hosting = np.bincount(dvmc_state.hosts, minlength=6) > 0
    assert not np.any(dvmc_state.active & ~hosting)
    targets = np.unique(dvmc.new_placement.as_array()[dvmc.migrated_vms(state)])
    assert np.all(post_load(state, dvmc)[targets] <= 0.85 + 1e-12)
