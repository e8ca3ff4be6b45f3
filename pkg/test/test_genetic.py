import numpy as np
import pytest

from green_dc.datacenter import DatacenterState, Placement
from green_dc.energy.economics import CostModel, EnergySupply
from green_dc.energy.objective import ModelBundle, NetRevenueEvaluator
from green_dc.energy.power import PowerModel
from green_dc.energy.thermal import CoolingModel, ThermalModel, default_d_matrix
from green_dc.strategies import (
    GAConfig,
    Population,
    brute_force_optimum,
    ga_crossover,
    ga_mutate,
    ga_optimize,
    ga_select,
    selection_probabilities,
)
from green_dc.utils.errors import DimensionError, DomainError, SearchSpaceError


def consolidation_fitness(genomes):  # noqa: D103
    """Rewards fewer distinct hosts, then lower host indices."""
    genomes = np.atleast_2d(genomes)
    distinct = np.array([len(set(g.tolist())) for g in genomes])
    return -distinct.astype(float) - 0.01 * genomes.sum(axis=1)


def random_instance(seed):  # noqa: D103
    rng = np.random.default_rng(seed)
    state = DatacenterState.build(3, 4, demands=rng.uniform(100, 900, size=4))
    models = ModelBundle(
        power=PowerModel(),
        cooling=CoolingModel(),
        thermal=ThermalModel.uniform(default_d_matrix(3), 18.0),
        costs=CostModel(),
    )
    supply = EnergySupply.from_power(float(rng.uniform(0, 600)), state.slot_length_s)
    return state, NetRevenueEvaluator(state, models, float(rng.uniform(10, 30)), supply)


def test_selection_probabilities_examples():  # noqa: D103
    np.testing.assert_allclose(selection_probabilities([1, 1, 2]), [0.25, 0.25, 0.5])
    np.testing.assert_allclose(selection_probabilities([-2, 0, 2]), [1 / 9, 3 / 9, 5 / 9])
    np.testing.assert_allclose(selection_probabilities([7.5]), [1.0])
    np.testing.assert_allclose(selection_probabilities([-3, -3, -3, -3]), [0.25] * 4)


def test_selection_probabilities_are_distribution():  # noqa: D103
    rng = np.random.default_rng(1)
    p = selection_probabilities(rng.normal(0, 100, size=50))
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(1.0)
    with pytest.raises(DomainError):
        selection_probabilities([])


def test_elite_set_invariant_under_monotone_transform():  # noqa: D103
    genomes = np.arange(12).reshape(6, 2)
    fitness = np.array([3.0, -1.0, 8.0, 0.5, 2.0, 7.0])
    rng = np.random.default_rng(0)
    elites, _ = ga_select(Population(genomes, fitness), rng, elite_count=3)
    transformed, _ = ga_select(Population(genomes, np.exp(fitness)), rng, elite_count=3)
    np.testing.assert_array_equal(elites.genomes, transformed.genomes)
    np.testing.assert_array_equal(elites.genomes, genomes[[2, 5, 0]])


def test_ga_select_keeps_past_elites():  # noqa: D103
    previous = Population(np.array([[9, 9]]), np.array([100.0]))
    current = Population(np.array([[0, 0], [1, 1], [2, 2]]), np.array([1.0, 2.0, 3.0]))
    elites, parents = ga_select(current, np.random.default_rng(0), 1, previous)
    np.testing.assert_array_equal(elites.genomes, [[9, 9]])
    assert len(parents) == 2


def test_ga_select_elites_are_distinct():  # noqa: D103
    genomes = np.array([[3, 3], [1, 1], [3, 3], [0, 0]])
    current = Population(genomes, np.array([5.0, 2.0, 5.0, 1.0]))
    previous = Population(np.array([[3, 3], [2, 2]]), np.array([5.0, 4.0]))
    elites, parents = ga_select(current, np.random.default_rng(0), 3, previous)
    np.testing.assert_array_equal(elites.genomes, [[3, 3], [2, 2], [1, 1]])
    assert len(elites) + len(parents) == len(current)


def test_ga_crossover_swaps_tails():  # noqa: D103
    c1, c2 = ga_crossover([0, 1, 2, 3], [3, 2, 1, 0], 2)
    assert c1.tolist() == [0, 1, 1, 0]
    assert c2.tolist() == [3, 2, 2, 3]

    c1, c2 = ga_crossover([4, 4, 4], [4, 4, 4], 1)
    assert c1.tolist() == c2.tolist() == [4, 4, 4]

    c1, c2 = ga_crossover([0, 1], [5, 6], 1)
    assert (c1.tolist(), c2.tolist()) == ([0, 6], [5, 1])


def test_ga_crossover_errors():  # noqa: D103
    with pytest.raises(DimensionError):
        ga_crossover([0, 1], [0, 1, 2], 1)
    with pytest.raises(DomainError):
        ga_crossover([0, 1], [1, 0], 2)


def test_ga_mutate():  # noqa: D103
    genome = np.array([0, 1, 2, 0, 1])
    rng = np.random.default_rng(4)
    np.testing.assert_array_equal(ga_mutate(genome, 0.0, rng, 3), genome)
    for seed in range(10):
        mutated = ga_mutate(genome, 1.0, np.random.default_rng(seed), 3)
        assert np.all(mutated != genome)
        assert np.all((mutated >= 0) & (mutated < 3))
    np.testing.assert_array_equal(ga_mutate([0, 0, 0], 1.0, rng, 1), [0, 0, 0])


def test_ga_without_search_returns_current():  # noqa: D103
    config = GAConfig(population_size=1, elite_count=1, mutation_prob=0.0, generations=1)
    current = Placement((0, 1, 1))
    best = ga_optimize(current, consolidation_fitness, config, n_pms=2)
    assert best.genome == current


def test_ga_best_ever_is_nondecreasing():  # noqa: D103
    config = GAConfig(population_size=30, elite_count=3, generations=40, rng_seed=9)
    history: list[float] = []
    current = Placement((0, 1, 2, 3, 4))
    best = ga_optimize(current, consolidation_fitness, config, 5, history=history)
    assert len(history) == config.generations + 1
    assert all(a <= b for a, b in zip(history, history[1:], strict=False))
    assert history[-1] == best.fitness


def test_ga_is_deterministic_per_seed_and_workers():  # noqa: D103
    state, evaluator = random_instance(0)
    config = GAConfig(population_size=40, elite_count=5, generations=30, rng_seed=5)
    first = ga_optimize(state.placement, evaluator, config, state.n_pms)
    again = ga_optimize(state.placement, evaluator, config, state.n_pms)
    threaded = ga_optimize(
        state.placement, evaluator, config.model_copy(update={"workers": 4}), state.n_pms
    )
    assert first == again == threaded


def test_ga_matches_oracle_on_toy_instance():  # noqa: D103
    state = DatacenterState.build(2, 2)
    oracle = brute_force_optimum(state, consolidation_fitness)
    config = GAConfig(population_size=20, elite_count=2, generations=20)
    best = ga_optimize(state.placement, consolidation_fitness, config, 2)
    assert oracle.n_evaluated == 4
    assert best.genome == oracle.placement == Placement((0, 0))


def test_ga_matches_oracle_on_seeded_instances():  # noqa: D103
    config = GAConfig(
        population_size=100, elite_count=20, generations=200, init_random_fraction=1.0
    )
    matches = 0
    for seed in range(20):
        state, evaluator = random_instance(seed)
        oracle = brute_force_optimum(state, evaluator)
        best = ga_optimize(
            state.placement, evaluator, config.model_copy(update={"rng_seed": seed}), state.n_pms
        )
        assert oracle.n_evaluated == 81
        matches += abs(best.fitness - oracle.fitness) <= 1e-9
    assert matches >= 19


def test_oracle_tie_break_and_bound():  # noqa: D103
    state = DatacenterState.build(3, 3)
    result = brute_force_optimum(state, lambda g: np.zeros(len(g)))
    assert result.placement == Placement((0, 0, 0))
    assert result.n_evaluated == 27
    with pytest.raises(SearchSpaceError):
        brute_force_optimum(
            state, consolidation_fitness, bound=GAConfig(oracle_bound=26).oracle_bound
        )
