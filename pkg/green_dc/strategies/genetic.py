"""Genetic search over placement vectors.

A genome is the host index of every VM. Fitness functions take a ``(P, M)``
integer array and return ``(P,)`` values, so a whole population is scored in
one call.
"""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from green_dc.datacenter import Placement
from green_dc.utils.errors import DimensionError, DomainError


logger = logging.getLogger(__name__)

FitnessFn = Callable[[NDArray[np.int64]], NDArray[np.float64]]


class GAConfig(BaseModel):
    """Parameters of the genetic search.

    Attributes:
        population_size (int): Individuals per generation.
        elite_count (int): Best individuals of the current and previous
            generation carried over unchanged.
        mutation_prob (float): Per-gene mutation probability.
        generations (int): Number of generations evolved.
        rng_seed (int): Seed of the search.
        init_random_fraction (float): Share of genes re-drawn when a random
            individual is derived from the current placement.
        seed_heuristics (bool): Add the DLB and DVMC placements to the initial
            population of JOP.
        workers (int): Threads used to score a population; results do not
            depend on it.
        oracle_bound (int): Largest number of placements the exhaustive
            search will enumerate.
        delay_aware (bool): Charge the revenue lost to migration and wake-up
            delays in the fitness, as the simulator does.
    """

    model_config = ConfigDict(frozen=True)

    population_size: int = Field(100, ge=1)
    elite_count: int = Field(20, ge=1)
    mutation_prob: float = Field(0.05, ge=0, le=1)
    generations: int = Field(200, ge=1)
    rng_seed: int = 0
    init_random_fraction: float = Field(0.25, ge=0, le=1)
    seed_heuristics: bool = True
    workers: int = Field(1, ge=1)
    oracle_bound: int = Field(1_000_000, ge=1)
    delay_aware: bool = True

    @model_validator(mode="after")
    def _check_elite(self) -> "GAConfig":
        if self.elite_count > self.population_size:
            raise ValueError(
                f"elite_count ({self.elite_count}) exceeds population_size "
                f"({self.population_size})"
            )
        return self


@dataclass(frozen=True)
class Individual:
    """A placement and its fitness in dollars."""

    genome: Placement
    fitness: float


@dataclass(frozen=True)
class Population:
    """Genomes of one generation with their fitness.

    Attributes:
        genomes (NDArray[np.int64]): ``(P, M)`` host indices.
        fitness (NDArray[np.float64]): ``(P,)`` fitness values.
    """

    genomes: NDArray[np.int64]
    fitness: NDArray[np.float64]

    def __post_init__(self):
        if self.genomes.ndim != 2 or self.fitness.shape != self.genomes.shape[:1]:  # noqa: PLR2004
            raise DimensionError(
                f"genomes {self.genomes.shape} and fitness {self.fitness.shape} do not match"
            )

    def __len__(self) -> int:
        return self.genomes.shape[0]

    def best(self) -> Individual:
        """Fittest individual; the first one on ties."""
        i = int(np.argmax(self.fitness))
        return Individual(Placement.from_array(self.genomes[i]), float(self.fitness[i]))

    def ranked(self, count: int) -> "Population":
        """The ``count`` fittest individuals, best first, ties in population order."""
        order = np.argsort(-self.fitness, kind="stable")[:count]
        return Population(self.genomes[order], self.fitness[order])

    def unique(self) -> "Population":
        """First occurrence of every distinct genome, in population order."""
        _, first = np.unique(self.genomes, axis=0, return_index=True)
        keep = np.sort(first)
        return Population(self.genomes[keep], self.fitness[keep])

    def concat(self, other: "Population") -> "Population":  # noqa: D102
        return Population(
            np.vstack([self.genomes, other.genomes]),
            np.concatenate([self.fitness, other.fitness]),
        )


def selection_probabilities(fitness: ArrayLike) -> NDArray[np.float64]:
    """Fitness-proportional selection probabilities.

    Positive fitness values are used directly. Otherwise they are shifted by
    ``1 - min`` so the worst individual keeps weight one. Equal fitness gives
    a uniform distribution.

    Raises:
        DomainError: If ``fitness`` is empty or not finite.
    """
    f = np.asarray(fitness, dtype=float).ravel()
    if f.size == 0:
        raise DomainError("cannot select from an empty population")
    if not np.all(np.isfinite(f)):
        raise DomainError("fitness values must be finite")
    if np.all(f == f[0]):
        return np.full(f.size, 1.0 / f.size)
    shifted = f if f.min() > 0 else f - f.min() + 1.0
    return shifted / shifted.sum()


def ga_select(
    population: Population,
    rng: np.random.Generator,
    elite_count: int = 0,
    previous: Population | None = None,
) -> tuple[Population, Population]:
    """Split the next generation into elites and a fitness-proportional parent pool.

    Args:
        population (Population): Current generation.
        rng (np.random.Generator): Random source.
        elite_count (int): Individuals kept unconditionally, chosen from the
            distinct genomes of the current and the previous generation.
        previous (Population | None): Previous generation.

    Returns:
        tuple[Population, Population]: Elites and ``len(population) - elite_count``
        parents drawn with replacement.
    """
    pool = (population if previous is None else population.concat(previous)).unique()
    elites = pool.ranked(min(elite_count, len(population)))
    n_parents = len(population) - len(elites)
    picked = rng.choice(
        len(population), size=n_parents, p=selection_probabilities(population.fitness)
    )
    parents = Population(population.genomes[picked], population.fitness[picked])
    return elites, parents


def ga_crossover(x1: ArrayLike, x2: ArrayLike, cut_k: int) -> tuple[NDArray, NDArray]:
    """Single-point crossover: the genes from ``cut_k`` on are swapped.

    Raises:
        DimensionError: If the parents differ in length.
        DomainError: If ``cut_k`` is outside ``[1, M - 1]``.
    """
    a = np.asarray(x1, dtype=np.int64)
    b = np.asarray(x2, dtype=np.int64)
    if a.shape != b.shape:
        raise DimensionError(f"parents differ in length: {a.shape} vs {b.shape}")
    if not 1 <= cut_k <= a.shape[-1] - 1:
        raise DomainError(f"cut point {cut_k} outside [1, {a.shape[-1] - 1}]")
    child1 = np.concatenate([a[:cut_k], b[cut_k:]])
    child2 = np.concatenate([b[:cut_k], a[cut_k:]])
    return child1, child2


def mutate_population(
    genomes: NDArray, prob: float, rng: np.random.Generator, n_pms: int
) -> NDArray[np.int64]:
    """Replace each gene with probability ``prob`` by a different random PM index."""
    if not 0 <= prob <= 1:
        raise DomainError(f"mutation probability {prob} outside [0, 1]")
    g = np.asarray(genomes, dtype=np.int64)
    if n_pms < 2:  # noqa: PLR2004
        return g.copy()
    mask = rng.random(g.shape) < prob
    shift = rng.integers(1, n_pms, size=g.shape)
    return np.where(mask, (g + shift) % n_pms, g)


def ga_mutate(genome: ArrayLike, prob: float, rng: np.random.Generator, n_pms: int) -> NDArray:
    """Mutate a single genome; see ``mutate_population``."""
    return mutate_population(np.asarray(genome)[None, :], prob, rng, n_pms)[0]


def _score(fitness_fn: FitnessFn, genomes: NDArray, workers: int) -> NDArray[np.float64]:
    if len(genomes) == 0:
        return np.empty(0)
    if workers <= 1 or len(genomes) < 2 * workers:
        return np.asarray(fitness_fn(genomes), dtype=float)
    chunks = np.array_split(genomes, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fitness_fn, chunks))
    return np.concatenate([np.asarray(p, dtype=float) for p in parts])


def initial_population(
    current: NDArray[np.int64],
    n_pms: int,
    config: GAConfig,
    rng: np.random.Generator,
    seeds: Sequence[Placement] = (),
) -> NDArray[np.int64]:
    """Current placement, then the seeds, then perturbed copies of the current placement."""
    rows = [current, *(np.asarray(s.hosts, dtype=np.int64) for s in seeds)]
    rows = rows[: config.population_size]
    m = current.shape[0]
    n_redraw = min(m, max(1, round(config.init_random_fraction * m))) if m else 0
    while len(rows) < config.population_size:
        genome = current.copy()
        positions = rng.choice(m, size=n_redraw, replace=False)
        genome[positions] = rng.integers(0, n_pms, size=n_redraw)
        rows.append(genome)
    return np.vstack(rows)


def _breed(
    parents: NDArray[np.int64], rng: np.random.Generator, config: GAConfig, n_pms: int
) -> NDArray[np.int64]:
    children = parents.copy()
    m = children.shape[1]
    if m >= 2:  # noqa: PLR2004
        for i in range(0, len(children) - 1, 2):
            cut = int(rng.integers(1, m))
            children[i], children[i + 1] = ga_crossover(children[i], children[i + 1], cut)
    return mutate_population(children, config.mutation_prob, rng, n_pms)


def ga_optimize(  # noqa: PLR0913
    current_placement: Placement,
    fitness_fn: FitnessFn,
    config: GAConfig,
    n_pms: int,
    seeds: Sequence[Placement] = (),
    rng: np.random.Generator | None = None,
    history: list[float] | None = None,
) -> Individual:
    """Search for the fittest placement.

    Each generation keeps ``elite_count`` elites from the current and previous
    generation, samples the remainder fitness-proportionally, recombines
    consecutive pairs and mutates them. The random stream is consumed serially,
    so the outcome only depends on the seed.

    Args:
        current_placement (Placement): Placement of the last slot; always part of
            the initial population.
        fitness_fn: Batch fitness over ``(P, M)`` genomes.
        config (GAConfig): Search parameters.
        n_pms (int): Number of hosts genes may take.
        seeds: Additional placements for the initial population.
        rng (np.random.Generator | None): Random source; seeded from
            ``config.rng_seed`` when omitted.
        history (list[float] | None): Receives the best-ever fitness after
            initialization and after every generation.

    Returns:
        Individual: Best individual ever evaluated.
    """
    rng = rng if rng is not None else np.random.default_rng(config.rng_seed)
    current = np.asarray(current_placement.hosts, dtype=np.int64)
    genomes = initial_population(current, n_pms, config, rng, seeds)
    population = Population(genomes, _score(fitness_fn, genomes, config.workers))
    previous: Population | None = None
    best = population.best()
    if history is not None:
        history.append(best.fitness)

    for generation in range(config.generations):
        elites, parents = ga_select(population, rng, config.elite_count, previous)
        children = _breed(parents.genomes, rng, config, n_pms)
        scored = Population(children, _score(fitness_fn, children, config.workers))
        previous, population = population, elites.concat(scored)

        candidate = population.best()
        if candidate.fitness > best.fitness:
            best = candidate
        if history is not None:
            history.append(best.fitness)
        logger.debug("ga generation %d: best %.6f", generation, best.fitness)

    return best
