from dataclasses import dataclass
from itertools import islice, product
import logging

import numpy as np

from green_dc.datacenter import DatacenterState, Placement
from green_dc.strategies.genetic import FitnessFn, GAConfig
from green_dc.utils.errors import SearchSpaceError


logger = logging.getLogger(__name__)

# Верхняя граница на число перебираемых размещений
DEFAULT_ORACLE_BOUND = GAConfig.model_fields["oracle_bound"].default
CHUNK_SIZE = 65_536


@dataclass(frozen=True)
class OracleResult:
    """Outcome of the exhaustive search.

    Attributes:
        placement (Placement): Best placement, lexicographically smallest on ties.
        fitness (float): Its fitness.
        n_evaluated (int): Number of placements scored.
    """

    placement: Placement
    fitness: float
    n_evaluated: int


def brute_force_optimum(
    state: DatacenterState, fitness_fn: FitnessFn, bound: int = DEFAULT_ORACLE_BOUND
) -> OracleResult:
    """Score every placement of ``state``'s VMs on its PMs and return the best.

    Placements are enumerated in lexicographic order, so the first maximum is
    the lexicographically smallest one.

    Raises:
        SearchSpaceError: If ``N ** M`` exceeds ``bound``.
    """
    n, m = state.n_pms, state.n_vms
    size = n**m
    if size > bound:
        raise SearchSpaceError(f"{n}^{m} = {size} placements exceed the bound {bound}")

    best_fitness = -np.inf
    best_genome: np.ndarray | None = None
    evaluated = 0
    candidates = product(range(n), repeat=m)
    while chunk := list(islice(candidates, CHUNK_SIZE)):
        genomes = np.array(chunk, dtype=np.int64).reshape(len(chunk), m)
        fitness = np.asarray(fitness_fn(genomes), dtype=float)
        evaluated += len(chunk)
        i = int(np.argmax(fitness))
        if fitness[i] > best_fitness:
            best_fitness = float(fitness[i])
            best_genome = genomes[i]

    logger.debug("oracle: %d placements, best %.6f", evaluated, best_fitness)
    return OracleResult(Placement.from_array(best_genome), best_fitness, evaluated)
