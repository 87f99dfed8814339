# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from pipereuse.errors import ContractViolation

from .budget import SHParams, min_resource

logger = logging.getLogger("pipereuse")

# (configuration, cumulative resource, seed) -> score, lower is better
ScoreOracle = Callable[[Any, float, int], float]


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    survivors: Tuple[Any, ...]
    resource: Optional[float]
    scores: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "survivors": list(self.survivors),
            "resource": self.resource,
            "scores": [None if math.isinf(s) else s for s in self.scores],
        }


@dataclass
class EarlyStoppingResult:
    population: List[Any]
    history: List[GenerationRecord]


@dataclass
class SHResult:
    winner: int
    history: List[GenerationRecord]
    diagnostics: List[str] = field(default_factory=list)

    def survivors_per_generation(self) -> List[Tuple[int, ...]]:
        return [record.survivors for record in self.history]


def generic_early_stopping(
    population: Sequence[Any],
    G: int,
    step: Callable[[List[Any], int], Sequence[float]],
    prune: Callable[[List[Any], Sequence[float], int], Sequence[Any]],
    populate: Callable[[List[Any], int], Sequence[Any]],
    resource: Optional[Callable[[int], float]] = None,
) -> EarlyStoppingResult:
    """Run G rounds of step -> prune -> populate; generations are numbered from 1."""
    population = list(population)
    if not population:
        raise ContractViolation("Early stopping needs a non-empty population")
    if G < 1:
        raise ContractViolation(f"Early stopping needs G >= 1, got {G}")

    history = []
    for g in range(1, G + 1):
        scores = list(step(population, g))
        if len(scores) != len(population):
            raise ContractViolation(f"step returned {len(scores)} scores for {len(population)} configurations")
        history.append(
            GenerationRecord(g, tuple(population), resource(g) if resource else None, tuple(float(s) for s in scores))
        )
        pruned = list(prune(population, scores, g))
        if not pruned:
            raise ContractViolation(f"prune emptied the population in generation {g}")
        population = list(populate(pruned, g))
        if not population:
            raise ContractViolation(f"populate emptied the population in generation {g}")
    return EarlyStoppingResult(population, history)


def successive_halving(
    configs: Sequence[Any],
    params: SHParams,
    oracle: ScoreOracle,
    seed: int = 0,
    num_workers: int = 1,
) -> SHResult:
    """Successive Halving as an instance of the generic loop.

    Configurations are identified by their index in ``configs``. Generation g
    trains every survivor to cumulative resource r * eta^(g-1) and keeps the
    floor(|P| / eta) best (at least one), ties broken by index.
    """
    if len(configs) != params.n:
        raise ContractViolation(f"Got {len(configs)} configurations for n={params.n}")
    r = min_resource(params)
    diagnostics: List[str] = []

    def resource(g: int) -> float:
        return r * params.eta ** (g - 1)

    def evaluate(index: int, g: int) -> float:
        try:
            return float(oracle(configs[index], resource(g), seed))
        except Exception as e:
            diagnostics.append(f"generation {g}: configuration {index} failed: {e!r}")
            logger.warning(f"oracle failed for configuration {index} in generation {g}: {e!r}")
            return math.inf

    def step(population: List[int], g: int) -> List[float]:
        if num_workers > 1:
            with ThreadPoolExecutor(max_workers=num_workers) as executor:
                return list(executor.map(lambda index: evaluate(index, g), population))
        return [evaluate(index, g) for index in population]

    def prune(population: List[int], scores: Sequence[float], g: int) -> List[int]:
        ranked = sorted(zip(scores, population))
        keep = max(1, len(population) // params.eta)
        logger.info(f"SH generation {g}: trained {len(population)} at resource {resource(g):g}, keeping {keep}")
        return sorted(index for _, index in ranked[:keep])

    def populate(population: List[int], g: int) -> List[int]:
        return population

    result = generic_early_stopping(list(range(params.n)), params.G, step, prune, populate, resource)
    last = result.history[-1]
    winner = min(zip(last.scores, last.survivors))[1]
    return SHResult(winner=winner, history=result.history, diagnostics=sorted(diagnostics))


class SyntheticOracle:
    """Seeded score table for simulated SH runs.

    Configurations are integer ids. With ``noise=0`` scores do not depend on the
    resource; otherwise a deterministic perturbation shrinking with the resource
    is added.
    """

    def __init__(self, n: int, seed: int = 0, noise: float = 0.0):
        self.n = n
        self.seed = seed
        self.noise = noise
        self.scores = np.random.default_rng(seed).random(n)

    def __call__(self, config: int, resource: float, seed: int = 0) -> float:
        score = float(self.scores[config])
        if self.noise:
            entropy = [self.seed, seed, int(config), int(round(resource * 2**20))]
            rng = np.random.default_rng(np.random.SeedSequence(entropy))
            score += self.noise * float(rng.standard_normal()) / (1.0 + resource)
        return score
