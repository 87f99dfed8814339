# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from dataclasses import dataclass
from typing import List

from pipereuse.errors import ConfigurationError


@dataclass(frozen=True)
class SHParams:
    n: int
    R: float
    eta: int
    G: int

    def __post_init__(self):
        if self.eta < 2:
            raise ConfigurationError(f"Elimination rate eta must be >= 2, got {self.eta}")
        if self.G < 1:
            raise ConfigurationError(f"Need at least one generation, got G={self.G}")
        if self.R <= 0:
            raise ConfigurationError(f"Maximum resource R must be positive, got {self.R}")
        if self.n < self.eta ** (self.G - 1):
            raise ConfigurationError(
                f"n={self.n} < eta**(G-1)={self.eta ** (self.G - 1)}: "
                "n >= eta**(G-1) ensures at least one configuration will be trained at resource R"
            )

    @classmethod
    def parse(cls, text: str) -> "SHParams":
        """Parse ``"n,R,eta,G"``."""
        tokens = [token.strip() for token in str(text).split(",")]
        if len(tokens) != 4:
            raise ConfigurationError(f"Expected n,R,eta,G but got {text!r}")
        try:
            return cls(int(tokens[0]), float(tokens[1]), int(tokens[2]), int(tokens[3]))
        except ValueError:
            raise ConfigurationError(f"Cannot parse SH parameters {text!r}") from None


@dataclass(frozen=True)
class GenerationAllocation:
    generation: int
    population: int
    resource: float
    incremental_resource: float


@dataclass(frozen=True)
class SHBudget:
    sh: float
    full: float
    warm: float

    @property
    def ratio(self) -> float:
        return self.full / self.sh


def min_resource(params: SHParams) -> float:
    """r = R * eta^-(G-1), the per-configuration resource of the first generation."""
    return params.R / params.eta ** (params.G - 1)


def generation_allocations(params: SHParams) -> List[GenerationAllocation]:
    r = min_resource(params)
    allocations = []
    population = params.n
    previous = 0.0
    for g in range(1, params.G + 1):
        resource = r * params.eta ** (g - 1)
        allocations.append(GenerationAllocation(g, population, resource, resource - previous))
        previous = resource
        population = max(1, population // params.eta)
    return allocations


def sh_budget(params: SHParams) -> SHBudget:
    """SH budget n*r*G against n*R without early stopping.

    ``warm`` sums the incremental allocations actually spent when every
    generation continues from the previous one.
    """
    sh = params.n * min_resource(params) * params.G
    warm = sum(a.population * a.incremental_resource for a in generation_allocations(params))
    return SHBudget(sh=sh, full=params.n * params.R, warm=warm)
