# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from omegaconf import DictConfig, OmegaConf

from pipereuse.dag import OpSignature
from pipereuse.dag.signature import Scalar, to_scalar
from pipereuse.errors import ConfigurationError

logger = logging.getLogger("pipereuse")


class DomainKind(Enum):
    CONTINUOUS = "continuous"
    INTEGER = "integer"
    CATEGORICAL = "categorical"
    BINARY = "binary"


class Scale(Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class ParamDomain:
    kind: DomainKind
    low: Optional[float] = None
    high: Optional[float] = None
    scale: Scale = Scale.LINEAR
    labels: Tuple[Scalar, ...] = ()

    def __post_init__(self):
        if self.kind in (DomainKind.CONTINUOUS, DomainKind.INTEGER):
            if self.low is None or self.high is None:
                raise ConfigurationError(f"{self.kind.value} domain needs low and high")
            if not self.low < self.high:
                raise ConfigurationError(f"Domain needs low < high, got ({self.low}, {self.high})")
            if self.scale == Scale.LOG and self.low <= 0:
                raise ConfigurationError(f"Log-scale domain needs low > 0, got {self.low}")
        if self.kind == DomainKind.CATEGORICAL:
            if not self.labels:
                raise ConfigurationError("Categorical domain needs at least one label")
            object.__setattr__(self, "labels", tuple(to_scalar(label) for label in self.labels))

    @classmethod
    def continuous(cls, low: float, high: float, scale: str = "linear") -> "ParamDomain":
        return cls(DomainKind.CONTINUOUS, float(low), float(high), Scale(scale))

    @classmethod
    def integer(cls, low: int, high: int, scale: str = "linear") -> "ParamDomain":
        return cls(DomainKind.INTEGER, int(float(low)), int(float(high)), Scale(scale))

    @classmethod
    def categorical(cls, labels: Sequence[Scalar]) -> "ParamDomain":
        return cls(DomainKind.CATEGORICAL, labels=tuple(labels))

    @classmethod
    def binary(cls) -> "ParamDomain":
        return cls(DomainKind.BINARY)

    def contains(self, value: Any) -> bool:
        if self.kind == DomainKind.CONTINUOUS:
            return self.low <= value <= self.high
        if self.kind == DomainKind.INTEGER:
            return isinstance(value, int) and self.low <= value <= self.high
        if self.kind == DomainKind.CATEGORICAL:
            return value in self.labels
        return isinstance(value, bool)

    def sample(self, rng: np.random.Generator) -> Scalar:
        if self.kind == DomainKind.CONTINUOUS:
            if self.scale == Scale.LOG:
                value = math.exp(rng.uniform(math.log(self.low), math.log(self.high)))
                return min(max(value, self.low), self.high)
            return float(rng.uniform(self.low, self.high))
        if self.kind == DomainKind.INTEGER:
            if self.scale == Scale.LOG:
                value = math.floor(math.exp(rng.uniform(math.log(self.low), math.log(self.high + 1))))
                return int(min(max(value, self.low), self.high))
            return int(rng.integers(self.low, self.high + 1))
        if self.kind == DomainKind.CATEGORICAL:
            return self.labels[int(rng.integers(len(self.labels)))]
        return bool(rng.integers(2))

    def grid(self, count: int) -> List[Scalar]:
        """Evenly spaced values (in exponent for log scale); one value means the center."""
        if count < 1:
            raise ConfigurationError(f"Grid count must be >= 1, got {count}")
        if self.kind == DomainKind.BINARY:
            return [False, True] if count >= 2 else [False]
        if self.kind == DomainKind.CATEGORICAL:
            if count >= len(self.labels):
                return list(self.labels)
            if count == 1:
                return [self.labels[(len(self.labels) - 1) // 2]]
            indices = np.rint(np.linspace(0, len(self.labels) - 1, count)).astype(int)
            return [self.labels[i] for i in dict.fromkeys(indices.tolist())]

        if count == 1:
            center = math.sqrt(self.low * self.high) if self.scale == Scale.LOG else (self.low + self.high) / 2
            points = np.array([center])
        elif self.scale == Scale.LOG:
            points = np.geomspace(self.low, self.high, count)
        else:
            points = np.linspace(self.low, self.high, count)
        if self.kind == DomainKind.INTEGER:
            return list(dict.fromkeys(int(v) for v in np.rint(points)))
        return [float(min(max(v, self.low), self.high)) for v in points]

    def to_dict(self) -> dict:
        if self.kind == DomainKind.CATEGORICAL:
            return {"type": self.kind.value, "values": list(self.labels)}
        if self.kind == DomainKind.BINARY:
            return {"type": self.kind.value}
        return {"type": self.kind.value, "low": self.low, "high": self.high, "scale": self.scale.value}

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any]) -> "ParamDomain":
        try:
            kind = DomainKind(spec["type"])
        except (KeyError, ValueError):
            raise ConfigurationError(f"Unknown parameter domain {dict(spec)}") from None
        if kind == DomainKind.CATEGORICAL:
            return cls.categorical(spec.get("values") or ())
        if kind == DomainKind.BINARY:
            return cls.binary()
        if "low" not in spec or "high" not in spec:
            raise ConfigurationError(f"{kind.value} domain needs low and high: {dict(spec)}")
        if kind == DomainKind.INTEGER:
            return cls.integer(spec["low"], spec["high"], spec.get("scale", "linear"))
        return cls.continuous(spec["low"], spec["high"], spec.get("scale", "linear"))


@dataclass(frozen=True)
class OperatorChoice:
    name: str
    params: Tuple[Tuple[str, ParamDomain], ...] = ()

    def sample(self, rng: np.random.Generator) -> OpSignature:
        return OpSignature(self.name, tuple((name, domain.sample(rng)) for name, domain in self.params))


@dataclass(frozen=True)
class StageSpec:
    name: str
    operators: Tuple[OperatorChoice, ...]

    def __post_init__(self):
        object.__setattr__(self, "operators", tuple(self.operators))
        if not self.operators:
            raise ConfigurationError(f"Stage {self.name} needs at least one operator choice")


@dataclass(frozen=True)
class SearchSpace:
    name: str
    stages: Tuple[StageSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.stages:
            raise ConfigurationError(f"Search space {self.name} has no stages")

    def __len__(self):
        return len(self.stages)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "stages": [
                {
                    "name": stage.name,
                    "operators": [
                        {"name": op.name, "params": {name: domain.to_dict() for name, domain in op.params}}
                        for op in stage.operators
                    ],
                }
                for stage in self.stages
            ],
        }

    @classmethod
    def from_dict(cls, spec: Mapping[str, Any]) -> "SearchSpace":
        if isinstance(spec, DictConfig):
            spec = OmegaConf.to_container(spec, resolve=True)
        stages = []
        for stage in spec.get("stages") or ():
            operators = []
            for op in stage.get("operators") or ():
                params = tuple(
                    (name, ParamDomain.from_dict(domain)) for name, domain in (op.get("params") or {}).items()
                )
                operators.append(OperatorChoice(op["name"], params))
            stages.append(StageSpec(stage["name"], tuple(operators)))
        return cls(spec.get("name", "space"), tuple(stages))


@dataclass(frozen=True)
class BranchingPlan:
    factors: Tuple[int, ...]
    total: int = field(init=False)

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        if not factors or any(f < 1 for f in factors):
            raise ConfigurationError(f"Branching factors must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "total", math.prod(factors))

    def check(self, space: SearchSpace) -> None:
        if len(self.factors) != len(space):
            raise ConfigurationError(
                f"Branching {self.factors} has {len(self.factors)} entries, space {space.name} has {len(space)} stages"
            )

    @classmethod
    def parse(cls, text: str) -> "BranchingPlan":
        try:
            return cls(tuple(int(token) for token in str(text).split(",") if token.strip()))
        except ValueError:
            raise ConfigurationError(f"Cannot parse branching {text!r}") from None


def load_space(path: str) -> SearchSpace:
    """Load a search space from a YAML or JSON file."""
    try:
        spec = OmegaConf.load(path)
    except FileNotFoundError:
        raise ConfigurationError(f"Search space file not found: {path}") from None
    space = SearchSpace.from_dict(spec)
    logger.info(f"loaded search space {space.name} with {len(space)} stages from {path}")
    return space
