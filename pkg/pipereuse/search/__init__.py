# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .domains import BranchingPlan, DomainKind, OperatorChoice, ParamDomain, Scale, SearchSpace, StageSpec, load_space
from .samplers import (
    SamplerType,
    sample_configurations,
    sample_grid,
    sample_gridded_random,
    sample_random,
    stage_grid,
)
