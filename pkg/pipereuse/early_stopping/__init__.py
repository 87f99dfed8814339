# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .algorithms import (
    EarlyStoppingResult,
    GenerationRecord,
    ScoreOracle,
    SHResult,
    SyntheticOracle,
    generic_early_stopping,
    successive_halving,
)
from .budget import GenerationAllocation, SHBudget, SHParams, generation_allocations, min_resource, sh_budget
from .subdags import TrainingMode, concat_generations, sh_subdags, training_scale
