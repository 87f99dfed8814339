# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .instance import DeltaSchedule, IlpInstance, build_instance
from .brute_force import brute_force
from .milp import MilpModel, MilpSolution, build_model, export_milp, resident_matrix, solve_milp, step_indicators
from .solver import OptResult, StopReason, solve_exact
from .validate import DeltaValidation, Violation, validate_delta
