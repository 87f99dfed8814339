# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .profiles import (
    SCHEMA_VERSION,
    annotate_stages,
    backloaded_stage_costs,
    dag_to_profile,
    load_profile,
    profile_to_dag,
    save_profile,
)
from .spaces import builtin_space, builtin_spaces
from .trees import CostModel, SizeModel, InstanceDims, TreeSpec, gen_kary_tree, instance_dimensions
