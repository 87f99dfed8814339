# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from .policies import (
    EPSILON,
    CachePolicy,
    CacheView,
    LotteryPolicy,
    LRUPolicy,
    PolicyStats,
    PolicyType,
    ReciprocalPolicy,
    WeightedReciprocalPolicy,
    make_policy,
    policy_lru,
    policy_reciprocal,
    policy_wreciprocal,
)
from .simulator import SimResult, StepOutcome, StepTrace, admissible, replay_cost, simulate
from .trials import (
    SUMMARY_COLUMNS,
    TrialSummary,
    competitive_ratio,
    run_trials,
    summarize,
    summary_frame,
    trace_to_schedule,
    trial_seeds,
    write_summary_csv,
)
