# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np
import pandas as pd

from pipereuse.dag import Dag, ExecutionPlan
from pipereuse.errors import ConfigurationError, UndefinedRatioError

from .policies import CachePolicy
from .simulator import SimResult, simulate

logger = logging.getLogger("pipereuse")

# Frozen column order of summary CSVs; extra columns are only ever appended.
SUMMARY_COLUMNS = ["policy", "capacity", "trials", "mean_cost", "stdev", "speedup_vs_independent"]
EXTRA_COLUMNS = ["p10", "p50", "p90", "status"]


@dataclass(frozen=True)
class TrialSummary:
    policy: str
    capacity: float
    trials: int
    mean: float
    stdev: float
    p10: float
    p50: float
    p90: float
    costs: tuple

    def row(self, independent_cost: float, status: str = "ok") -> dict:
        speedup = independent_cost / self.mean if self.mean > 0 else float("nan")
        return {
            "policy": self.policy,
            "capacity": self.capacity,
            "trials": self.trials,
            "mean_cost": self.mean,
            "stdev": self.stdev,
            "speedup_vs_independent": speedup,
            "p10": self.p10,
            "p50": self.p50,
            "p90": self.p90,
            "status": status,
        }


def trial_seeds(base_seed: int, trials: int) -> List[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(base_seed).spawn(trials)]


def summarize(policy: str, capacity: float, costs: Sequence[float]) -> TrialSummary:
    values = np.asarray(costs, dtype=np.float64)
    p10, p50, p90 = np.percentile(values, [10, 50, 90])
    return TrialSummary(
        policy=policy,
        capacity=capacity,
        trials=len(values),
        mean=float(values.mean()),
        stdev=float(values.std(ddof=0)),
        p10=float(p10),
        p50=float(p50),
        p90=float(p90),
        costs=tuple(values.tolist()),
    )


def run_trials(
    plan: ExecutionPlan,
    dag: Dag,
    policy_factory: Callable[[int], CachePolicy],
    capacity: float,
    trials: int,
    base_seed: int = 0,
) -> TrialSummary:
    """Independent seeded simulations of one policy at one capacity."""
    if trials < 1:
        raise ConfigurationError(f"Need at least one trial, got {trials}")
    costs = []
    name = None
    for seed in trial_seeds(base_seed, trials):
        policy = policy_factory(seed)
        name = policy.name
        costs.append(simulate(plan, dag, policy, capacity, seed).total_cost)
    return summarize(name, capacity, costs)


def competitive_ratio(cost: float, reference: float) -> float:
    """Cost relative to a reference (usually OPT or the best policy)."""
    if reference <= 0:
        if cost <= 0:
            return 1.0
        raise UndefinedRatioError(f"Competitive ratio undefined against a reference cost of {reference}")
    return cost / reference


def trace_to_schedule(result: SimResult):
    """Admissions and evictions of a simulated run as a DeltaSchedule."""
    from pipereuse.opt.instance import DeltaSchedule

    entries = []
    for step in result.trace:
        entries.extend((step.t, victim, -1) for victim in step.evictions)
        entries.extend((step.t, admitted, +1) for admitted in step.admissions)
    return DeltaSchedule(tuple(entries))


def summary_frame(rows: Sequence[dict]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=SUMMARY_COLUMNS + EXTRA_COLUMNS)


def write_summary_csv(rows: Sequence[dict], path: str) -> pd.DataFrame:
    frame = summary_frame(rows)
    frame.to_csv(path, index=False, float_format="%.10g")
    logger.info(f"wrote {len(frame)} summary rows to {path}")
    return frame
