# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import pytest
from omegaconf import OmegaConf

from pipereuse.configs import pipereuse_default_config
from pipereuse.errors import ConfigurationError
from pipereuse.experiments import merge_summary, resolve_capacities, resolve_workload, sh_workload, sweep


def make_cfg(**overrides):
    cfg = OmegaConf.create(pipereuse_default_config)
    return OmegaConf.merge(cfg, OmegaConf.create(overrides))


def timit_cfg(branching, sh=None):
    workload = {
        "source": "space",
        "space": "timit",
        "sampler": "gridded_random",
        "n": 64,
        "branching": list(branching),
        "stage_costs": [1.0],
        "training_factor": 4.0,
    }
    overrides = {"workload": workload}
    if sh is not None:
        overrides["sh"] = sh
    return make_cfg(**overrides)


def speedups(rows):
    return {(row["policy"], row["capacity"]): row["speedup_vs_independent"] for row in rows}


def test_backloaded_timit_costs():
    workload = resolve_workload(timit_cfg((8, 8)))
    assert workload.independent_cost == pytest.approx(64 * 5.0)
    assert merge_summary(workload)["merged_cost"] == pytest.approx(8 + 64 * 4.0)


def test_more_generations_give_more_speedup():
    base = resolve_workload(timit_cfg((8, 8)))
    run = sh_workload(timit_cfg((8, 8), {"n": 64, "R": 1.0, "eta": 4, "G": 4}), base)
    single = sh_workload(timit_cfg((8, 8), {"n": 64, "R": 1.0, "eta": 4, "G": 1}), base)
    assert run.workload.independent_cost == single.workload.independent_cost == base.independent_cost

    capacities = [0.0, 1.0, 4.0, 16.0, 72.0]
    opt_cfg = make_cfg().opt
    policies = ["LRU", "WRECIPROCAL"]
    pruned = speedups(sweep(run.workload, policies, capacities, trials=20, seed=0, opt_cfg=opt_cfg))
    full = speedups(sweep(single.workload, policies, capacities, trials=20, seed=0, opt_cfg=opt_cfg))
    for key, value in full.items():
        assert pruned[key] > value


def test_single_generation_keeps_workload():
    base = resolve_workload(timit_cfg((8, 8)))
    single = sh_workload(timit_cfg((8, 8), {"n": 64, "R": 1.0, "eta": 4, "G": 1}), base)
    assert single.workload.plan.sequence == base.plan.sequence


def test_sh_population_must_match_workload():
    base = resolve_workload(timit_cfg((8, 8)))
    with pytest.raises(ConfigurationError):
        sh_workload(timit_cfg((8, 8), {"n": 16, "R": 1.0, "eta": 4, "G": 3}), base)


def test_wreciprocal_speedup_falls_with_upstream_branching():
    branchings = [(2, 32), (4, 16), (8, 8), (16, 4), (32, 2), (64, 1)]
    opt_cfg = make_cfg().opt
    for capacity in (0.0, 200.0):
        values = []
        for branching in branchings:
            workload = resolve_workload(timit_cfg(branching))
            (row,) = sweep(workload, ["WRECIPROCAL"], [capacity], trials=10, seed=0, opt_cfg=opt_cfg)
            values.append(row["speedup_vs_independent"])
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
    assert values[0] == pytest.approx(320.0 / 258.0)


def test_geometric_capacities_include_zero_and_total_size():
    workload = resolve_workload(make_cfg(workload={"source": "toy"}))
    capacities = resolve_capacities(make_cfg(workload={"source": "toy"}, capacities={"stop": None, "num": 3}), workload)
    assert capacities[0] == 0.0
    assert capacities[-1] == pytest.approx(workload.total_size)
    assert capacities == sorted(capacities)


def test_opt_row_beyond_guardrail_is_marked():
    workload = resolve_workload(make_cfg(workload={"source": "toy"}))
    opt_cfg = make_cfg(opt={"max_nodes": 2}).opt
    (row,) = sweep(workload, ["OPT"], [1.0], trials=1, seed=0, opt_cfg=opt_cfg)
    assert row["status"] == "timeout"
    assert row["trials"] == 0


def test_toy_sweep_opt_row():
    workload = resolve_workload(make_cfg(workload={"source": "toy"}))
    rows = sweep(workload, ["LRU", "OPT"], [0.0, 2.0], trials=5, seed=0, opt_cfg=make_cfg().opt)
    by_key = {(row["policy"], row["capacity"]): row for row in rows}
    assert by_key[("OPT", 0.0)]["mean_cost"] == pytest.approx(9.0)
    assert by_key[("OPT", 2.0)]["mean_cost"] == pytest.approx(6.0)
    assert by_key[("LRU", 2.0)]["mean_cost"] >= by_key[("OPT", 2.0)]["mean_cost"]
