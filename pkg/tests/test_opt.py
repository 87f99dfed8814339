# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import numpy as np
import pytest

from pipereuse.cache import make_policy, run_trials
from pipereuse.dag import OpSignature, PipelineSpec, execution_plan, merge_pipelines
from pipereuse.errors import ConfigurationError
from pipereuse.opt import (
    DeltaSchedule,
    StopReason,
    brute_force,
    build_instance,
    build_model,
    export_milp,
    resident_matrix,
    solve_exact,
    solve_milp,
    step_indicators,
    validate_delta,
)
from pipereuse.opt.validate import ADMIT_ONLY_ACTIVE, CAPACITY, EVICT_ONLY_RESIDENT
from pipereuse.workloads import TreeSpec, gen_kary_tree, instance_dimensions


@pytest.mark.parametrize(
    "k, d, pipelines, nodes, steps, x_size",
    [
        (2, 2, 4, 7, 12, 84),
        (2, 3, 8, 15, 32, 480),
        (2, 4, 16, 31, 80, 2480),
        (2, 5, 32, 63, 192, 12096),
        (3, 2, 9, 13, 27, 351),
        (3, 3, 27, 40, 108, 4320),
        (3, 4, 81, 121, 405, 49005),
        (3, 5, 243, 364, 1458, 530712),
        (4, 2, 16, 21, 48, 1008),
        (4, 3, 64, 85, 256, 21760),
        (4, 4, 256, 341, 1280, 436480),
        (4, 5, 1024, 1365, 6144, 8386560),
    ],
)
def test_instance_dimensions_of_perfect_trees(k, d, pipelines, nodes, steps, x_size):
    dims = {(row.k, row.d): row for row in instance_dimensions()}
    row = dims[(k, d)]
    assert (row.pipelines, row.nodes, row.plan_length, row.x_size) == (pipelines, nodes, steps, x_size)
    if nodes <= 121:
        dag = gen_kary_tree(TreeSpec(k=k, d=d))
        instance = build_instance(dag, execution_plan(dag), capacity=1.0)
        assert (instance.n, instance.T, instance.x_variable_count) == (nodes, steps, x_size)
        assert len(dag.sinks()) == pipelines


def _random_instance(rng):
    while True:
        length = int(rng.integers(1, 4))
        count = int(rng.integers(1, 16 // length + 1))
        pipelines = {
            PipelineSpec(tuple(OpSignature.create(f"s{s}", {"v": int(rng.integers(0, 3))}) for s in range(length)))
            for _ in range(count)
        }
        dag = merge_pipelines(sorted(pipelines, key=lambda p: [s.canonical for s in p.stages]))
        operators = dag.operator_nodes()
        if len(operators) <= 8:
            break
    costs = {node.id: float(rng.integers(0, 6)) for node in operators}
    sizes = {node.id: float(rng.integers(1, 5)) for node in operators}
    return dag.replace(costs=costs, sizes=sizes)


def test_exact_solver_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(100):
        dag = _random_instance(rng)
        plan = execution_plan(dag)
        assert plan.T <= 16
        total_size = sum(node.size for node in dag.operator_nodes())
        for capacity in (0.0, float(rng.integers(1, int(total_size) + 1)), total_size):
            instance = build_instance(dag, plan, capacity)
            result = solve_exact(instance)
            assert result.proved_optimal
            assert result.optimal_cost == pytest.approx(brute_force(instance))
            validation = validate_delta(instance, result.schedule)
            assert validation.feasible, validation.violations
            assert validation.cost == pytest.approx(result.optimal_cost)


def test_toy_optimum(toy_dag):
    plan = execution_plan(toy_dag)
    unit = toy_dag.replace(sizes={node.id: 1.0 for node in toy_dag.operator_nodes()})
    assert solve_exact(build_instance(unit, plan, 0.0)).optimal_cost == 9
    assert solve_exact(build_instance(unit, plan, 1.0)).optimal_cost == 7
    assert solve_exact(build_instance(unit, plan, 2.0)).optimal_cost == 6


def test_cost_is_non_increasing_in_capacity(binary_tree):
    plan = execution_plan(binary_tree)
    costs = [solve_exact(build_instance(binary_tree, plan, c)).optimal_cost for c in range(0, 8)]
    assert costs[0] == plan.T
    assert all(a >= b for a, b in zip(costs, costs[1:]))
    assert costs[-1] == len(binary_tree)


@pytest.mark.parametrize("spec", [TreeSpec.costly_root(d=2), TreeSpec.mixed_costs(d=2, seed=3)])
def test_optimum_dominates_online_policies(spec):
    dag = gen_kary_tree(spec)
    plan = execution_plan(dag)
    for capacity in (0.0, 10.0, 30.0, 60.0, 130.0):
        optimum = solve_exact(build_instance(dag, plan, capacity)).optimal_cost
        for name in ("LRU", "RECIPROCAL", "WRECIPROCAL"):
            summary = run_trials(plan, dag, lambda seed, name=name: make_policy(name, seed), capacity, trials=20)
            assert optimum <= min(summary.costs) + 1e-9


def test_timeout_returns_incumbent():
    dag = gen_kary_tree(TreeSpec(k=3, d=4, size=1.0))
    instance = build_instance(dag, execution_plan(dag), capacity=5.0)
    result = solve_exact(instance, time_limit=0.0)
    assert not result.proved_optimal
    assert result.stop_reason == StopReason.TIME_LIMIT
    assert result.optimal_cost <= instance.total_recompute_cost()
    assert validate_delta(instance, result.schedule).feasible
    record = result.to_dict()
    assert record["explored_states"] is None
    assert "wall_time" not in record


def test_state_budget_is_reproducible():
    dag = gen_kary_tree(TreeSpec(k=3, d=4, size=1.0))
    instance = build_instance(dag, execution_plan(dag), capacity=5.0)
    records = [solve_exact(instance, max_states=50).to_dict() for _ in range(3)]
    assert records[0]["stop_reason"] == "state_budget"
    assert not records[0]["proved_optimal"]
    assert records[0]["explored_states"] == 51
    assert records[1] == records[0] and records[2] == records[0]


def test_state_budget_large_enough_proves_optimum(toy_dag):
    instance = build_instance(toy_dag, execution_plan(toy_dag), 2.0)
    unbounded = solve_exact(instance)
    bounded = solve_exact(instance, max_states=unbounded.explored_states)
    assert bounded.stop_reason == StopReason.OPTIMAL
    assert bounded.optimal_cost == unbounded.optimal_cost


def test_validate_reports_violations(toy_dag):
    plan = execution_plan(toy_dag)
    unit = toy_dag.replace(sizes={node.id: 1.0 for node in toy_dag.operator_nodes()})
    instance = build_instance(unit, plan, 1.0)
    a, b2 = plan.sequence[0], plan.sequence[1]
    schedule = DeltaSchedule(((0, b2, 1), (0, a, 1), (1, b2, 1)))
    validation = validate_delta(instance, schedule)
    assert not validation.feasible
    assert validation.cost is None
    constraints = {violation.constraint for violation in validation.violations}
    assert {ADMIT_ONLY_ACTIVE, CAPACITY} <= constraints
    evict = validate_delta(instance, DeltaSchedule(((2, a, -1),)))
    assert [v.constraint for v in evict.violations] == [EVICT_ONLY_RESIDENT]


def test_schedule_json_round_trip():
    schedule = DeltaSchedule(((0, "n1", 1), (3, "n1", -1)))
    assert DeltaSchedule.from_json(schedule.to_json()) == schedule
    assert schedule.at(3) == [("n1", -1)]


def test_negative_capacity_is_rejected(binary_tree):
    with pytest.raises(ConfigurationError):
        build_instance(binary_tree, execution_plan(binary_tree), -1.0)


def test_milp_dimensions(binary_tree):
    model = build_model(build_instance(binary_tree, execution_plan(binary_tree), 2.0))
    assert (model.count("x_"), model.count("d_"), model.count("z_")) == (84, 84, 12)
    assert model.matrix.shape == (84 + 12 + 12, 180)


def test_milp_agrees_with_exact_solver(toy_dag):
    plan = execution_plan(toy_dag)
    dag = toy_dag.replace(
        costs={node.id: float(i + 1) for i, node in enumerate(toy_dag.operator_nodes())},
        sizes={node.id: 1.0 for node in toy_dag.operator_nodes()},
    )
    for capacity in (0.0, 1.0, 2.0):
        instance = build_instance(dag, plan, capacity)
        solution = solve_milp(instance)
        assert solution.cost == pytest.approx(solve_exact(instance).optimal_cost)
        x = resident_matrix(instance, solution.values)
        assert x.shape == (instance.n, instance.T)
        assert (x.T @ instance.sizes <= capacity + 1e-6).all()
        assert step_indicators(instance, solution.values).shape == (instance.T,)


def test_lp_export(binary_tree):
    text = export_milp(build_instance(binary_tree, execution_plan(binary_tree), 2.0), name="tree")
    assert "Minimize" in text
    assert "x_0_0" in text
    assert "capacity_11" in text
