# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

from fractions import Fraction

import numpy as np
import pytest

from pipereuse.dag import (
    ROOT_ID,
    Dag,
    Node,
    OpSignature,
    PipelineSpec,
    active_set,
    execution_plan,
    level_sizes,
    max_redundant_pipelines,
    max_speedup_uniform,
    merge_pipelines,
    node_counts,
    speedup,
    speedup_ratio,
    total_cost_independent,
    total_cost_merged,
)
from pipereuse.errors import ConfigurationError, StructuralError, UndefinedRatioError


def test_signature_equality_is_canonical():
    assert OpSignature.create("A", {"x": 1, "y": 0.5}) == OpSignature.create("A", {"y": 0.5, "x": 1})
    assert OpSignature.create("A", {"x": 1}) != OpSignature.create("A", {"x": "1"})
    assert OpSignature.create("A", {"x": np.int64(3)}) == OpSignature.create("A", {"x": 3})
    assert len({OpSignature.create("B", {"p": 2}), OpSignature.create("B", {"p": 2})}) == 1


def test_merge_toy_shares_prefixes(toy_dag):
    operators = toy_dag.operator_nodes()
    names = sorted(node.signature.operator_name for node in operators)
    assert names == ["A", "B", "B", "C", "C", "C"]
    assert toy_dag.is_merged()
    assert level_sizes(toy_dag) == [1, 2, 3]
    assert len(toy_dag.children(ROOT_ID)) == 1


def test_merge_is_idempotent(toy, toy_dag):
    again = merge_pipelines(toy_dag.pipelines())
    assert len(again) == len(toy_dag)
    assert sorted(p.stages for p in again.pipelines()) == sorted(p.stages for p in toy)


def test_remerge_gives_isomorphic_dag(toy, toy_dag, pipeline, isomorphic):
    assert isomorphic(merge_pipelines(toy_dag.pipelines()), toy_dag)
    assert isomorphic(merge_pipelines(list(reversed(toy))), toy_dag)
    assert not isomorphic(merge_pipelines(toy + [pipeline(("A", {}), ("D", {}))]), toy_dag)

    pipelines, costs = _random_pipelines(np.random.default_rng(5), stages=4, count=12)
    dag = merge_pipelines(pipelines, costs)
    assert isomorphic(merge_pipelines(dag.pipelines(), costs), dag)


def _random_pipelines(rng, stages, count):
    """Distinct random pipelines over three values per stage, with a positive cost per signature."""
    pipelines = set()
    while len(pipelines) < min(count, 3**stages):
        pipelines.add(
            PipelineSpec(tuple(OpSignature.create(f"op{s}", {"v": int(rng.integers(0, 3))}) for s in range(stages)))
        )
    pipelines = sorted(pipelines, key=lambda p: [s.canonical for s in p.stages])
    signatures = sorted({s for p in pipelines for s in p.stages}, key=lambda s: s.canonical)
    costs = {signature: float(rng.uniform(0.5, 2.0)) for signature in signatures}
    return pipelines, costs


def test_merged_cost_at_most_independent():
    rng = np.random.default_rng(1)
    for _ in range(200):
        pipelines, costs = _random_pipelines(rng, int(rng.integers(1, 5)), int(rng.integers(1, 8)))
        merged = total_cost_merged(merge_pipelines(pipelines, costs))
        independent = total_cost_independent(pipelines, costs)
        shares_prefix = len({p.stages[0] for p in pipelines}) < len(pipelines)
        if shares_prefix:
            assert merged < independent
        else:
            assert merged == pytest.approx(independent)


def test_disjoint_pipelines_cost_the_same_merged(pipeline):
    pipelines = [pipeline(("A", {"p": i}), ("B", {}), ("C", {})) for i in range(4)]
    costs = {stage: 1.0 + i for p in pipelines for i, stage in enumerate(p.stages)}
    assert total_cost_merged(merge_pipelines(pipelines, costs)) == total_cost_independent(pipelines, costs)


def test_merge_counts_duplicates(toy):
    dag = merge_pipelines(toy + [toy[0]])
    assert dag.duplicate_pipelines == 1
    assert len(dag.operator_nodes()) == 6


def test_merge_disjoint_pipelines(pipeline):
    pipelines = [pipeline(("A", {"p": i}), ("B", {})) for i in range(3)]
    dag = merge_pipelines(pipelines)
    assert len(dag.operator_nodes()) == 6
    assert speedup(pipelines) == 1.0


def test_toy_costs(toy, toy_dag):
    assert total_cost_independent(toy) == 9
    assert total_cost_merged(toy_dag) == 6
    assert speedup(toy) == pytest.approx(1.5)
    assert node_counts(toy) == (9, 6)


def test_missing_cost_names_signature(toy):
    costs = {toy[0].stages[0]: 1.0}
    with pytest.raises(ConfigurationError, match="B"):
        merge_pipelines(toy, costs)


def test_speedup_ratio_undefined():
    with pytest.raises(UndefinedRatioError):
        speedup_ratio(3.0, 0.0)


def test_max_speedup_bound():
    assert max_speedup_uniform(3, 3) == Fraction(9, 5)
    assert max_speedup_uniform(1, 7) == 1
    for stages, count in [(1, 1), (3, 3), (4, 10), (7, 2)]:
        assert Fraction(speedup(max_redundant_pipelines(stages, count))).limit_denominator() == max_speedup_uniform(
            stages, count
        )


def test_random_pipeline_sets_respect_bound():
    rng = np.random.default_rng(0)
    for _ in range(200):
        stages = int(rng.integers(1, 6))
        count = int(rng.integers(1, 12))
        pipelines = set()
        while len(pipelines) < count:
            pipelines.add(
                PipelineSpec(tuple(OpSignature.create(f"op{s}", {"v": int(rng.integers(0, 3))}) for s in range(stages)))
            )
            if len(pipelines) >= 3**stages:
                break
        pipelines = sorted(pipelines, key=lambda p: [s.canonical for s in p.stages])
        measured = speedup(pipelines)
        assert measured <= float(max_speedup_uniform(stages, len(pipelines))) + 1e-12


def test_plan_of_toy(toy_dag):
    plan = execution_plan(toy_dag)
    assert plan.T == 9
    assert len(plan.paths) == 3
    canonical = [[toy_dag.node(i).signature.canonical for i in path] for path in plan.paths]
    assert canonical == [
        ["A(p=0.1)", "B(p=2)", "C(p=10)"],
        ["A(p=0.1)", "B(p=2)", "C(p=5)"],
        ["A(p=0.1)", "B(p=4)", "C(p=8)"],
    ]
    edges = set(plan.covered_edges())
    assert edges == set(toy_dag.edges)


def test_active_set(toy_dag):
    plan = execution_plan(toy_dag)
    assert active_set(plan, 0) == frozenset(plan.paths[0])
    assert active_set(plan, 2) == frozenset(plan.paths[0][2:])
    assert active_set(plan, 4) == frozenset(plan.paths[1][1:])
    with pytest.raises(IndexError):
        active_set(plan, plan.T)


def test_tree_plan_length(binary_tree):
    assert execution_plan(binary_tree).T == 12


def test_dag_rejects_cycles_and_unreachable_nodes():
    nodes = [Node("r", OpSignature("r")), Node("a", OpSignature("a")), Node("b", OpSignature("b"))]
    with pytest.raises(StructuralError):
        Dag(nodes, [("r", "a"), ("a", "b"), ("b", "a")], root="r", synthetic_root=False)
    with pytest.raises(StructuralError):
        Dag(nodes, [("r", "a")], root="r", synthetic_root=False)


def test_negative_cost_rejected():
    with pytest.raises(ConfigurationError):
        Node("a", OpSignature("a"), cost=-1.0)


def test_path_of(toy, toy_dag):
    for pipeline in toy:
        path = toy_dag.path_of(pipeline)
        assert path[0] == ROOT_ID
        assert [toy_dag.node(i).signature for i in path[1:]] == list(pipeline.stages)
    assert toy_dag.path_of(PipelineSpec((OpSignature("Z"),))) is None
