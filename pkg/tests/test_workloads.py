# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import json

import pytest

from pipereuse.dag import execution_plan, merge_pipelines, total_cost_merged
from pipereuse.errors import ConfigurationError, ProfileError
from pipereuse.workloads import (
    CostModel,
    TreeSpec,
    annotate_stages,
    backloaded_stage_costs,
    builtin_spaces,
    dag_to_profile,
    gen_kary_tree,
    load_profile,
    profile_to_dag,
    save_profile,
)


def test_costly_root_tree():
    dag = gen_kary_tree(TreeSpec.costly_root(d=3))
    assert len(dag) == 40
    assert dag.node(dag.root).cost == 100.0
    assert {node.size for node in dag} == {10.0}
    assert total_cost_merged(dag) == 139.0
    assert execution_plan(dag).T == 108


def test_mixed_costs_are_coupled():
    dag = gen_kary_tree(TreeSpec.mixed_costs(d=3, seed=5))
    pairs = {(node.cost, node.size) for node in dag}
    assert pairs <= {(1.0, 10.0), (100.0, 50.0)}
    assert len(pairs) == 2


def test_tree_is_seeded():
    spec = TreeSpec(k=3, d=2, cost_model=CostModel.TWO_POINT, seed=9)
    first = [(n.id, n.cost) for n in gen_kary_tree(spec)]
    assert first == [(n.id, n.cost) for n in gen_kary_tree(spec)]


def test_tree_spec_validation():
    with pytest.raises(ConfigurationError):
        TreeSpec(k=1, d=2)
    with pytest.raises(ConfigurationError):
        TreeSpec(k=2, d=2, coupled=True)
    with pytest.raises(ValueError):
        TreeSpec(k=2, d=2, cost_model="exotic")


def test_profile_round_trip(tmp_path, toy_dag, isomorphic):
    dag = toy_dag.replace(
        costs={node.id: 2.0 for node in toy_dag.operator_nodes()},
        sizes={node.id: 3.0 for node in toy_dag.operator_nodes()},
    )
    path = save_profile(dag, str(tmp_path / "toy.json"), metadata={"dataset": "toy"})
    loaded, pipelines = load_profile(path)
    assert len(pipelines) == 3
    assert sorted(p.stages for p in pipelines) == sorted(p.stages for p in dag.pipelines())
    assert total_cost_merged(loaded) == total_cost_merged(dag)
    assert isomorphic(loaded, dag)
    assert json.loads((tmp_path / "toy.json").read_text())["metadata"]["dataset"] == "toy"


def test_profile_with_several_sources_gets_synthetic_root(pipeline):
    dag = merge_pipelines([pipeline(("A", {"p": 1}), ("B", {})), pipeline(("A", {"p": 2}), ("B", {}))])
    loaded = profile_to_dag(dag_to_profile(dag))
    assert loaded.synthetic_root
    assert len(loaded.operator_nodes()) == 4


def _profile(nodes, **metadata):
    return {"schema_version": 1, "metadata": {"time_unit": "s", "memory_unit": "MB", **metadata}, "nodes": nodes}


@pytest.mark.parametrize(
    "nodes, record",
    [
        ([{"id": "a", "operator": "A", "size": 1}], "a"),
        ([{"id": "a", "operator": "A", "cost": -1, "size": 1}], "a"),
        ([{"id": "a", "operator": "A", "cost": 1, "size": 1}, {"id": "a", "operator": "B", "cost": 1, "size": 1}], "a"),
        ([{"id": "a", "operator": "A", "cost": 1, "size": 1, "parents": ["ghost"]}], "a"),
    ],
)
def test_profile_errors_name_the_record(nodes, record):
    with pytest.raises(ProfileError) as info:
        profile_to_dag(_profile(nodes))
    assert info.value.record == record


def test_profile_cycle():
    nodes = [
        {"id": "r", "operator": "R", "cost": 1, "size": 1},
        {"id": "a", "operator": "A", "cost": 1, "size": 1, "parents": ["r", "b"]},
        {"id": "b", "operator": "B", "cost": 1, "size": 1, "parents": ["a"]},
    ]
    with pytest.raises(ProfileError, match="cycle"):
        profile_to_dag(_profile(nodes))


def test_profile_units_and_version():
    with pytest.raises(ConfigurationError):
        profile_to_dag({"schema_version": 2, "metadata": {"time_unit": "s", "memory_unit": "MB"}, "nodes": []})
    with pytest.raises(ConfigurationError):
        profile_to_dag({"schema_version": 1, "metadata": {}, "nodes": []})
    with pytest.raises(ConfigurationError):
        load_profile("missing.json")


def test_annotate_stages(toy_dag):
    dag = annotate_stages(toy_dag, costs=[1.0, 2.0, 8.0], sizes={"A": 5.0})
    by_operator = {node.signature.operator_name: node for node in dag.operator_nodes()}
    assert by_operator["C"].cost == 8.0
    assert by_operator["B"].cost == 2.0
    assert by_operator["A"].size == 5.0
    assert by_operator["B"].size == 1.0
    with pytest.raises(ConfigurationError):
        annotate_stages(toy_dag, costs=[1.0])


def test_backloaded_costs():
    assert backloaded_stage_costs([1.0, 2.0], 4.0) == [1.0, 2.0, 12.0]


def test_builtin_spaces_have_stages():
    spaces = builtin_spaces()
    assert set(spaces) == {"amazon", "newsgroups", "openml_micro", "timit"}


def test_generated_tree_survives_profile(tmp_path, isomorphic):
    dag = gen_kary_tree(TreeSpec.mixed_costs(d=2, seed=3))
    loaded, _ = load_profile(save_profile(dag, str(tmp_path / "tree.json")))
    assert isomorphic(loaded, dag)
