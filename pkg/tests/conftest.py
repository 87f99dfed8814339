# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import networkx as nx
import pytest

from pipereuse.dag import OpSignature, PipelineSpec, merge_pipelines
from pipereuse.experiments import toy_pipelines
from pipereuse.workloads import TreeSpec, gen_kary_tree


@pytest.fixture
def toy():
    return toy_pipelines()


@pytest.fixture
def toy_dag(toy):
    return merge_pipelines(toy)


@pytest.fixture
def sig():
    def make(name, **params):
        return OpSignature.create(name, params)

    return make


@pytest.fixture
def pipeline(sig):
    def make(*stages):
        return PipelineSpec(tuple(sig(name, **params) for name, params in stages))

    return make


@pytest.fixture
def binary_tree():
    return gen_kary_tree(TreeSpec(k=2, d=2, size=1.0))


@pytest.fixture(autouse=True)
def _chdir_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def isomorphic():
    """Whether two DAGs have the same operator graph, matching signature, cost and size."""

    def operator_graph(dag):
        graph = dag.to_networkx()
        if dag.synthetic_root:
            graph.remove_node(dag.root)
        return graph

    def same_node(a, b):
        return a["signature"] == b["signature"] and a["size"] == b["size"] and a["cost"] == b["cost"]

    def check(first, second):
        return nx.is_isomorphic(operator_graph(first), operator_graph(second), node_match=same_node)

    return check
