# This source code is licensed under the Apache License, Version 2.0
# found in the LICENSE file in the root directory of this source tree.

import math

import numpy as np
import pytest

from pipereuse.dag import OpSignature, PipelineSpec, merge_pipelines, total_cost_merged
from pipereuse.early_stopping import (
    SHParams,
    SyntheticOracle,
    TrainingMode,
    concat_generations,
    generation_allocations,
    generic_early_stopping,
    min_resource,
    sh_budget,
    sh_subdags,
    successive_halving,
)
from pipereuse.errors import ConfigurationError, ConsistencyError, ContractViolation


def test_min_resource():
    assert min_resource(SHParams(16, 1.0, 4, 3)) == pytest.approx(1 / 16)
    assert min_resource(SHParams(256, 1.0, 4, 5)) == pytest.approx(1 / 256)
    assert min_resource(SHParams(5, 2.0, 3, 1)) == pytest.approx(2.0)


def test_budget_of_four_generation_example():
    budget = sh_budget(SHParams(16, 1.0, 4, 3))
    assert budget.sh == pytest.approx(3.0)
    assert budget.full == pytest.approx(16.0)
    assert budget.warm == pytest.approx(2.5)
    assert budget.ratio > 5


def test_allocations():
    allocations = generation_allocations(SHParams(16, 1.0, 4, 3))
    assert [a.population for a in allocations] == [16, 4, 1]
    assert [a.resource for a in allocations] == pytest.approx([1 / 16, 1 / 4, 1.0])
    assert [a.incremental_resource for a in allocations] == pytest.approx([1 / 16, 3 / 16, 3 / 4])


@pytest.mark.parametrize(
    "n, eta, G",
    [(3, 4, 2), (15, 4, 3), (1, 2, 2)],
)
def test_population_too_small(n, eta, G):
    with pytest.raises(ConfigurationError, match="at least one configuration will be trained"):
        SHParams(n, 1.0, eta, G)


def test_parse():
    assert SHParams.parse("16,1,4,3") == SHParams(16, 1.0, 4, 3)
    with pytest.raises(ConfigurationError):
        SHParams.parse("16,1,4")
    with pytest.raises(ConfigurationError):
        SHParams(16, 1.0, 1, 3)


def test_generic_loop_keeps_best_halves():
    scores = {i: s for i, s in enumerate([0.9, 0.1, 0.5, 0.3, 0.8, 0.2, 0.7, 0.6])}

    def step(population, g):
        return [scores[i] for i in population]

    def prune(population, values, g):
        ranked = sorted(zip(values, population))
        return [i for _, i in ranked[: len(population) // 2]]

    result = generic_early_stopping(list(scores), 2, step, prune, lambda population, g: population)
    assert sorted(result.population) == [1, 5]
    assert [len(record.survivors) for record in result.history] == [8, 4]


def test_generic_loop_contracts():
    with pytest.raises(ContractViolation):
        generic_early_stopping([], 1, lambda p, g: [], lambda p, s, g: p, lambda p, g: p)
    with pytest.raises(ContractViolation):
        generic_early_stopping([1, 2], 1, lambda p, g: [0.0] * len(p), lambda p, s, g: [], lambda p, g: p)
    with pytest.raises(ContractViolation):
        generic_early_stopping([1, 2], 1, lambda p, g: [0.0], lambda p, s, g: p, lambda p, g: p)


def test_successive_halving_finds_argmin_of_resource_free_scores():
    rng = np.random.default_rng(0)
    for table in range(1000):
        eta = int(rng.integers(2, 5))
        G = int(rng.integers(1, 4))
        n = eta ** (G - 1) + int(rng.integers(0, 20))
        oracle = SyntheticOracle(n, seed=table)
        result = successive_halving(list(range(n)), SHParams(n, 1.0, eta, G), oracle, seed=table)
        assert result.winner == int(np.argmin(oracle.scores))


def test_successive_halving_history():
    params = SHParams(16, 1.0, 4, 3)
    result = successive_halving(list(range(16)), params, SyntheticOracle(16, seed=1))
    assert [len(generation) for generation in result.survivors_per_generation()] == [16, 4, 1]
    assert [record.resource for record in result.history] == pytest.approx([1 / 16, 1 / 4, 1.0])
    survivors = [set(generation) for generation in result.survivors_per_generation()]
    assert survivors[2] <= survivors[1] <= survivors[0]


def test_successive_halving_threads_match_sequential():
    params = SHParams(27, 1.0, 3, 3)
    oracle = SyntheticOracle(27, seed=4, noise=0.5)
    sequential = successive_halving(list(range(27)), params, oracle, seed=2)
    threaded = successive_halving(list(range(27)), params, oracle, seed=2, num_workers=4)
    assert sequential.history == threaded.history
    assert sequential.winner == threaded.winner


def test_failing_oracle_scores_infinity():
    def oracle(config, resource, seed):
        if config == 0:
            raise RuntimeError("diverged")
        return float(config)

    result = successive_halving(list(range(4)), SHParams(4, 1.0, 2, 2), oracle)
    assert math.isinf(result.history[0].scores[0])
    assert result.winner == 1
    assert len(result.diagnostics) == 1
    assert "diverged" in result.diagnostics[0]


def test_wrong_population_size():
    with pytest.raises(ContractViolation):
        successive_halving([0, 1, 2], SHParams(4, 1.0, 2, 2), SyntheticOracle(4))


def _star(n, train_cost=1.0):
    """One shared preprocessing node feeding n training sinks."""
    prep = OpSignature("prep")
    pipelines = [PipelineSpec((prep, OpSignature.create("train", {"variant": i}))) for i in range(n)]

    def costs(stage, signature):
        return 1.0 if stage == 0 else train_cost

    return merge_pipelines(pipelines, costs)


def _survivor_sinks(dag, params, seed=0):
    sinks = [path[-1] for path in dag.paths()]
    result = successive_halving(list(range(params.n)), params, SyntheticOracle(params.n, seed=seed))
    return [[sinks[i] for i in generation] for generation in result.survivors_per_generation()]


def _training_cost(dags):
    return sum(dag.node(sink).cost for dag in dags for sink in dag.sinks())


@pytest.mark.parametrize(
    "n, eta, G, mode, expected",
    [
        (16, 4, 3, TrainingMode.RETRAIN, 3.0),
        (16, 4, 3, TrainingMode.WARM, 2.5),
        (4, 2, 2, TrainingMode.RETRAIN, 4.0),
    ],
)
def test_subdag_training_budget(n, eta, G, mode, expected):
    dag = _star(n)
    params = SHParams(n, 1.0, eta, G)
    dags = sh_subdags(dag, _survivor_sinks(dag, params), params, mode)
    assert len(dags) == G
    assert _training_cost(dags) == pytest.approx(expected)


def test_single_generation_is_identity():
    dag = _star(5)
    params = SHParams(5, 1.0, 4, 1)
    dags = sh_subdags(dag, _survivor_sinks(dag, params), params)
    assert dags == [dag]


def test_concatenated_generations_share_upstream_nodes():
    dag = _star(16)
    params = SHParams(16, 1.0, 4, 3)
    dags = sh_subdags(dag, _survivor_sinks(dag, params), params, TrainingMode.WARM)
    union, plan = concat_generations(dags)
    assert plan.T == 2 * (16 + 4 + 1)
    assert len(union.children(union.root)) == 1
    assert len(union.sinks()) == 21
    assert sum(union.node(i).cost for i in plan.sequence) == pytest.approx(21 + 2.5)


def _two_preps(n, prep_cost=1.0, train_cost=10.0):
    """Two preprocessing variants, each feeding half of n training sinks."""
    pipelines = [
        PipelineSpec((OpSignature.create("prep", {"variant": i % 2}), OpSignature.create("train", {"variant": i})))
        for i in range(n)
    ]

    def costs(stage, signature):
        return prep_cost if stage == 0 else train_cost

    return merge_pipelines(pipelines, costs)


@pytest.mark.parametrize("mode", [TrainingMode.WARM, TrainingMode.RETRAIN])
@pytest.mark.parametrize(
    "n, eta, G",
    [(16, 4, 3), (8, 2, 3), (27, 3, 3), (4, 4, 2)],
)
def test_generations_cost_less_than_full_training(n, eta, G, mode):
    assert eta ** (G - 1) / G > 1
    dag = _two_preps(n)
    params = SHParams(n, 1.0, eta, G)
    dags = sh_subdags(dag, _survivor_sinks(dag, params), params, mode)
    per_generation = sum(total_cost_merged(generation) for generation in dags)
    assert per_generation <= total_cost_merged(dag)
    # the union pays shared upstream nodes once
    union, _ = concat_generations(dags)
    assert total_cost_merged(union) <= per_generation


def test_subdag_consistency_checks():
    dag = _star(4)
    params = SHParams(4, 1.0, 2, 2)
    sinks = [path[-1] for path in dag.paths()]
    with pytest.raises(ConsistencyError):
        sh_subdags(dag, [sinks], params)
    with pytest.raises(ConsistencyError):
        sh_subdags(dag, [sinks[:2], sinks[2:3]], params)
    with pytest.raises(ConsistencyError):
        sh_subdags(dag, [sinks, ["nowhere"]], params)
