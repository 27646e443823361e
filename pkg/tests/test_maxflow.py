import io
import random

import pytest

from src.core.exceptions import UsageError, WitnessInfeasibleError
from src.modules.analysis.services import preprocess
from src.modules.graph.services import normalize, normalize_by_name
from src.modules.greedy.services import greedy_flow
from src.modules.maxflow.expansion import build_time_expanded, max_flow_static
from src.modules.maxflow.lp import build_lp, emit_lp, solve_lp
from src.modules.maxflow.services import (
    STRATEGIES,
    classify,
    exact_flow,
    lp_flow,
    lp_variable_count,
    max_flow,
    validate_witness,
)
from tests.factories import (
    boundary_instance,
    graph_from_records,
    graph_from_text,
    random_instance,
    random_records,
    single_out_dag_instance,
)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_reservation_max_flow(reservation_instance, strategy):
    result, report = max_flow(reservation_instance, strategy)
    assert result.value == 5
    assert report.resolved_by == "exact"
    assert set(result.transfers) == {0, 1, 2, 3, 4}
    assert result.runtime_us is not None
    validate_witness(reservation_instance, result)


def test_reservation_lp_oracle_agrees(reservation_instance):
    result = lp_flow(reservation_instance)
    assert result.value == 5
    assert result.method == "maxflow-lp"
    assert result.transfers[0] == 5 and result.transfers[1] == 3
    validate_witness(reservation_instance, result)


def test_reservation_lp_model(reservation_instance):
    model = build_lp(reservation_instance)
    assert lp_variable_count(reservation_instance) == 3
    assert [v.name for v in model.variables] == ["x2", "x3", "x4"]
    assert [model.variables[k].name for k in model.objective] == ["x3", "x4"]
    assert model.objective_constant == 0
    assert model.fixed == {0: 5, 1: 3}
    assert len(model.constraints) == 3


def test_emit_lp_is_deterministic(reservation_instance):
    model = build_lp(reservation_instance)
    first, second = io.StringIO(), io.StringIO()
    emit_lp(model, first)
    emit_lp(model, second)
    text = first.getvalue()
    assert text == second.getvalue()
    assert "Maximize\n obj: x3 + x4\n" in text
    assert "Subject To\n" in text
    assert " 0 <= x2 <= 5\n" in text
    assert text.endswith("End\n")


def test_witness_check_rejects_wrong_value(reservation_instance):
    result, _ = max_flow(reservation_instance)
    with pytest.raises(WitnessInfeasibleError):
        validate_witness(reservation_instance, result.model_copy(update={"value": 6}))


def test_witness_check_rejects_sending_before_receiving(reservation_instance):
    result, _ = max_flow(reservation_instance)
    transfers = {**result.transfers, 3: 4, 2: 5}
    with pytest.raises(WitnessInfeasibleError):
        validate_witness(reservation_instance, result.model_copy(update={"transfers": transfers}))


def test_same_timestamp_relay_carries_nothing(same_timestamp_instance):
    for strategy in STRATEGIES:
        assert max_flow(same_timestamp_instance, strategy)[0].value == 0
    assert lp_flow(same_timestamp_instance).value == 0


def test_stranded_interactions_get_zero_transfer():
    instance = normalize_by_name(graph_from_text("s a 5 2\na t 3 2\na t 6 1\n"), ["s"], ["t"])
    net = build_time_expanded(instance)
    assert net.stranded == (1,)
    result = max_flow_static(net)
    assert result.value == 1
    assert result.transfers[1] == 0


def test_holdover_lets_vertices_wait(chain_instance):
    result = exact_flow(chain_instance)
    assert result.value == 7
    validate_witness(chain_instance, result)


def test_resolution_paths(chain_instance, cascade_instance, simplifiable_instance):
    assert max_flow(chain_instance, "pre")[1].resolved_by == "greedy"
    result, report = max_flow(cascade_instance, "pre")
    assert report.resolved_by == "greedy-after-preprocess"
    assert result.value == exact_flow(cascade_instance).value
    assert set(result.transfers) == {ti.interaction.seq for ti in cascade_instance.graph.timeline}
    result, report = max_flow(simplifiable_instance, "presim")
    assert report.resolved_by == "exact"
    assert report.chains_reduced == 2
    assert result.value == 7


def test_zero_flow_instance_is_trivial():
    instance = normalize_by_name(graph_from_text("s a 1 1\nb t 2 1\n"), ["s"], ["t"])
    result, report = max_flow(instance, "presim")
    assert result.value == 0
    assert report.resolved_by == "trivial"


def test_unknown_strategy():
    with pytest.raises(UsageError):
        max_flow(random_instance(0), "simplex")


def test_classify(chain_instance, early_departures_instance, cascade_instance, reservation_instance, toy_graph):
    assert classify(chain_instance) == "A"
    assert classify(cascade_instance) == "B"
    assert classify(early_departures_instance) == "C"
    assert classify(reservation_instance) == "C"
    assert classify(normalize_by_name(toy_graph, ["u1"], ["u4"])) == "C"


def test_out_degree_one_dag_greedy_equals_max_flow():
    for seed in range(500):
        instance = single_out_dag_instance(seed)
        greedy = greedy_flow(instance).value
        exact = exact_flow(instance).value
        assert greedy == exact, f"seed {seed}: greedy {greedy}, max {exact}"


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_witnesses_are_feasible(strategy):
    for seed in range(200):
        instance = random_instance(seed, dag=seed % 4 != 0)
        result, _ = max_flow(instance, strategy)
        assert set(result.transfers) == {ti.interaction.seq for ti in instance.graph.timeline}, f"seed {seed}"
        validate_witness(instance, result)


def test_presim_witness_covers_the_original_chains(simplifiable_instance):
    result, report = max_flow(simplifiable_instance, "presim")
    assert report.chains_reduced == 2
    assert set(result.transfers) == {ti.interaction.seq for ti in simplifiable_instance.graph.timeline}
    validate_witness(simplifiable_instance, result)
    assert result.value == lp_flow(simplifiable_instance).value == 7


def test_presim_witnesses_on_random_dags_are_feasible():
    reduced = 0
    for seed in range(300):
        instance = random_instance(seed)
        result, report = max_flow(instance, "presim")
        reduced += report.chains_reduced > 0
        validate_witness(instance, result)
        assert result.value == exact_flow(instance).value, f"seed {seed}"
    assert reduced > 0


@pytest.mark.parametrize("strategy", ["pre", "presim"])
def test_pruned_interactions_carry_nothing(strategy):
    pruned_total = 0
    for seed in range(200):
        instance = random_instance(seed)
        if instance.zero_flow:
            continue
        kept = {ti.interaction.seq for ti in preprocess(instance)[0].graph.timeline}
        pruned = {ti.interaction.seq for ti in instance.graph.timeline} - kept
        pruned_total += len(pruned)
        result, _ = max_flow(instance, strategy)
        assert all(result.transfers[seq] == 0 for seq in pruned), f"seed {seed}"
    assert pruned_total > 0


def test_raising_a_quantity_never_lowers_the_flow():
    for seed in range(200):
        rng = random.Random(seed)
        records = random_records(rng, rng.randint(3, 8), rng.randint(8, 30), dag=seed % 3 != 0)
        k = rng.randrange(len(records))
        src, dst, t, q = records[k]
        raised = records[:k] + [(src, dst, t, q + rng.randint(1, 5))] + records[k + 1:]
        before = exact_flow(boundary_instance(graph_from_records(records))).value
        after = exact_flow(boundary_instance(graph_from_records(raised))).value
        assert after >= before, f"seed {seed}: {before} -> {after}"


def test_multi_source_multi_sink_matches_lp_oracle():
    checked = 0
    for seed in range(150):
        rng = random.Random(seed)
        graph = graph_from_records(random_records(rng, rng.randint(4, 8), rng.randint(8, 30), dag=seed % 3 != 0))
        vertices = sorted(graph.vertices)
        sources = set(rng.sample(vertices, 2))
        sinks = set(rng.sample(vertices, 2))
        instance = normalize(graph, sources, sinks)
        if instance.zero_flow:
            continue
        checked += 1
        exact = exact_flow(instance)
        oracle = lp_flow(instance)
        assert exact.value == oracle.value, f"seed {seed}: expanded {exact.value}, lp {oracle.value}"
        validate_witness(instance, exact)
    assert checked > 50


@pytest.mark.slow
def test_time_expansion_matches_lp_oracle():
    for seed in range(1000):
        instance = random_instance(seed, dag=seed % 4 != 0)
        exact = exact_flow(instance)
        oracle = solve_lp(build_lp(instance))
        assert exact.value == oracle.value, f"seed {seed}: expanded {exact.value}, lp {oracle.value}"
        validate_witness(instance, oracle)
