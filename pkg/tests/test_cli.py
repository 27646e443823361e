import json
import sys

import pytest
from typer.testing import CliRunner

from src.core.exceptions import EXIT_DATA, EXIT_USAGE
from src.main import app, run
from tests.conftest import CYCLE_PATTERN, RESERVATION, TOY
from tests.factories import graph_from_text

runner = CliRunner()


def _json_lines(result):
    return [json.loads(line) for line in result.stdout.splitlines() if line.strip()]


# --- ingest / flow ---

def test_ingest_json(write_records):
    result = runner.invoke(app, ["ingest", str(write_records(RESERVATION)), "--json"])
    assert result.exit_code == 0, result.output
    summary = json.loads(result.stdout)
    assert (summary["vertices"], summary["edges"], summary["interactions"]) == (4, 5, 5)
    assert (summary["t_min"], summary["t_max"]) == (1, 5)


def test_ingest_writes_canonical_records(write_records, tmp_path):
    out = tmp_path / "canonical.tsv"
    result = runner.invoke(app, ["ingest", str(write_records(RESERVATION)), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert graph_from_text(out.read_text()).interaction_count == 5
    assert (tmp_path / "canonical.tsv.vertices.json").exists()


@pytest.mark.parametrize("method, value, solver", [
    ("greedy", 1, "greedy"),
    ("lp", 5, "maxflow-expanded"),
    ("pre", 5, "maxflow-expanded"),
    ("presim", 5, "maxflow-expanded"),
])
def test_flow_methods(write_records, method, value, solver):
    path = write_records(RESERVATION)
    result = runner.invoke(app, ["flow", str(path), "-s", "s", "-t", "t", "--method", method, "--json"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["value"] == value
    assert report["solver"] == solver
    assert report["instance_class"] == "C"
    assert report["lp_variables"] == 3


def test_flow_simplex_oracle_and_lp_file(write_records, tmp_path):
    lp_file = tmp_path / "model.lp"
    result = runner.invoke(
        app, ["flow", str(write_records(RESERVATION)), "--method", "lp", "--simplex", "--emit-lp", str(lp_file), "--json"]
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["value"] == 5
    assert report["solver"] == "maxflow-lp"
    assert report["source"] == "s" and report["sink"] == "t"
    assert lp_file.read_text().startswith("\\ tempoflow")


def test_flow_greedy_trace_text(write_records):
    result = runner.invoke(app, ["flow", str(write_records(RESERVATION)), "--method", "greedy", "--trace"])
    assert result.exit_code == 0, result.output
    assert "greedy trace" in result.stdout
    assert "value: 1" in result.stdout


def test_flow_strict_ties(write_records):
    path = write_records("s a 4 9\na t 4 9\n")
    loose = runner.invoke(app, ["flow", str(path), "--method", "greedy", "--json"])
    strict = runner.invoke(app, ["flow", str(path), "--method", "greedy", "--strict-ties", "--json"])
    assert json.loads(loose.stdout)["value"] == 9
    assert json.loads(strict.stdout)["value"] == 0


def test_flow_window(write_records):
    # drops s->y at t=1, so y has nothing to forward
    result = runner.invoke(app, ["flow", str(write_records(RESERVATION)), "--window", "2", "5", "-s", "s", "-t", "t", "--json"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.stdout)["value"] == 1


# --- exit codes ---

def test_unknown_method_is_a_usage_error(write_records):
    result = runner.invoke(app, ["flow", str(write_records(RESERVATION)), "--method", "simplex"])
    assert result.exit_code == EXIT_USAGE


def test_unknown_vertex_is_a_usage_error(write_records):
    result = runner.invoke(app, ["flow", str(write_records(RESERVATION)), "-s", "nobody"])
    assert result.exit_code == EXIT_USAGE
    assert "nobody" in result.output


def test_malformed_input_is_a_data_error(write_records):
    result = runner.invoke(app, ["ingest", str(write_records("a b 1 1\na b x 2\n"))])
    assert result.exit_code == EXIT_DATA
    assert "line 2" in result.output


def test_run_maps_click_errors_to_usage(monkeypatch, tmp_path):
    monkeypatch.setattr(sys, "argv", ["tempoflow", "flow", str(tmp_path / "missing.tsv")])
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == EXIT_USAGE


def test_run_passes_service_exit_codes(monkeypatch, write_records):
    monkeypatch.setattr(sys, "argv", ["tempoflow", "ingest", str(write_records("a a 1 1\n"))])
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == EXIT_DATA


def test_run_succeeds(monkeypatch):
    monkeypatch.setattr(sys, "argv", ["tempoflow", "info", "--json"])
    with pytest.raises(SystemExit) as exc:
        run()
    assert exc.value.code == 0


def test_info_lists_commands():
    result = runner.invoke(app, ["info", "--json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert {"ingest", "flow", "precompute", "patterns", "generate", "extract", "bench", "info"} <= set(payload["commands"])
    assert payload["settings"]["BENCH_SEED"] == 42


# --- patterns ---

def test_precompute_then_path_based_search(write_records, tmp_path):
    graph_file = write_records(TOY)
    pattern_file = write_records(CYCLE_PATTERN, "cycle.pat")
    tables = tmp_path / "tables"
    result = runner.invoke(app, ["precompute", str(graph_file), "--hops", "3", "--cyclic", "--out", str(tables)])
    assert result.exit_code == 0, result.output
    assert "3 rows" in result.stdout
    assert (tables / "paths_k3_cyclic.tfp").exists()

    result = runner.invoke(
        app, ["patterns", str(graph_file), "--pattern", str(pattern_file), "--method", "pb", "--tables", str(tables), "--json"]
    )
    assert result.exit_code == 0, result.output
    *matches, summary = _json_lines(result)
    assert sorted(m["value"] for m in matches) == [0, 1, 5]
    assert {m["coverage"] for m in matches} == {"full"}
    assert summary == {"method": "pb", "instances": 3, "avg_flow": 2.0}


def test_path_based_search_falls_back_to_browsing(write_records, tmp_path):
    graph_file = write_records(TOY)
    pattern_file = write_records(CYCLE_PATTERN, "cycle.pat")
    tables = tmp_path / "tables"
    runner.invoke(app, ["precompute", str(graph_file), "--hops", "2", "--open", "--out", str(tables)])
    result = runner.invoke(
        app, ["patterns", str(graph_file), "-p", str(pattern_file), "-m", "pb", "--tables", str(tables), "--json"]
    )
    assert result.exit_code == 0, result.output
    *matches, summary = _json_lines(result)
    assert len(matches) == 3
    assert summary["method"] == "gb"


def test_graph_browsing_text_output(write_records):
    result = runner.invoke(
        app, ["patterns", str(write_records(TOY)), "-p", str(write_records(CYCLE_PATTERN, "cycle.pat")), "--limit", "1"]
    )
    assert result.exit_code == 0, result.output
    lines = result.stdout.splitlines()
    assert lines[0] == "a=u1 b=u2 c=u3 5"
    assert lines[-1] == "instances: 1, avg_flow: 5.00"


def test_nonrigid_search(write_records):
    graph_file = write_records("a b 1 5\nb a 2 3\na c 1 4\nc a 3 6\n")
    pattern_file = write_records("a -> b -> a2:a\n", "pair.pat")
    result = runner.invoke(app, ["patterns", str(graph_file), "-p", str(pattern_file), "--min-paths", "2", "--json"])
    assert result.exit_code == 0, result.output
    match, summary = _json_lines(result)
    assert (match["anchor"], match["path_count"], match["total_flow"]) == ("a", 2, 7)
    assert summary["method"] == "nonrigid"


def test_bad_pattern_is_a_usage_error(write_records):
    result = runner.invoke(app, ["patterns", str(write_records(TOY)), "-p", str(write_records("a -> b\nb -> a\n", "bad.pat"))])
    assert result.exit_code == EXIT_USAGE


# --- workload ---

def test_generate_to_stdout():
    result = runner.invoke(app, ["generate", "--class", "A", "-n", "6", "-e", "7", "-i", "20", "--seed", "3"])
    assert result.exit_code == 0, result.output
    graph = graph_from_text(result.stdout)
    assert graph.interaction_count == 20
    assert len(graph.edges) == 7


def test_generate_csv_file(tmp_path):
    out = tmp_path / "synthetic.csv"
    result = runner.invoke(app, ["generate", "--class", "C", "--format", "csv", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert len(out.read_text().splitlines()) == 60
    assert "," in out.read_text().splitlines()[0]


def test_generate_infeasible_spec():
    result = runner.invoke(app, ["generate", "--class", "A", "-n", "5", "-e", "9", "-i", "20"])
    assert result.exit_code == EXIT_USAGE


def test_extract_json_and_files(write_records, tmp_path):
    out = tmp_path / "subgraphs"
    result = runner.invoke(app, ["extract", str(write_records(TOY)), "--hops", "3", "--out", str(out), "--json"])
    assert result.exit_code == 0, result.output
    summaries = json.loads(result.stdout)
    assert [s["seed"] for s in summaries] == ["u1", "u2", "u3"]
    assert sorted(p.name for p in out.iterdir()) == ["subgraph_0000.tsv", "subgraph_0001.tsv", "subgraph_0002.tsv"]


def test_extract_rejects_large_hops(write_records):
    result = runner.invoke(app, ["extract", str(write_records(TOY)), "--hops", "6"])
    assert result.exit_code == EXIT_USAGE


def test_bench_synthetic_json_and_csv(tmp_path):
    spec = tmp_path / "spec.yaml"
    spec.write_text("- {vertices: 6, edges: 7, interactions: 20, class_bias: A, count: 2}\n")
    csv_path = tmp_path / "bench.csv"
    result = runner.invoke(app, ["bench", "--synthetic", str(spec), "--csv", str(csv_path), "--json"])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout)
    assert [r["instance_id"] for r in payload["records"]] == ["A-n6-s42", "A-n6-s43"]
    assert [r["group"] for r in payload["by_class"]] == ["A"]
    assert [r["group"] for r in payload["by_size"]] == ["<100"]
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("instance_id,instance_class,interactions,value")
    assert len(lines) == 3


def test_bench_extracted_instances_text(write_records):
    result = runner.invoke(app, ["bench", str(write_records(TOY)), "--hops", "3"])
    assert result.exit_code == 0, result.output
    assert "Average runtime per class" in result.stdout
    assert "Average runtime per size" in result.stdout


def test_bench_rejects_two_sources(write_records, tmp_path):
    spec = tmp_path / "spec.yaml"
    spec.write_text("vertices: 6\nedges: 7\ninteractions: 20\n")
    result = runner.invoke(app, ["bench", str(write_records(TOY)), "--synthetic", str(spec)])
    assert result.exit_code == EXIT_USAGE
