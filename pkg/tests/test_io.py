import json
import math

import numpy as np
import pytest

from wcsmatch.io import (
    load_assignment,
    load_cost,
    load_generator_params,
    load_graph,
    read_records_csv,
    result_to_dict,
    save_assignment,
    save_cost,
    save_generator_params,
    save_graph,
    save_trace_jsonl,
    write_records_csv,
    write_summary_json,
)
from wcsmatch.solver import SolverConfig, match
from wcsmatch.synthbench import GeneratorParams, TrialRecord, generate_instance
from wcsmatch.types import PartialPermutation, WeightedGraph


def random_graph(rng, size):
    w = rng.uniform(0.1, 2.0, size=(size, size))
    w = np.triu(w, k=1)
    return WeightedGraph(w + w.T)


def test_graph_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    graph = random_graph(rng, 5)
    path = tmp_path / "graph.json"
    save_graph(path, graph)
    loaded = load_graph(path)
    assert np.array_equal(loaded.adjacency, graph.adjacency)
    assert loaded.labels is None


def test_graph_round_trip_with_labels(tmp_path):
    rng = np.random.default_rng(1)
    adjacency = random_graph(rng, 4).adjacency
    graph = WeightedGraph(adjacency, labels=rng.uniform(size=(4, 2)))
    path = tmp_path / "graph.json"
    save_graph(path, graph)
    loaded = load_graph(path)
    assert np.array_equal(loaded.labels, graph.labels)


def test_graph_size_mismatch_rejected(tmp_path):
    path = tmp_path / "graph.json"
    path.write_text(json.dumps({"size": 3, "labels": None, "adjacency": [[0.0]]}))
    with pytest.raises(ValueError):
        load_graph(path)


def test_cost_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(2)
    entries = rng.uniform(-1e3, 1e3, size=(3, 5)) * 10.0 ** rng.integers(-8, 8, size=(3, 5))
    path = tmp_path / "cost.csv"
    save_cost(path, entries)
    assert np.array_equal(load_cost(path), entries)


def test_cost_single_row_keeps_two_dims(tmp_path):
    path = tmp_path / "cost.csv"
    save_cost(path, np.array([[1.0, 2.0, 3.0]]))
    assert load_cost(path).shape == (1, 3)


def test_assignment_round_trip(tmp_path):
    assignment = PartialPermutation.from_pairs(4, 6, [(0, 5), (2, 1)])
    path = tmp_path / "assignment.json"
    save_assignment(path, assignment)
    loaded = load_assignment(path)
    assert loaded.m == 4 and loaded.n == 6 and loaded.target_size == 2
    assert loaded.pairs() == assignment.pairs()
    assert np.array_equal(loaded.entries, assignment.entries)


def test_generator_params_round_trip(tmp_path):
    params = GeneratorParams(
        m=6, n=9, target_size=4, sigma=0.07, density=0.35, seed=11, perturb_mode="total"
    )
    path = tmp_path / "params.json"
    save_generator_params(path, params)
    assert load_generator_params(path) == params


def make_record(trial, **overrides):
    base = dict(
        scenario="noise",
        mode="wcs",
        sweep_value=0.05,
        trial=trial,
        method="h1-exact",
        m=3,
        n=4,
        target_size=2,
        sigma=0.05,
        density=0.5,
        seed=123456789,
        accuracy=1 / 3,
        objective=0.12345678901234567,
        wall_time=1.5e-3,
        fallback=False,
        error="",
    )
    base.update(overrides)
    return TrialRecord(**base)


def test_records_csv_round_trip(tmp_path):
    records = [
        make_record(0),
        make_record(1, fallback=True, objective=math.inf),
        make_record(2, error="ValueError: boom", objective=1e-300),
    ]
    path = tmp_path / "records.csv"
    write_records_csv(path, records)
    loaded = read_records_csv(path)
    assert loaded == records


def test_records_csv_nan_objective(tmp_path):
    path = tmp_path / "records.csv"
    write_records_csv(path, [make_record(0, objective=math.nan)])
    loaded = read_records_csv(path)
    assert math.isnan(loaded[0].objective)


def test_records_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "records.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_records_csv(path)


def test_summary_json(tmp_path):
    summary = [{"scenario": "noise", "sweep_value": 0.0, "mean_acc": 0.9}]
    path = tmp_path / "summary.json"
    write_summary_json(path, summary)
    assert json.loads(path.read_text()) == summary


def small_result():
    instance = generate_instance(
        GeneratorParams(m=3, n=5, target_size=2, sigma=0.0, density=1.0, seed=7)
    )
    config = SolverConfig(zeta_step=0.25, fw_max_iters=20)
    return match(instance, config), instance


def test_trace_jsonl(tmp_path):
    result, _ = small_result()
    path = tmp_path / "trace.jsonl"
    save_trace_jsonl(path, result)
    lines = path.read_text().splitlines()
    assert len(lines) == len(result.trace)
    first = json.loads(lines[0])
    assert first["zeta"] == result.trace[0].zeta
    assert set(first) == {"zeta", "j", "fw_iters", "gap", "binarity"}


def test_result_to_dict():
    result, instance = small_result()
    payload = result_to_dict(result)
    assert payload["m"] == 3 and payload["n"] == 5 and payload["target_size"] == 2
    assert len(payload["pairs"]) == 2
    assert payload["zeta_steps"] == len(result.trace)
    assert "accuracy" not in payload
    tagged = result_to_dict(result, accuracy=0.5)
    assert tagged["accuracy"] == 0.5
