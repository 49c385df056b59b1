"""On-disk formats: JSON for structured objects, CSV for matrices and records.

Floats go through ``repr`` (JSON) or 17 significant digits (CSV), both of
which round-trip IEEE doubles exactly, so serialize-then-parse returns
bit-equal structures.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .solver import MatchResult
from .synthbench import GeneratorParams, TrialRecord
from .types import PartialPermutation, WeightedGraph


def save_graph(path, graph: WeightedGraph) -> None:
    payload = {
        "size": graph.size,
        "labels": None if graph.labels is None else graph.labels.tolist(),
        "adjacency": graph.adjacency.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_graph(path) -> WeightedGraph:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    adjacency = np.array(payload["adjacency"], dtype=float)
    if adjacency.shape != (payload["size"], payload["size"]):
        raise ValueError(f"{path}: adjacency shape does not match declared size")
    labels = payload.get("labels")
    return WeightedGraph(adjacency, labels=None if labels is None else np.array(labels))


def save_cost(path, entries: np.ndarray) -> None:
    np.savetxt(path, np.asarray(entries, dtype=float), delimiter=",", fmt="%.17g")


def load_cost(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def save_assignment(path, assignment: PartialPermutation) -> None:
    payload = {
        "m": assignment.m,
        "n": assignment.n,
        "target_size": assignment.target_size,
        "pairs": [[int(i), int(j)] for i, j in assignment.pairs()],
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_assignment(path) -> PartialPermutation:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return PartialPermutation.from_pairs(
        payload["m"],
        payload["n"],
        ((i, j) for i, j in payload["pairs"]),
        target_size=payload["target_size"],
    )


def save_generator_params(path, params: GeneratorParams) -> None:
    payload = {
        "m": params.m,
        "n": params.n,
        "target_size": params.target_size,
        "sigma": params.sigma,
        "density": params.density,
        "seed": params.seed,
        "perturb_mode": params.perturb_mode.value,
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_generator_params(path) -> GeneratorParams:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return GeneratorParams(**payload)


_RECORD_FIELDS = [
    "scenario",
    "mode",
    "sweep_value",
    "trial",
    "method",
    "m",
    "n",
    "target_size",
    "sigma",
    "density",
    "seed",
    "accuracy",
    "objective",
    "wall_time",
    "fallback",
    "error",
]


def write_records_csv(path, records: list[TrialRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_RECORD_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.scenario,
                    r.mode,
                    repr(r.sweep_value),
                    r.trial,
                    r.method,
                    r.m,
                    r.n,
                    r.target_size,
                    repr(r.sigma),
                    repr(r.density),
                    r.seed,
                    repr(r.accuracy),
                    repr(r.objective),
                    repr(r.wall_time),
                    int(r.fallback),
                    r.error,
                ]
            )


def read_records_csv(path) -> list[TrialRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != _RECORD_FIELDS:
            raise ValueError(f"{path}: unexpected record columns {reader.fieldnames}")
        for row in reader:
            records.append(
                TrialRecord(
                    scenario=row["scenario"],
                    mode=row["mode"],
                    sweep_value=float(row["sweep_value"]),
                    trial=int(row["trial"]),
                    method=row["method"],
                    m=int(row["m"]),
                    n=int(row["n"]),
                    target_size=int(row["target_size"]),
                    sigma=float(row["sigma"]),
                    density=float(row["density"]),
                    seed=int(row["seed"]),
                    accuracy=float(row["accuracy"]),
                    objective=float(row["objective"]),
                    wall_time=float(row["wall_time"]),
                    fallback=bool(int(row["fallback"])),
                    error=row["error"],
                )
            )
    return records


def write_summary_json(path, summary: list[dict]) -> None:
    Path(path).write_text(json.dumps(summary, indent=2), encoding="utf-8")


def save_trace_jsonl(path, result: MatchResult) -> None:
    lines = [
        json.dumps(
            {
                "zeta": step.zeta,
                "j": step.j_value,
                "fw_iters": step.fw_iters,
                "gap": step.gap,
                "binarity": step.binarity,
            }
        )
        for step in result.trace
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def result_to_dict(result: MatchResult, accuracy: float | None = None) -> dict:
    payload = {
        "m": result.assignment.m,
        "n": result.assignment.n,
        "target_size": result.assignment.target_size,
        "pairs": [[int(i), int(j)] for i, j in result.assignment.pairs()],
        "objective_h0": result.objective_h0,
        "objective_f": result.objective_f,
        "discretized_by_fallback": result.discretized_by_fallback,
        "zeta_steps": len(result.trace),
        "wall_time": result.wall_time,
    }
    if accuracy is not None:
        payload["accuracy"] = accuracy
    return payload
