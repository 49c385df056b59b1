import json

import pytest

from wcsmatch.cli import main
from wcsmatch.io import read_records_csv, write_records_csv
from wcsmatch.synthbench import TrialRecord


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def generate_dir(capsys, tmp_path, name="inst", **overrides):
    opts = {"m": 3, "n": 5, "l": 2, "sigma": 0.0, "density": 1.0, "seed": 7}
    opts.update(overrides)
    out = tmp_path / name
    argv = ["generate", "--out", out]
    for key, value in opts.items():
        argv += [f"--{key}", value]
    code, stdout, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(stdout) == {"out": str(out), "files": 5}
    return out


def test_generate_writes_instance_files(capsys, tmp_path):
    out = generate_dir(capsys, tmp_path)
    for name in ("graph_g.json", "graph_h.json", "cost.csv", "gt.json", "params.json"):
        assert (out / name).is_file()


def test_generate_is_deterministic(capsys, tmp_path):
    first = generate_dir(capsys, tmp_path, name="a")
    second = generate_dir(capsys, tmp_path, name="b")
    for name in ("graph_g.json", "graph_h.json", "cost.csv", "gt.json", "params.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_generate_rejects_bad_shape(capsys, tmp_path):
    code, _, err = run(
        capsys, "generate", "--m", 5, "--n", 3, "--l", 2, "--out", tmp_path / "bad"
    )
    assert code == 1
    assert "error:" in err


def test_match_outputs_assignment(capsys, tmp_path):
    out = generate_dir(capsys, tmp_path)
    trace = tmp_path / "trace.jsonl"
    code, stdout, _ = run(
        capsys,
        "match",
        "--g", out / "graph_g.json",
        "--h", out / "graph_h.json",
        "--l", 2,
        "--dzeta", 0.25,
        "--fw-max-iters", 20,
        "--gt", out / "gt.json",
        "--trace", trace,
    )
    assert code in (0, 2)
    payload = json.loads(stdout)
    assert payload["m"] == 3 and payload["n"] == 5 and payload["target_size"] == 2
    assert len(payload["pairs"]) == 2
    assert 0.0 <= payload["accuracy"] <= 1.0
    lines = trace.read_text().splitlines()
    assert len(lines) == payload["zeta_steps"]
    assert json.loads(lines[0])["zeta"] == 1.0


def test_match_with_cost_matrix(capsys, tmp_path):
    out = generate_dir(capsys, tmp_path)
    code, stdout, _ = run(
        capsys,
        "match",
        "--g", out / "graph_g.json",
        "--h", out / "graph_h.json",
        "--cost", out / "cost.csv",
        "--l", 2,
        "--alpha", 0.5,
        "--relaxation", "h1",
        "--direction", "fast",
        "--dzeta", 0.25,
    )
    assert code in (0, 2)
    assert "objective_f" in json.loads(stdout)


def test_match_missing_file_fails_cleanly(capsys, tmp_path):
    code, _, err = run(
        capsys, "match", "--g", tmp_path / "nope.json", "--h", tmp_path / "nope.json", "--l", 1
    )
    assert code == 1
    assert "error:" in err


def test_match_reports_fallback_exit_code(capsys, tmp_path):
    out = generate_dir(capsys, tmp_path)
    # an absurd gap tolerance freezes the iterate at its fractional start,
    # forcing the discretization fallback
    code, stdout, _ = run(
        capsys,
        "match",
        "--g", out / "graph_g.json",
        "--h", out / "graph_h.json",
        "--l", 2,
        "--dzeta", 0.5,
        "--fw-gap-tol", 1e9,
    )
    assert code == 2
    assert json.loads(stdout)["discretized_by_fallback"] is True


def test_bench_writes_records_and_summary(capsys, tmp_path):
    out = tmp_path / "bench"
    code, stdout, err = run(
        capsys,
        "bench",
        "--scenario", "size",
        "--sweep", "6",
        "--trials", 2,
        "--methods", "h1-fast",
        "--dzeta", 0.25,
        "--workers", 1,
        "--out", out,
    )
    assert code == 0
    tail = json.loads(stdout)
    assert tail == {"records": 2, "failures": 0, "out": str(out)}
    assert "2/2 trials" in err
    records = read_records_csv(out / "records.csv")
    assert len(records) == 2 and all(r.ok for r in records)
    summary = json.loads((out / "summary.json").read_text())
    assert summary[0]["method"] == "h1-fast" and summary[0]["trials"] == 2


def test_bench_rejects_unknown_method(capsys, tmp_path):
    code, _, err = run(
        capsys,
        "bench",
        "--scenario", "size",
        "--sweep", "6",
        "--trials", 1,
        "--methods", "h9-warp",
        "--out", tmp_path / "bench",
    )
    assert code == 1
    assert "error:" in err


def synth_records():
    records = []
    for method, exponent in (("h1-exact", 3.0), ("h1-fast", 2.5)):
        for m in (10, 14, 18, 22, 26):
            records.append(
                TrialRecord(
                    scenario="size",
                    mode="wcs",
                    sweep_value=float(m),
                    trial=0,
                    method=method,
                    m=m,
                    n=m + 5,
                    target_size=m - 5,
                    sigma=0.05,
                    density=0.5,
                    seed=0,
                    accuracy=1.0,
                    objective=0.0,
                    wall_time=1e-6 * m**exponent,
                    fallback=False,
                )
            )
    return records


def test_slope_reports_per_method_exponents(capsys, tmp_path):
    path = tmp_path / "records.csv"
    write_records_csv(path, synth_records())
    code, stdout, _ = run(capsys, "slope", "--records", path)
    assert code == 0
    slopes = json.loads(stdout)["slopes"]
    assert slopes["h1-exact"] == pytest.approx(3.0, abs=1e-9)
    assert slopes["h1-fast"] == pytest.approx(2.5, abs=1e-9)

    code, stdout, _ = run(capsys, "slope", "--records", path, "--method", "h1-fast")
    assert code == 0
    assert set(json.loads(stdout)["slopes"]) == {"h1-fast"}


def test_oracle_check_batch(capsys):
    code, stdout, _ = run(
        capsys,
        "oracle-check",
        "--batch", 2,
        "--m", 3,
        "--n", 4,
        "--l", 2,
        "--density", 1.0,
        "--dzeta", 0.25,
    )
    assert code == 0
    report = json.loads(stdout)
    assert report["instances"] == 2
    assert 0.0 <= report["attainment_rate"] <= 1.0
    assert report["always_at_least_oracle"] is True


def test_oracle_check_single_instance(capsys, tmp_path):
    out = generate_dir(capsys, tmp_path, m=3, n=4, l=2)
    code, stdout, _ = run(capsys, "oracle-check", "--instance", out, "--dzeta", 0.25)
    assert code == 0
    report = json.loads(stdout)
    assert set(report) == {
        "oracle_value",
        "method_value",
        "ratio",
        "attained",
        "num_candidates",
        "fallback",
    }
    assert report["method_value"] >= report["oracle_value"] - 1e-9


def test_oracle_check_requires_a_target(capsys):
    code, _, err = run(capsys, "oracle-check")
    assert code == 1
    assert "error:" in err
