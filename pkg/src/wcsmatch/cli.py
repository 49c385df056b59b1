"""Command-line surface: generate instances, match, benchmark, cross-check.

Exit codes: 0 on success, 1 on any error, and 2 when a match finished but
needed the discretization fallback (so scripts can flag non-clean runs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .direction import DirectionMethod
from .objective import RelaxationKind
from .oracle import brute_force_min
from .solver import LineSearch, SolverConfig, match
from .synthbench import (
    GeneratorParams,
    MatchMode,
    ScenarioKind,
    ScenarioSpec,
    accuracy,
    aggregate_records,
    fit_time_slope,
    generate_instance,
    run_scenario,
)
from .types import CostMatrix, ProblemInstance


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcsmatch",
        description="Weighted common subgraph matching and its synthetic benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic instance to a directory")
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--l", type=int, required=True, dest="target_size")
    gen.add_argument("--sigma", type=float, default=0.0)
    gen.add_argument("--density", type=float, default=0.5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--perturb-mode", choices=["each", "total"], default="each")
    gen.add_argument("--out", required=True)

    mt = sub.add_parser("match", help="match two graphs read from files")
    mt.add_argument("--g", required=True, help="graph G JSON (the smaller graph)")
    mt.add_argument("--h", required=True, help="graph H JSON")
    mt.add_argument("--cost", help="optional cost matrix CSV")
    mt.add_argument("--l", type=int, required=True, dest="target_size")
    mt.add_argument("--alpha", type=float, default=1.0)
    mt.add_argument("--relaxation", choices=[k.value for k in RelaxationKind], default="h1")
    mt.add_argument("--direction", choices=[d.value for d in DirectionMethod], default="exact")
    mt.add_argument("--dzeta", type=float, default=0.01)
    mt.add_argument("--fw-max-iters", type=int, default=100)
    mt.add_argument("--fw-gap-tol", type=float, default=1e-4)
    mt.add_argument("--linesearch", choices=[s.value for s in LineSearch], default="auto")
    mt.add_argument("--trace", help="write per-step trace as JSON lines")
    mt.add_argument("--gt", help="ground-truth assignment JSON; adds accuracy to the output")

    bench = sub.add_parser("bench", help="run a benchmark sweep")
    bench.add_argument("--scenario", choices=[k.value for k in ScenarioKind], required=True)
    bench.add_argument("--mode", choices=[m.value for m in MatchMode], default="wcs")
    bench.add_argument("--trials", type=int, default=30)
    bench.add_argument("--paper-scale", action="store_true")
    bench.add_argument("--methods", help="comma-separated method ids, e.g. h1-exact,h1-fast")
    bench.add_argument("--sweep", help="comma-separated sweep values overriding the default grid")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--dzeta", type=float, default=0.01)
    bench.add_argument("--workers", type=int)
    bench.add_argument("--out", required=True)

    oc = sub.add_parser("oracle-check", help="compare the solver against brute force")
    oc.add_argument("--instance", help="directory produced by generate")
    oc.add_argument("--batch", type=int, help="instead: run this many random instances")
    oc.add_argument("--m", type=int, default=3)
    oc.add_argument("--n", type=int, default=4)
    oc.add_argument("--l", type=int, default=2, dest="target_size")
    oc.add_argument("--sigma", type=float, default=0.05)
    oc.add_argument("--density", type=float, default=1.0)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--relaxation", choices=[k.value for k in RelaxationKind], default="h1")
    oc.add_argument("--direction", choices=[d.value for d in DirectionMethod], default="exact")
    oc.add_argument("--dzeta", type=float, default=0.01)

    slope = sub.add_parser("slope", help="log-log time slope per method from bench records")
    slope.add_argument("--records", required=True, help="records.csv written by bench")
    slope.add_argument("--method", help="restrict to one method id")

    return parser


def _config_from(args) -> SolverConfig:
    return SolverConfig(
        relaxation=RelaxationKind(args.relaxation),
        direction=DirectionMethod(args.direction),
        zeta_step=args.dzeta,
        fw_max_iters=getattr(args, "fw_max_iters", 100),
        fw_gap_tol=getattr(args, "fw_gap_tol", 1e-4),
        linesearch=LineSearch(getattr(args, "linesearch", "auto")),
    )


def cmd_generate(args) -> int:
    params = GeneratorParams(
        m=args.m,
        n=args.n,
        target_size=args.target_size,
        sigma=args.sigma,
        density=args.density,
        seed=args.seed,
        perturb_mode=args.perturb_mode,
    )
    instance = generate_instance(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_graph(out / "graph_g.json", instance.graph_g)
    io.save_graph(out / "graph_h.json", instance.graph_h)
    io.save_cost(out / "cost.csv", instance.cost_entries)
    io.save_assignment(out / "gt.json", instance.ground_truth)
    io.save_generator_params(out / "params.json", params)
    print(json.dumps({"out": str(out), "files": 5}))
    return 0


def _load_instance_dir(path) -> ProblemInstance:
    directory = Path(path)
    params = io.load_generator_params(directory / "params.json")
    graph_g = io.load_graph(directory / "graph_g.json")
    graph_h = io.load_graph(directory / "graph_h.json")
    ground_truth = io.load_assignment(directory / "gt.json")
    return ProblemInstance(
        graph_g=graph_g,
        graph_h=graph_h,
        target_size=params.target_size,
        cost=CostMatrix(io.load_cost(directory / "cost.csv")),
        alpha=1.0,
        ground_truth=ground_truth,
    )


def cmd_match(args) -> int:
    graph_g = io.load_graph(args.g)
    graph_h = io.load_graph(args.h)
    cost = CostMatrix(io.load_cost(args.cost)) if args.cost else None
    instance = ProblemInstance(
        graph_g=graph_g,
        graph_h=graph_h,
        target_size=args.target_size,
        cost=cost,
        alpha=args.alpha,
    )
    result = match(instance, _config_from(args))
    acc = None
    if args.gt:
        acc = accuracy(result.assignment, io.load_assignment(args.gt))
    if args.trace:
        io.save_trace_jsonl(args.trace, result)
    print(json.dumps(io.result_to_dict(result, accuracy=acc), indent=2))
    return 2 if result.discretized_by_fallback else 0


def cmd_bench(args) -> int:
    methods = tuple(args.methods.split(",")) if args.methods else ()
    sweep = tuple(float(v) for v in args.sweep.split(",")) if args.sweep else ()
    spec = ScenarioSpec(
        kind=ScenarioKind(args.scenario),
        mode=MatchMode(args.mode),
        paper_scale=args.paper_scale,
        trials=args.trials,
        base_seed=args.seed,
        methods=methods,
        sweep=sweep,
    )
    config = SolverConfig(zeta_step=args.dzeta)

    def progress(done: int, total: int) -> None:
        print(f"bench {args.scenario}/{args.mode}: {done}/{total} trials", file=sys.stderr)

    records = run_scenario(spec, config, workers=args.workers, progress=progress)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_records_csv(out / "records.csv", records)
    io.write_summary_json(out / "summary.json", aggregate_records(records))
    failures = sum(1 for r in records if not r.ok)
    print(json.dumps({"records": len(records), "failures": failures, "out": str(out)}))
    return 0


def _oracle_report(instance: ProblemInstance, config: SolverConfig) -> dict:
    oracle = brute_force_min(instance)
    result = match(instance, config)
    value = result.objective_f
    if oracle.best_value > 1e-12:
        ratio = value / oracle.best_value
    else:
        ratio = 1.0 if value <= 1e-9 else float("inf")
    return {
        "oracle_value": oracle.best_value,
        "method_value": value,
        "ratio": ratio,
        "attained": bool(value <= oracle.best_value + 1e-9),
        "num_candidates": oracle.num_candidates,
        "fallback": result.discretized_by_fallback,
    }


def cmd_oracle_check(args) -> int:
    config = _config_from(args)
    if args.batch:
        reports = []
        for index in range(args.batch):
            params = GeneratorParams(
                m=args.m,
                n=args.n,
                target_size=args.target_size,
                sigma=args.sigma,
                density=args.density,
                seed=args.seed + index,
            )
            reports.append(_oracle_report(generate_instance(params), config))
        attained = sum(1 for r in reports if r["attained"])
        print(
            json.dumps(
                {
                    "instances": len(reports),
                    "attainment_rate": attained / len(reports),
                    "max_ratio": max(r["ratio"] for r in reports),
                    "always_at_least_oracle": all(
                        r["method_value"] >= r["oracle_value"] - 1e-9 for r in reports
                    ),
                },
                indent=2,
            )
        )
        return 0
    if not args.instance:
        raise ValueError("oracle-check needs --instance DIR or --batch K")
    report = _oracle_report(_load_instance_dir(args.instance), config)
    print(json.dumps(report, indent=2))
    return 0


def cmd_slope(args) -> int:
    records = io.read_records_csv(args.records)
    methods = [args.method] if args.method else sorted({r.method for r in records})
    slopes = {method: fit_time_slope(records, method=method) for method in methods}
    print(json.dumps({"slopes": slopes}, indent=2))
    return 0


_COMMANDS = {
    "generate": cmd_generate,
    "match": cmd_match,
    "bench": cmd_bench,
    "oracle-check": cmd_oracle_check,
    "slope": cmd_slope,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
