"""Synthetic benchmark: point-set instance generation, scenario sweeps, metrics.

Instances come from a planted-correspondence model.  H is a set of N points
uniform on the unit square; L of them, picked by a random ground-truth
assignment, are copied into G with additive gaussian noise, and G's other
M - L points (the outliers) are fresh uniform samples.  Edge weights are
euclidean point distances.  Structure is sparse: H keeps a random fraction
``density`` of its vertex pairs, G's matched block inherits H's pattern
through the ground truth (so at sigma = 0 the planted assignment has zero
structural cost), and pairs touching an outlier are added until G reaches
its own density target.  Finally, when sigma > 0, some edges are added and
removed to disturb the structure itself.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .objective import RelaxationKind
from .direction import DirectionMethod
from .solver import SolverConfig, match
from .types import (
    CostMatrix,
    PartialPermutation,
    ProblemInstance,
    WeightedGraph,
)

WORKER_ENV_VAR = "WCS_MATCH_THREADS"


class PerturbMode(str, Enum):
    # "each": ceil(sigma/2 * edges) added AND the same count removed.
    # "total": that budget covers additions and removals together.
    EACH = "each"
    TOTAL = "total"


@dataclass(frozen=True)
class GeneratorParams:
    m: int
    n: int
    target_size: int
    sigma: float
    density: float
    seed: int
    perturb_mode: PerturbMode = PerturbMode.EACH

    def __post_init__(self):
        object.__setattr__(self, "perturb_mode", PerturbMode(self.perturb_mode))
        if not 1 <= self.target_size <= self.m <= self.n:
            raise ValueError(
                f"need 1 <= L <= M <= N, got L={self.target_size}, M={self.m}, N={self.n}"
            )
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


def _pairwise_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def _perturb_edges(
    adj: np.ndarray, dist: np.ndarray, sigma: float, mode: PerturbMode, rng: np.random.Generator
) -> np.ndarray:
    """Add and remove random edges; counts scale with sigma times edge count."""
    if sigma <= 0:
        return adj
    size = adj.shape[0]
    iu = np.triu_indices(size, k=1)
    present = adj[iu] > 0
    edges = int(present.sum())
    if edges == 0:
        return adj
    budget = math.ceil(0.5 * sigma * edges)
    if mode is PerturbMode.EACH:
        k_add = k_remove = budget
    else:
        k_add = budget // 2
        k_remove = budget - k_add
    present_idx = np.flatnonzero(present)
    absent_idx = np.flatnonzero(~present)
    k_add = min(k_add, absent_idx.size)
    k_remove = min(k_remove, present_idx.size)

    out = adj.copy()
    if k_remove:
        removed = rng.choice(present_idx, size=k_remove, replace=False)
        out[iu[0][removed], iu[1][removed]] = 0.0
        out[iu[1][removed], iu[0][removed]] = 0.0
    if k_add:
        added = rng.choice(absent_idx, size=k_add, replace=False)
        out[iu[0][added], iu[1][added]] = dist[iu[0][added], iu[1][added]]
        out[iu[1][added], iu[0][added]] = dist[iu[0][added], iu[1][added]]
    return out


def generate_instance(params: GeneratorParams) -> ProblemInstance:
    """Sample one planted-correspondence instance (alpha = 1, zero cost)."""
    rng = np.random.default_rng(params.seed)
    m, n, target_size = params.m, params.n, params.target_size

    h_points = rng.uniform(size=(n, 2))
    rows = np.sort(rng.choice(m, size=target_size, replace=False))
    cols = rng.choice(n, size=target_size, replace=False)
    noise = rng.normal(0.0, params.sigma, size=(target_size, 2))

    g_points = np.empty((m, 2))
    g_points[rows] = h_points[cols] + noise
    outlier_rows = np.setdiff1d(np.arange(m), rows)
    if outlier_rows.size:
        g_points[outlier_rows] = rng.uniform(size=(outlier_rows.size, 2))

    dist_g = _pairwise_distances(g_points)
    dist_h = _pairwise_distances(h_points)

    iu_h = np.triu_indices(n, k=1)
    total_h = iu_h[0].size
    keep_h = round(params.density * total_h)
    mask_h = np.zeros((n, n), dtype=bool)
    chosen_h = rng.permutation(total_h)[:keep_h]
    mask_h[iu_h[0][chosen_h], iu_h[1][chosen_h]] = True
    mask_h |= mask_h.T

    # G's matched block copies H's pattern through the planted assignment, so
    # the planted block is structurally identical at sigma = 0; pairs touching
    # an outlier then top G up to its own density target.
    mask_g = np.zeros((m, m), dtype=bool)
    mask_g[np.ix_(rows, rows)] = mask_h[np.ix_(cols, cols)]
    iu_g = np.triu_indices(m, k=1)
    total_g = iu_g[0].size
    target_edges_g = round(params.density * total_g)
    matched = np.zeros(m, dtype=bool)
    matched[rows] = True
    in_block = matched[iu_g[0]] & matched[iu_g[1]]
    block_edges = int(mask_g[iu_g].sum())
    spare = np.flatnonzero(~in_block)
    extra = min(max(target_edges_g - block_edges, 0), spare.size)
    if extra:
        chosen_g = rng.choice(spare, size=extra, replace=False)
        mask_g[iu_g[0][chosen_g], iu_g[1][chosen_g]] = True
        mask_g |= mask_g.T

    a_g = np.where(mask_g, dist_g, 0.0)
    a_h = np.where(mask_h, dist_h, 0.0)
    a_g = _perturb_edges(a_g, dist_g, params.sigma, params.perturb_mode, rng)
    a_h = _perturb_edges(a_h, dist_h, params.sigma, params.perturb_mode, rng)

    ground_truth = PartialPermutation.from_pairs(m, n, zip(rows.tolist(), cols.tolist()))
    return ProblemInstance(
        graph_g=WeightedGraph(a_g, labels=g_points),
        graph_h=WeightedGraph(a_h, labels=h_points),
        target_size=target_size,
        cost=CostMatrix(np.zeros((m, n))),
        alpha=1.0,
        ground_truth=ground_truth,
    )


def accuracy(predicted: PartialPermutation, ground_truth: PartialPermutation) -> float:
    """Fraction of predicted pairs that are planted pairs."""
    if (predicted.m, predicted.n) != (ground_truth.m, ground_truth.n):
        raise ValueError("assignments have different shapes")
    if predicted.target_size != ground_truth.target_size:
        raise ValueError("assignments have different target sizes")
    overlap = float(np.vdot(predicted.entries, ground_truth.entries))
    return overlap / predicted.target_size


class ScenarioKind(str, Enum):
    NOISE = "noise"
    SIZE = "size"
    OUTLIERS = "outliers"
    DENSITY = "density"


class MatchMode(str, Enum):
    WCS = "wcs"
    PIW = "piw"


WCS_METHODS = ("h1-exact", "h1-fast", "h2-exact", "h2-fast")
PIW_METHODS = ("piw-exact", "piw-fast")

_NOISE_SWEEP = tuple(round(0.01 * i, 2) for i in range(11))
_DENSITY_SWEEP = tuple(round(0.1 * i, 1) for i in range(1, 11))


def parse_method(method: str) -> tuple[RelaxationKind, DirectionMethod]:
    relaxation, _, direction = method.partition("-")
    return RelaxationKind(relaxation), DirectionMethod(direction)


def default_sweep(kind: ScenarioKind, mode: MatchMode, paper_scale: bool) -> tuple[float, ...]:
    if kind is ScenarioKind.NOISE:
        return _NOISE_SWEEP
    if kind is ScenarioKind.DENSITY:
        return _DENSITY_SWEEP
    if kind is ScenarioKind.SIZE:
        if mode is MatchMode.WCS:
            # Swept value is M (N = M + 5, L = M - 5).
            return tuple(range(20, 41, 2)) if paper_scale else (10, 14, 18, 22, 26)
        # Swept value is N (L = M = N - 5).
        return tuple(range(40, 61, 2)) if paper_scale else (15, 19, 23, 27, 31)
    if mode is MatchMode.WCS:
        # Swept value is L, decreasing (more discarded G vertices).
        return tuple(range(30, 19, -1)) if paper_scale else tuple(range(14, 8, -1))
    return tuple(range(50, 39, -1)) if paper_scale else tuple(range(19, 13, -1))


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark sweep: what varies, at which scale, how many trials."""

    kind: ScenarioKind
    mode: MatchMode = MatchMode.WCS
    paper_scale: bool = False
    trials: int = 30
    base_seed: int = 0
    methods: tuple[str, ...] = ()
    sweep: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        object.__setattr__(self, "mode", MatchMode(self.mode))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.base_seed < 0:
            raise ValueError("base_seed must be nonnegative")
        if not self.methods:
            default = WCS_METHODS if self.mode is MatchMode.WCS else PIW_METHODS
            object.__setattr__(self, "methods", default)
        for method in self.methods:
            parse_method(method)
        if not self.sweep:
            object.__setattr__(
                self, "sweep", default_sweep(self.kind, self.mode, self.paper_scale)
            )

    def params_for(self, value: float) -> dict:
        """Generator parameters (minus the seed) at one swept value."""
        if self.mode is MatchMode.WCS:
            base_m = 30 if self.paper_scale else 14
            m, n, size, sigma, density = base_m, base_m + 5, base_m - 5, 0.05, 0.5
            if self.kind is ScenarioKind.NOISE:
                sigma = float(value)
            elif self.kind is ScenarioKind.SIZE:
                m = int(value)
                n, size = m + 5, m - 5
            elif self.kind is ScenarioKind.OUTLIERS:
                size = int(value)
            else:
                density = float(value)
        else:
            base_n = 50 if self.paper_scale else 19
            n = base_n
            m = size = n - 5
            sigma, density = 0.05, 0.5
            if self.kind is ScenarioKind.NOISE:
                sigma = float(value)
            elif self.kind is ScenarioKind.SIZE:
                n = int(value)
                m = size = n - 5
            elif self.kind is ScenarioKind.OUTLIERS:
                m = size = int(value)
            else:
                density = float(value)
        return {"m": m, "n": n, "target_size": size, "sigma": sigma, "density": density}


@dataclass(frozen=True)
class TrialRecord:
    scenario: str
    mode: str
    sweep_value: float
    trial: int
    method: str
    m: int
    n: int
    target_size: int
    sigma: float
    density: float
    seed: int
    accuracy: float
    objective: float
    wall_time: float
    fallback: bool
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def derive_trial_seed(base_seed: int, value_index: int, trial: int) -> int:
    seq = np.random.SeedSequence([base_seed, value_index, trial])
    return int(seq.generate_state(1)[0])


def _run_trial(
    spec: ScenarioSpec, config: SolverConfig, value_index: int, value: float, trial: int
) -> list[TrialRecord]:
    params = GeneratorParams(
        seed=derive_trial_seed(spec.base_seed, value_index, trial),
        **spec.params_for(value),
    )
    instance = generate_instance(params)
    records = []
    for method in spec.methods:
        relaxation, direction = parse_method(method)
        run_config = replace(config, relaxation=relaxation, direction=direction)
        common = dict(
            scenario=spec.kind.value,
            mode=spec.mode.value,
            sweep_value=float(value),
            trial=trial,
            method=method,
            m=params.m,
            n=params.n,
            target_size=params.target_size,
            sigma=params.sigma,
            density=params.density,
            seed=params.seed,
        )
        try:
            result = match(instance, run_config)
            records.append(
                TrialRecord(
                    accuracy=accuracy(result.assignment, instance.ground_truth),
                    objective=result.objective_f,
                    wall_time=result.wall_time,
                    fallback=result.discretized_by_fallback,
                    **common,
                )
            )
        except Exception as exc:  # a failed trial is recorded, not dropped
            records.append(
                TrialRecord(
                    accuracy=0.0,
                    objective=math.nan,
                    wall_time=0.0,
                    fallback=False,
                    error=f"{type(exc).__name__}: {exc}",
                    **common,
                )
            )
    return records


def _resolve_workers(requested: int | None) -> int:
    cap = os.environ.get(WORKER_ENV_VAR)
    limit = int(cap) if cap else (os.cpu_count() or 1)
    workers = requested if requested is not None else limit
    return max(1, min(workers, limit))


def run_scenario(
    spec: ScenarioSpec,
    config: SolverConfig | None = None,
    workers: int | None = None,
    progress=None,
) -> list[TrialRecord]:
    """All trials of a sweep; per-trial seeds make the output order-free."""
    config = config or SolverConfig()
    tasks = [
        (value_index, value, trial)
        for value_index, value in enumerate(spec.sweep)
        for trial in range(spec.trials)
    ]
    workers = _resolve_workers(workers)
    records: list[TrialRecord] = []
    if workers <= 1 or len(tasks) <= 1:
        for done, task in enumerate(tasks, start=1):
            records.extend(_run_trial(spec, config, *task))
            if progress:
                progress(done, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_trial, spec, config, *task) for task in tasks]
            for done, future in enumerate(futures, start=1):
                records.extend(future.result())
                if progress:
                    progress(done, len(tasks))
    order = {value: index for index, value in enumerate(spec.sweep)}
    method_order = {method: index for index, method in enumerate(spec.methods)}
    records.sort(key=lambda r: (order[r.sweep_value], r.trial, method_order[r.method]))
    return records


def aggregate_records(records: list[TrialRecord]) -> list[dict]:
    """Per (scenario, mode, sweep value, method) means over successful trials."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for record in records:
        groups.setdefault(
            (record.scenario, record.mode, record.sweep_value, record.method), []
        ).append(record)
    summary = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], k[3])):
        scenario, mode, sweep_value, method = key
        group = groups[key]
        ok = [r for r in group if r.ok]
        accs = np.array([r.accuracy for r in ok])
        times = np.array([r.wall_time for r in ok])
        summary.append(
            {
                "scenario": scenario,
                "mode": mode,
                "sweep_value": sweep_value,
                "method": method,
                "mean_acc": float(accs.mean()) if ok else math.nan,
                "std_acc": float(accs.std()) if ok else math.nan,
                "mean_time": float(times.mean()) if ok else math.nan,
                "trials": len(group),
                "failures": len(group) - len(ok),
            }
        )
    return summary


def log_log_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size)."""
    sizes = np.asarray(sizes, dtype=float)
    times = np.asarray(times, dtype=float)
    if sizes.size < 4:
        raise ValueError(f"need at least 4 size points, got {sizes.size}")
    if np.unique(sizes).size < 2:
        raise ValueError("size points are all identical; slope undefined")
    if np.any(sizes <= 0) or np.any(times <= 0):
        raise ValueError("sizes and times must be positive for a log-log fit")
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


def fit_time_slope(records: list[TrialRecord], method: str | None = None) -> float:
    """Growth exponent of mean wall time with problem size for one method."""
    if method is not None:
        records = [r for r in records if r.method == method]
    methods = {r.method for r in records}
    if len(methods) > 1:
        raise ValueError(f"records mix methods {sorted(methods)}; pass method=...")
    ok = [r for r in records if r.ok]
    by_size: dict[int, list[float]] = {}
    for record in ok:
        by_size.setdefault(record.m, []).append(record.wall_time)
    sizes = sorted(by_size)
    times = [float(np.mean(by_size[size])) for size in sizes]
    return log_log_slope(sizes, times)
