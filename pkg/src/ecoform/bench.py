"""Instance x solver x seed benchmark matrix with CSV output.

Each cell generates an instance, runs the split pipeline under one solver,
and scores the result against a reference: the exact DP optimum at small n,
or the best value any configured solver found on that instance otherwise.
Rows are deterministic per config apart from the runtime column.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .energy import ScenarioConfig, ValueOracle, generate_scenario
from .exact import idp_solve
from .isg import IsgInstance, fit_isg, random_isg
from .pipeline import iterative_split, quality_ratio
from .seeds import derive_seed
from .solvers import SolverParams, params_from_name

EXACT_DP_SIZE_CAP = 20

CSV_HEADER = ("instance_id,n,source,sigma,density,kappa,solver,seed,splits,"
              "qubo_solves,best_value,ref_value,quality_ratio,runtime_ms")


class BenchError(ValueError):
    pass


@dataclass(frozen=True)
class RandomSource:
    sigma: float = 0.2
    density: float = 0.95

    name = "random"


@dataclass(frozen=True)
class ScenarioSource:
    """Instances fitted from generated energy scenarios (fit cap applies)."""
    timesteps: int = 4
    epsilon: float = 0.5
    kappa: float = 0.05

    name = "fitted"


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...]
    source: RandomSource | ScenarioSource = RandomSource()
    solvers: tuple[tuple[str, SolverParams], ...] = ()
    seeds_per_point: int = 20
    reference: str = "exact-dp"  # or "best-found"
    base_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise BenchError("sizes must be >= 2")
        if self.seeds_per_point < 1:
            raise BenchError("seeds_per_point must be >= 1")
        if self.reference not in ("exact-dp", "best-found"):
            raise BenchError("reference must be 'exact-dp' or 'best-found'")
        if self.reference == "exact-dp" and max(self.sizes) > EXACT_DP_SIZE_CAP:
            raise BenchError(f"exact-dp reference requires n <= {EXACT_DP_SIZE_CAP}")
        if isinstance(self.source, ScenarioSource) and max(self.sizes) > 20:
            raise BenchError("fitted source requires n <= 20 (fit cap)")
        if not self.solvers:
            raise BenchError("need at least one solver")


@dataclass(frozen=True)
class BenchmarkRecord:
    instance_id: str
    n: int
    source: str
    sigma: float | None
    density: float | None
    kappa: float
    solver: str
    seed: int
    splits: int
    qubo_solves: int
    best_value: float | None
    ref_value: float | None
    quality_ratio: float | None
    runtime_ms: float


def _make_instance(config: BenchConfig, n: int, realization: int) -> IsgInstance:
    inst_seed = derive_seed(config.base_seed, n, realization)
    if isinstance(config.source, RandomSource):
        return random_isg(n, sigma=config.source.sigma,
                          density=config.source.density, seed=inst_seed)
    cfg = ScenarioConfig(timesteps=config.source.timesteps,
                         epsilon=config.source.epsilon,
                         kappa=config.source.kappa)
    scenario = generate_scenario(n, seed=inst_seed, config=cfg)
    return fit_isg(ValueOracle(scenario), n)


def _run_cell(config: BenchConfig, n: int, realization: int) -> list[BenchmarkRecord]:
    """All solver rows for one instance; reference resolved per policy."""
    instance = _make_instance(config, n, realization)
    source = config.source.name
    kappa = config.source.kappa if isinstance(config.source, ScenarioSource) else 0.0
    sigma = instance.meta.sigma
    density = instance.meta.density
    instance_id = f"{source}-n{n:03d}-r{realization:03d}"

    ref_value: float | None = None
    if config.reference == "exact-dp":
        ref_value = idp_solve(instance, n).value

    rows = []
    for solver_name, params in config.solvers:
        started = time.perf_counter()
        try:
            structure, trace = iterative_split(instance, params, seed=realization)
            best_value = structure.value
            splits = trace.accepted_splits
            solves = trace.qubo_solves
        except Exception:
            best_value = None
            splits = 0
            solves = 0
        runtime_ms = max((time.perf_counter() - started) * 1000.0, 1e-6)
        rows.append(BenchmarkRecord(
            instance_id=instance_id, n=n, source=source, sigma=sigma,
            density=density, kappa=kappa, solver=solver_name, seed=realization,
            splits=splits, qubo_solves=solves, best_value=best_value,
            ref_value=ref_value, quality_ratio=None, runtime_ms=runtime_ms))

    if config.reference == "best-found":
        found = [r.best_value for r in rows if r.best_value is not None]
        ref_value = max(found) if found else None

    final = []
    for r in rows:
        ratio = None
        if r.best_value is not None and ref_value is not None:
            ratio = quality_ratio(r.best_value, ref_value)
            if math.isnan(ratio):
                ratio = None
        final.append(replace(r, ref_value=ref_value, quality_ratio=ratio))
    return final


def run_benchmark(config: BenchConfig) -> list[BenchmarkRecord]:
    """Run the full matrix; rows come back sorted by (n, instance_id, solver, seed)."""
    cells = [(n, k) for n in config.sizes for k in range(config.seeds_per_point)]
    records: list[BenchmarkRecord] = []
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for rows in pool.map(_run_cell_star, [(config, n, k) for n, k in cells]):
                records.extend(rows)
    else:
        for n, k in cells:
            records.extend(_run_cell(config, n, k))
    records.sort(key=lambda r: (r.n, r.instance_id, r.solver, r.seed))
    return records


def _run_cell_star(args):
    return _run_cell(*args)


@dataclass(frozen=True)
class AggregateRow:
    n: int
    solver: str
    runs: int
    undefined_ratios: int
    mean_quality: float | None
    std_quality: float | None
    mean_runtime_ms: float
    std_runtime_ms: float


def _mean_std(xs: list[float]) -> tuple[float, float]:
    mean = sum(xs) / len(xs)
    if len(xs) == 1:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
    return mean, math.sqrt(var)


def aggregate(records: list[BenchmarkRecord]) -> list[AggregateRow]:
    """Per-(n, solver) sample mean/std of quality ratio and runtime; rows with
    undefined ratios are excluded from the quality stats but counted."""
    if not records:
        raise BenchError("no records to aggregate")
    groups: dict[tuple[int, str], list[BenchmarkRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.solver), []).append(r)
    out = []
    for (n, solver) in sorted(groups):
        rows = groups[(n, solver)]
        ratios = [r.quality_ratio for r in rows if r.quality_ratio is not None]
        runtimes = [r.runtime_ms for r in rows]
        mean_q, std_q = _mean_std(ratios) if ratios else (None, None)
        mean_t, std_t = _mean_std(runtimes)
        out.append(AggregateRow(n=n, solver=solver, runs=len(rows),
                                undefined_ratios=len(rows) - len(ratios),
                                mean_quality=mean_q, std_quality=std_q,
                                mean_runtime_ms=mean_t, std_runtime_ms=std_t))
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_records(records: list[BenchmarkRecord], path: str | Path) -> None:
    """CSV with the fixed header; floats use 9 significant digits, None is empty."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER.split(","))
            for r in records:
                writer.writerow([
                    r.instance_id, r.n, r.source, _fmt(r.sigma), _fmt(r.density),
                    _fmt(r.kappa), r.solver, r.seed, r.splits, r.qubo_solves,
                    _fmt(r.best_value), _fmt(r.ref_value), _fmt(r.quality_ratio),
                    _fmt(r.runtime_ms),
                ])
    except OSError as exc:
        raise BenchError(f"cannot write records to {path}: {exc}") from exc


def read_records(path: str | Path) -> list[BenchmarkRecord]:
    path = Path(path)

    def opt_float(s: str) -> float | None:
        return float(s) if s else None

    records = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER.split(","):
            raise BenchError(f"unexpected CSV header in {path}")
        for row in reader:
            records.append(BenchmarkRecord(
                instance_id=row["instance_id"], n=int(row["n"]), source=row["source"],
                sigma=opt_float(row["sigma"]), density=opt_float(row["density"]),
                kappa=float(row["kappa"]), solver=row["solver"], seed=int(row["seed"]),
                splits=int(row["splits"]), qubo_solves=int(row["qubo_solves"]),
                best_value=opt_float(row["best_value"]), ref_value=opt_float(row["ref_value"]),
                quality_ratio=opt_float(row["quality_ratio"]),
                runtime_ms=float(row["runtime_ms"])))
    return records


def config_from_json(text: str) -> BenchConfig:
    """Benchmark config from its JSON document; see README for the schema."""
    doc = json.loads(text)
    try:
        sizes = tuple(int(n) for n in doc["sizes"])
        src = doc.get("source", {"kind": "random"})
        kind = src.get("kind", "random")
        if kind == "random":
            source = RandomSource(sigma=float(src.get("sigma", 0.2)),
                                  density=float(src.get("density", 0.95)))
        elif kind == "scenario":
            source = ScenarioSource(timesteps=int(src.get("timesteps", 4)),
                                    epsilon=float(src.get("epsilon", 0.5)),
                                    kappa=float(src.get("kappa", 0.05)))
        else:
            raise BenchError(f"unknown source kind {kind!r}")
        solvers = []
        for spec in doc["solvers"]:
            spec = dict(spec)
            name = spec.pop("name")
            solvers.append((name, params_from_name(name, **spec)))
        return BenchConfig(
            sizes=sizes, source=source, solvers=tuple(solvers),
            seeds_per_point=int(doc.get("seeds_per_point", 20)),
            reference=str(doc.get("reference", "exact-dp")),
            base_seed=int(doc.get("base_seed", 0)),
            jobs=int(doc.get("jobs", 1)))
    except KeyError as exc:
        raise BenchError(f"benchmark config missing key {exc}") from exc
