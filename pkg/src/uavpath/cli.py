"""Command-line front door and benchmark harness.

Subcommands:

* ``plan <scenario.yaml> --algo spso``  - one optimization, exporting the
  best path, its cost breakdown and the convergence trace as CSV.
* ``bench --suite-seed 0 --algos spso,pso --runs 10 --out DIR`` - a full
  scenario x algorithm x run matrix with a Mean/Std/t-test summary table.
* ``suite generate --seed 0 --out DIR`` - materialize the built-in
  scenarios as config + DEM files.

Exit codes: 0 success, 1 failed run(s), 2 configuration error, 3 I/O
error.  Every run's seed derives from the base seed via SHA-256 over
"base|scenario|algorithm|run", so benchmarks are reproducible cell by
cell and summaries are byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .cost import total_cost
from .optimizers import ALGORITHMS, EvolutionTrace, SwarmConfig, budgeted_config, run
from .scenario import ConfigError, Scenario, load_scenario, save_scenario
from .stats import Verdict, mean_std, paired_t_test
from .suite import build_benchmark_suite
from .terrain import DemParseError

EXIT_OK = 0
EXIT_FAILED_RUN = 1
EXIT_CONFIG = 2
EXIT_IO = 3


# --- CSV exports ---------------------------------------------------------------


def export_waypoints_csv(waypoints, file_path) -> None:
    """Write `index,x,y,z` rows with fixed 6-decimal formatting."""
    path = np.asarray(waypoints, dtype=float)
    if path.ndim != 2 or path.shape[1] != 3 or path.shape[0] < 3:
        raise ValueError("expected an (n, 3) path with n >= 3")
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x", "y", "z"])
        for i, (x, y, z) in enumerate(path):
            writer.writerow([i, f"{x:.6f}", f"{y:.6f}", f"{z:.6f}"])


def read_waypoints_csv(file_path) -> np.ndarray:
    with open(file_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([[float(r["x"]), float(r["y"]), float(r["z"])] for r in rows])


def export_convergence_csv(trace: EvolutionTrace, file_path) -> None:
    """Write `iteration,best_fitness`, one row per iteration; infinities
    are serialized as the literal ``inf``."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_fitness"])
        for i, v in enumerate(trace.best_fitness, start=1):
            writer.writerow([i, repr(float(v))])


def read_convergence_csv(file_path) -> np.ndarray:
    with open(file_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["best_fitness"]) for r in rows])


def export_breakdown_csv(breakdown, file_path) -> None:
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "value"])
        for name in ("f1", "f2", "f3", "f4", "total"):
            writer.writerow([name, repr(getattr(breakdown, name))])


def read_summary_csv(file_path) -> list[dict]:
    with open(file_path, newline="") as fh:
        return list(csv.DictReader(fh))


# --- benchmark harness -----------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkSpec:
    scenarios: tuple[Scenario, ...]
    algorithms: tuple[str, ...]
    runs_per_cell: int = 10
    base_config: SwarmConfig | None = None
    baseline: str = "spso"
    base_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be >= 1")
        if not self.scenarios or not self.algorithms:
            raise ValueError("need at least one scenario and one algorithm")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if self.base_config is None:
            object.__setattr__(self, "base_config", SwarmConfig())


@dataclass
class RunRecord:
    scenario: str
    algorithm: str
    run_index: int
    seed: int
    final_fitness: float
    feasible: bool
    wall_time: float
    trace_path: str
    trace: EvolutionTrace


def mix_seed(base_seed: int, scenario_id: str, algorithm: str, run_index: int) -> int:
    """Deterministic per-cell-run seed: the first 8 bytes of
    SHA-256("base|scenario|algorithm|run")."""
    digest = hashlib.sha256(
        f"{base_seed}|{scenario_id}|{algorithm}|{run_index}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


def _run_cell(scenario: Scenario, algorithm: str, config: SwarmConfig):
    start = time.perf_counter()
    trace = run(algorithm, scenario, config)
    return trace, time.perf_counter() - start


def run_benchmark(spec: BenchmarkSpec, out_dir=None, progress=None) -> list[RunRecord]:
    """Execute the full matrix; per-run trace CSVs land in out_dir/traces."""
    cells = [
        (sc, algo, k)
        for sc in spec.scenarios
        for algo in spec.algorithms
        for k in range(spec.runs_per_cell)
    ]
    configs = [
        budgeted_config(algo, replace(spec.base_config, seed=mix_seed(spec.base_seed, sc.name, algo, k)))
        for sc, algo, k in cells
    ]
    if spec.jobs > 1:
        cell_scenarios = [sc for sc, _, _ in cells]
        cell_algos = [algo for _, algo, _ in cells]
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            results = list(pool.map(_run_cell, cell_scenarios, cell_algos, configs))
    else:
        results = [_run_cell(sc, algo, cfg) for (sc, algo, _), cfg in zip(cells, configs)]
    trace_dir = None
    if out_dir is not None:
        trace_dir = Path(out_dir) / "traces"
        trace_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for (sc, algo, k), cfg, (trace, wall) in zip(cells, configs, results):
        trace_path = ""
        if trace_dir is not None:
            trace_path = str(trace_dir / f"{sc.name}_{algo}_run{k}.csv")
            export_convergence_csv(trace, trace_path)
        records.append(
            RunRecord(
                scenario=sc.name,
                algorithm=algo,
                run_index=k,
                seed=cfg.seed,
                final_fitness=trace.final_fitness,
                feasible=trace.feasible,
                wall_time=wall,
                trace_path=trace_path,
                trace=trace,
            )
        )
        if progress is not None:
            progress(records[-1])
    return records


def summarize(records: list[RunRecord], spec: BenchmarkSpec, alpha: float = 0.05) -> list[dict]:
    """Mean/Std per cell plus the paired t-test of every algorithm against
    the baseline; pairs where either side failed are dropped."""
    by_cell: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        by_cell.setdefault((r.scenario, r.algorithm), []).append(r)
    rows = []
    for sc in spec.scenarios:
        base_runs = by_cell.get((sc.name, spec.baseline), [])
        for algo in spec.algorithms:
            runs = sorted(by_cell.get((sc.name, algo), []), key=lambda r: r.run_index)
            finite = [r.final_fitness for r in runs if r.feasible]
            row = {"scenario": sc.name, "algorithm": algo,
                   "mean": "", "std": "", "t": "", "p": "", "verdict": Verdict.NA.value}
            if finite:
                summary = mean_std(finite)
                row["mean"] = f"{summary.mean:.6f}"
                row["std"] = f"{summary.std:.6f}"
            if algo != spec.baseline and base_runs:
                base_sorted = sorted(base_runs, key=lambda r: r.run_index)
                pairs = [
                    (b.final_fitness, a.final_fitness)
                    for b, a in zip(base_sorted, runs)
                    if b.feasible and a.feasible
                ]
                if len(pairs) >= 2:
                    base_vals = [p[0] for p in pairs]
                    algo_vals = [p[1] for p in pairs]
                    # Oriented so D+ means the baseline is statistically better.
                    verdict = paired_t_test(base_vals, algo_vals, alpha=alpha)
                    row["t"] = f"{verdict.t_statistic:.4f}"
                    row["p"] = f"{verdict.p_value:.6g}"
                    row["verdict"] = verdict.verdict.value
            rows.append(row)
    return rows


def write_summary_csv(rows: list[dict], file_path) -> None:
    with open(file_path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["scenario", "algorithm", "mean", "std", "t", "p", "verdict"]
        )
        writer.writeheader()
        writer.writerows(rows)


def write_runs_csv(records: list[RunRecord], file_path) -> None:
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["scenario", "algorithm", "run", "seed", "final_fitness", "feasible",
             "wall_time_s", "trace_path"]
        )
        for r in records:
            writer.writerow(
                [r.scenario, r.algorithm, r.run_index, r.seed, repr(r.final_fitness),
                 int(r.feasible), f"{r.wall_time:.3f}", r.trace_path]
            )


# --- subcommands ------------------------------------------------------------------


def cmd_plan(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        config = SwarmConfig(
            swarm_size=args.swarm, max_iterations=args.iters, seed=args.seed
        )
    except (ConfigError, DemParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    trace = run(args.algo, scenario, config)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        export_waypoints_csv(trace.best_path, out / "waypoints.csv")
        export_convergence_csv(trace, out / "convergence.csv")
        breakdown = total_cost(trace.best_path, scenario)
        export_breakdown_csv(breakdown, out / "breakdown.csv")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"scenario: {scenario.name}  algorithm: {args.algo}  seed: {args.seed}")
    print(f"total cost: {breakdown.total}  (f1={breakdown.f1:.3f} f2={breakdown.f2} "
          f"f3={breakdown.f3:.3f} f4={breakdown.f4:.3f})")
    print(f"feasible: {trace.feasible}  evaluations: {trace.evaluations}")
    print(f"outputs in {out}")
    if not trace.feasible:
        print("failed run: no collision-free path inside the corridor was found",
              file=sys.stderr)
        return EXIT_FAILED_RUN
    return EXIT_OK


def _resolve_scenarios(args) -> tuple[Scenario, ...]:
    if args.scenarios:
        return tuple(load_scenario(p) for p in args.scenarios.split(","))
    return tuple(build_benchmark_suite(args.suite_seed))


def cmd_bench(args) -> int:
    try:
        scenarios = _resolve_scenarios(args)
        spec = BenchmarkSpec(
            scenarios=scenarios,
            algorithms=tuple(args.algos.split(",")),
            runs_per_cell=args.runs,
            base_config=SwarmConfig(
                swarm_size=args.swarm, max_iterations=args.iters
            ),
            baseline=args.baseline,
            base_seed=args.seed,
            jobs=args.jobs,
        )
    except (ConfigError, DemParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        done = {"n": 0}
        total = len(spec.scenarios) * len(spec.algorithms) * spec.runs_per_cell

        def progress(record):
            done["n"] += 1
            flag = "ok" if record.feasible else "FAILED"
            print(f"[{done['n']}/{total}] {record.scenario} {record.algorithm} "
                  f"run {record.run_index}: {record.final_fitness:.3f} ({flag})")

        records = run_benchmark(spec, out_dir=out, progress=progress)
        rows = summarize(records, spec)
        write_runs_csv(records, out / "runs.csv")
        write_summary_csv(rows, out / "summary.csv")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"summary written to {out / 'summary.csv'}")
    n_failed = sum(not r.feasible for r in records)
    if n_failed:
        print(f"{n_failed} failed run(s) recorded in runs.csv and dropped "
              "from the summary statistics", file=sys.stderr)
    feasible_cells = {
        (r.scenario, r.algorithm) for r in records if r.feasible
    }
    all_cells = {(sc.name, a) for sc in spec.scenarios for a in spec.algorithms}
    missing = sorted(all_cells - feasible_cells)
    if missing:
        print(f"cells with no feasible run: {missing}", file=sys.stderr)
        return EXIT_FAILED_RUN
    return EXIT_OK


def cmd_suite_generate(args) -> int:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for scenario in build_benchmark_suite(args.seed):
            save_scenario(scenario, out / f"{scenario.name}.yaml")
            print(f"wrote {out / (scenario.name + '.yaml')}")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavpath", description="Terrain-aware UAV path planning toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan one path for a scenario file")
    plan.add_argument("scenario", help="scenario config (YAML)")
    plan.add_argument("--algo", required=True, choices=ALGORITHMS)
    plan.add_argument("--iters", type=int, default=200)
    plan.add_argument("--swarm", type=int, default=500)
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--out", default="plan_out")
    plan.set_defaults(func=cmd_plan)

    bench = sub.add_parser("bench", help="run a benchmark matrix")
    group = bench.add_mutually_exclusive_group()
    group.add_argument("--suite-seed", type=int, default=0,
                       help="use the built-in 8-scenario suite with this seed")
    group.add_argument("--scenarios", help="comma-separated scenario config files")
    bench.add_argument("--algos", required=True,
                       help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    bench.add_argument("--runs", type=int, default=10)
    bench.add_argument("--baseline", default="spso", choices=ALGORITHMS)
    bench.add_argument("--iters", type=int, default=200)
    bench.add_argument("--swarm", type=int, default=500)
    bench.add_argument("--seed", type=int, default=0, help="base seed")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", default="bench_out")
    bench.set_defaults(func=cmd_bench)

    suite = sub.add_parser("suite", help="suite utilities")
    suite_sub = suite.add_subparsers(dest="suite_command", required=True)
    gen = suite_sub.add_parser("generate", help="materialize the built-in suite")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="suite_out")
    gen.set_defaults(func=cmd_suite_generate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
