"""Plan one path with the spherical-vector solver on a built-in scenario
and export plot-ready CSV files."""

import tempfile
from pathlib import Path

from uavpath import SwarmConfig, run, total_cost
from uavpath.cli import export_convergence_csv, export_waypoints_csv
from uavpath.suite import build_benchmark_suite

scenario = build_benchmark_suite(seed=0)[3]  # "s4": corridor threats block the line
print(f"scenario {scenario.name}: {len(scenario.threats)} threats, "
      f"{scenario.n_waypoints} waypoints")

trace = run("spso", scenario, SwarmConfig(swarm_size=100, max_iterations=150, seed=1))
print(f"feasible: {trace.feasible}   evaluations: {trace.evaluations}")
print(f"best fitness: start {trace.best_fitness[0]:.1f} -> "
      f"iter 50 {trace.best_fitness[49]:.1f} -> final {trace.final_fitness:.1f}")

breakdown = total_cost(trace.best_path, scenario)
print(f"breakdown: length={breakdown.f1:.1f} threat={breakdown.f2:.2f} "
      f"altitude={breakdown.f3:.1f} smooth={breakdown.f4:.2f}")

print("waypoints (x, y, z):")
for p in trace.best_path:
    print(f"   {p[0]:7.1f} {p[1]:7.1f} {p[2]:6.1f}")

with tempfile.TemporaryDirectory() as tmp:
    export_waypoints_csv(trace.best_path, Path(tmp) / "waypoints.csv")
    export_convergence_csv(trace, Path(tmp) / "convergence.csv")
    print("exported:", sorted(p.name for p in Path(tmp).iterdir()))
