"""A miniature benchmark: four solvers on two scenarios, with the
Mean / Std / t-test summary the full harness produces.

The full-scale matrix (swarm 500, 200 iterations, 10 runs) lives behind
`uavpath bench`; this keeps the same machinery small enough to watch.
"""

from uavpath import SwarmConfig
from uavpath.cli import BenchmarkSpec, run_benchmark, summarize
from uavpath.suite import build_benchmark_suite

suite = build_benchmark_suite(seed=0)
spec = BenchmarkSpec(
    scenarios=(suite[0], suite[3]),          # one simple, one complicated
    algorithms=("spso", "pso", "qpso", "de"),
    runs_per_cell=3,
    base_config=SwarmConfig(swarm_size=60, max_iterations=60),
    baseline="spso",
    base_seed=0,
)
print("running", len(spec.scenarios) * len(spec.algorithms) * spec.runs_per_cell,
      "optimizations (DE automatically trades swarm size for iterations)...")
records = run_benchmark(spec)

print(f"\n{'scenario':>9} {'algorithm':>10} {'mean':>10} {'std':>8} {'t':>8} {'verdict':>8}")
for row in summarize(records, spec):
    print(f"{row['scenario']:>9} {row['algorithm']:>10} "
          f"{float(row['mean']):10.1f} {float(row['std']):8.1f} "
          f"{row['t'] or '-':>8} {row['verdict']:>8}")
print("\nD+ means the spso baseline is statistically better at alpha = 0.05;"
      "\nN means the difference is insignificant at this tiny sample size.")
