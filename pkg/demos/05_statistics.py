"""The statistics layer on its own: sample summaries and paired t-test
verdicts, including the zero-variance dominance rule."""

import numpy as np

from uavpath import mean_std, paired_t_test

rng = np.random.default_rng(7)

print("sample summary of [2, 4, 4, 4, 5, 5, 7, 9]:")
s = mean_std([2, 4, 4, 4, 5, 5, 7, 9])
print(f"  n={s.n} mean={s.mean} std={s.std:.4f}")

# Ten paired runs of two fictional solvers; lower fitness is better.
a = rng.normal(5000.0, 60.0, 10)
cases = {
    "clearly better": a - rng.normal(250.0, 30.0, 10),
    "noise-level difference": a + rng.normal(0.0, 40.0, 10),
    "clearly worse": a + rng.normal(300.0, 30.0, 10),
    "constant shift (dominance)": a - 10.0,
}
print("\npaired t-test of candidate vs reference (alpha = 0.05):")
for label, b in cases.items():
    out = paired_t_test(b, a)
    t = f"{out.t_statistic:8.3f}" if np.isfinite(out.t_statistic) else f"{out.t_statistic:>8}"
    print(f"  {label:28s} t={t} p={out.p_value:9.3g} -> {out.verdict.value}")

print("\nswapping the samples mirrors the verdict:")
out = paired_t_test(a, a - rng.normal(250.0, 30.0, 10))
print(f"  reference vs better candidate -> {out.verdict.value}")
