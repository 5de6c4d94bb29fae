"""The benchmark harness: every solver against the exact reference.

Reproduces the quality/runtime protocol at desk scale: 20 random instances
per size, every solver driving the same split pipeline, quality measured
against the exact subset DP.  Writes the CSV consumed by the report tool.
"""

from ecoform import (BenchConfig, Decomposed, Exhaustive, RandomSampler,
                     RandomSource, Sa, Sqa, Tabu, aggregate, run_benchmark,
                     write_records)

config = BenchConfig(
    sizes=(8, 10, 12),
    source=RandomSource(sigma=0.2, density=0.95),
    solvers=(
        ("exhaustive", Exhaustive()),
        ("sa", Sa()),
        ("tabu", Tabu()),
        ("sqa", Sqa()),
        ("qbsolv", Decomposed()),
        ("random", RandomSampler()),
    ),
    seeds_per_point=20,
    reference="exact-dp",
)

records = run_benchmark(config)
write_records(records, "solver_shootout.csv")
print(f"wrote {len(records)} rows to solver_shootout.csv\n")

print(f"{'n':>3} {'solver':>10} {'mean quality':>13} {'std':>8} {'mean ms':>9}")
for row in aggregate(records):
    print(f"{row.n:>3} {row.solver:>10} {row.mean_quality:>13.4f} "
          f"{row.std_quality:>8.4f} {row.mean_runtime_ms:>9.3f}")
