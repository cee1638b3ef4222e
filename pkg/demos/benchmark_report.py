"""
Benchmark report
================

Run every algorithm on a few synthetic streams and write the per-trial
CSV.  The same thing is available from the shell as
``python -m rocp bench --dims 20,20,20,60 --trials 3 --csv report.csv``.
"""

import tempfile
from pathlib import Path

from rocp import BenchConfig, run_benchmark

out = Path(tempfile.mkdtemp())
cfg = BenchConfig(dims=(20, 20, 20, 60), rank=5, trials=3, seed=0, output=str(out / "report.csv"))
report = run_benchmark(cfg)

print(report.summary())
for algo, stats in report.aggregates().items():
    mean, std = stats["total_seconds"]
    print(f"{algo:<12} {mean:.3f} ± {std:.3f} s total, "
          f"{1e3 * stats['seconds_per_update'][0]:.2f} ms per update")

report.write_update_series(out / "updates.csv")
print((out / "report.csv").read_text().splitlines()[0])
