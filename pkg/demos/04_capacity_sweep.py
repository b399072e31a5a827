"""A small end-to-end capacity sweep with CSV output.

One fixed train/test pair, a log-uniform grid of feature counts crossing
the interpolation threshold, fresh feature draws per repeat, and
median/quartile aggregation. The records and summary files are the same
ones the CLI writes and the plotting frontend reads.
"""

from narxdd import ChenConfig, SweepConfig, run_sweep, summarize, write_csv

cfg = SweepConfig(
    experiment="rff-minnorm",
    lo_ratio=0.1, hi_ratio=20.0, points=10, repeats=3, master_seed=1,
    train_cfg=ChenConfig(0.1, 0.7, 200, seed=11),
    test_cfg=ChenConfig(0.1, 0.7, 100, seed=12),
    gamma=0.6,
)
records = run_sweep(cfg, jobs=2)
write_csv(records, "sweep_records.csv")
summary = summarize(records)
write_csv(summary, "sweep_summary.csv")

print(f"{len(records)} records -> sweep_records.csv, sweep_summary.csv")
print(f"linear baseline test MSE: {summary.baseline_test_mse_osa:.4f}")
print(f"{'capacity':>9} {'ratio':>7} {'median test osa':>16}")
for row in summary.rows:
    if row.metric == "test_mse_osa":
        print(f"{row.capacity:>9} {row.ratio:>7.2f} {row.median:>16.4g}")
