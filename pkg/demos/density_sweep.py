"""A small density sweep written to CSV, then summarized.

This is the library version of ``qcomp sweep``; shrink or grow the trial count
to trade time for Monte-Carlo spread.
"""
import sys

from qcomp import ExperimentConfig, emit, load_rows, run_sweep

out = sys.argv[1] if len(sys.argv) > 1 else "density_sweep.csv"
config = ExperimentConfig(k_targets=1, trials=200, densities=(0.5, 1.0, 2.0, 5.0))
emit(run_sweep(config), out)

print(f"{'scheme':8s} {'channel':14s} {'rho':>4s} {'error':>8s} {'miss':>6s} {'residue':>8s}")
for row in load_rows(out):
    print(f"{row.scheme:8s} {row.channel:14s} {row.rho:4g} {row.avg_error:8.4f} {row.miss_rate:6.3f} {row.avg_residue:8.4f}")
