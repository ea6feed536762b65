"""Plot average error and miss rate against grid density from a sweep file.

Usage::

    qcomp sweep --trials 500 --out sweep.csv
    python3 demos/plot_sweep.py sweep.csv sweep.png

matplotlib is not a dependency of the package; install it to run this script.
"""
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from qcomp import load_rows  # noqa: E402

rows = load_rows(sys.argv[1])
series = defaultdict(list)
for row in rows:
    series[(row.scheme, row.channel)].append(row)

fig, (ax_err, ax_miss) = plt.subplots(1, 2, figsize=(10, 4))
for (scheme, channel), cells in sorted(series.items()):
    cells.sort(key=lambda r: r.rho)
    style = "-" if scheme == "taylor1" else ":"
    label = f"{scheme}/{channel}"
    ax_err.semilogy([r.rho for r in cells], [r.avg_error for r in cells], style, marker="o", label=label)
    ax_miss.plot([r.rho for r in cells], [r.miss_rate for r in cells], style, marker="o", label=label)
ax_err.set(xlabel="grid density", ylabel="average error (cells)")
ax_miss.set(xlabel="grid density", ylabel="miss rate")
ax_err.legend(fontsize=7)
fig.tight_layout()
fig.savefig(sys.argv[2] if len(sys.argv) > 2 else "sweep.png", dpi=120)
