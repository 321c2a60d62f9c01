"""Example plots for the CSV reports (needs pandas and matplotlib).

    python docs/plot_reports.py RESULT_DIR
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

reports = Path(sys.argv[1]) / "reports"
fig, axes = plt.subplots(2, 2, figsize=(12, 9))

hm = pd.read_csv(reports / "heatmap.v1.csv")
grid = hm.pivot(index="bit", columns="round", values="divergence_geom")
im = axes[0, 0].imshow(grid, aspect="auto", origin="lower",
                       extent=[grid.columns.min() - 0.5, grid.columns.max() + 0.5, 0.5, 32.5])
axes[0, 0].set(xlabel="round", ylabel="bit", title="|p - 0.5| (geometric mean)")
fig.colorbar(im, ax=axes[0, 0])

sm = pd.read_csv(reports / "summary.v1.csv")
for col in ("min", "q1", "median", "q3", "max"):
    axes[0, 1].plot(sm["flat_bit_index"], sm[col], lw=0.6, label=col)
axes[0, 1].set(xlabel="flat bit index", ylabel="p - 0.5", title="five-figure summary")
axes[0, 1].legend()

hist = pd.read_csv(reports / "histogram.v1.csv")
axes[1, 0].bar(hist["bucket_center"], hist["count"], width=1 / 672)
axes[1, 0].set(xlabel="per-input SAC value", ylabel="count", title="distribution")

qq = pd.read_csv(reports / "qq.v1.csv")
for family, g in qq.groupby("family"):
    axes[1, 1].plot(g["theoretical"], g["empirical"], ".", ms=2, label=family)
lo, hi = qq["empirical"].min(), qq["empirical"].max()
axes[1, 1].plot([lo, hi], [lo, hi], "k-", lw=0.5)
axes[1, 1].set(xlabel="theoretical", ylabel="empirical", title="Q-Q")
axes[1, 1].legend()

fig.tight_layout()
fig.savefig(reports / "overview.png", dpi=120)
