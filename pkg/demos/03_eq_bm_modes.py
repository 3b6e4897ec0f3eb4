"""EQ and BM modes of the three reference operators, plotted.

EQ(j) counts how many of the 16.7M colors land on gray level j; the BM
curve is the mean CIE L* of those colors against the brightness assigned
to the level. Points above the dashed isoline are levels where the
operator assigned less brightness than the colors actually have.
"""

import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from graymode import CHOSEN, STANDARD, UNIFORM, bm_deviation, compute_modes

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

operators = [("uniform", UNIFORM), ("standard", STANDARD), ("chosen", CHOSEN)]
results = {}
for name, op in operators:
    start = time.perf_counter()
    results[name] = compute_modes(op)
    print(f"{name:9s} full-cube pass in {time.perf_counter() - start:.2f}s")

levels = np.arange(256)
brightness = 100.0 * levels / 255.0

fig, axes = plt.subplots(2, 3, figsize=(15, 8))
for col, (name, op) in enumerate(operators):
    eq, bm = results[name]
    axes[0, col].plot(levels, eq.counts, lw=0.8)
    axes[0, col].set_title(f"{name}: EQ mode")
    axes[0, col].set_xlabel("gray level j")
    axes[0, col].set_ylabel("colors mapped")

    axes[1, col].fill_between(brightness, bm.mean_lstar - bm.std_lstar,
                              bm.mean_lstar + bm.std_lstar, alpha=0.25,
                              label="+/- std dev")
    axes[1, col].plot(brightness, bm.mean_lstar, lw=1.2, label="BM mode")
    axes[1, col].plot(brightness, brightness, "k--", lw=0.8, label="isoline")
    axes[1, col].set_title(f"{name}: BM mode")
    axes[1, col].set_xlabel("assigned brightness b(j) [%]")
    axes[1, col].set_ylabel("mean L* of mapped colors [%]")
    axes[1, col].legend(loc="upper left", fontsize=8)

fig.tight_layout()
fig.savefig(OUT / "modes.png", dpi=110)
print(f"wrote {OUT / 'modes.png'}")

print("\nBM deviation over the final 40% of the grayscale:")
for name, _ in operators:
    _, bm = results[name]
    top = bm_deviation(bm)[154:]
    print(f"  {name:9s} mean deviation {np.nanmean(top):+.2f}% "
          f"({'below' if np.nanmean(top) < 0 else 'above'} the isoline)")
