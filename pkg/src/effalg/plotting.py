"""Figures for command reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .values import Interval  # noqa: E402


def plot_bounds(trace, path, title: str = "") -> None:
    """Lower and upper bounds against truncation depth, one line per bound."""
    depths = [d for d, _, _ in trace]
    fig, ax = plt.subplots(figsize=(6, 4))
    if trace and isinstance(trace[0][1], Interval):
        series = {
            "lower.lo": [float(lo.lo) for _, lo, _ in trace],
            "lower.hi": [float(lo.hi) for _, lo, _ in trace],
            "upper.lo": [float(hi.lo) for _, _, hi in trace],
            "upper.hi": [float(hi.hi) for _, _, hi in trace],
        }
    else:
        series = {
            "lower": [float(lo) for _, lo, _ in trace],
            "upper": [float(hi) for _, _, hi in trace],
        }
    for label, ys in series.items():
        ax.plot(depths, ys, marker="o", label=label)
    ax.set_xlabel("truncation depth")
    ax.set_ylabel("value")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
