"""Report figures: metric distributions across generated logs, per generator."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_METRICS = (
    ("els", "ELS", "similarity"),
    ("cfls", "CFLS", "similarity"),
    ("cycle_time_mae_s", "Cycle-time MAE (s)", "error"),
    ("emd", "EMD", "error"),
)

_COLORS = ("#1f6fb4", "#d1662c", "#3e8a5e", "#8a4ea0")


def render_metric_figures(report: dict, out_dir) -> list[Path]:
    """One panel per metric: per-log values as points, means as bars.

    Returns the paths written. Generators with no usable logs are skipped.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    generators = [
        (name, entry)
        for name, entry in report["generators"].items()
        if entry.get("per_log")
    ]
    if not generators:
        return []

    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5))
    for ax, (key, title, _) in zip(axes.flat, _METRICS):
        for gi, (name, entry) in enumerate(generators):
            values = [r[key] for r in entry["per_log"]]
            xs = [gi + (j - (len(values) - 1) / 2) * 0.04 for j in range(len(values))]
            color = _COLORS[gi % len(_COLORS)]
            ax.scatter(xs, values, s=18, color=color, alpha=0.75, zorder=3)
            ax.bar(gi, entry["mean"][key], width=0.55, color=color, alpha=0.25, zorder=2)
        ax.set_xticks(range(len(generators)))
        ax.set_xticklabels([name for name, _ in generators])
        ax.set_title(title, fontsize=10)
        ax.grid(axis="y", linewidth=0.4, alpha=0.5)
    fig.suptitle("Generated-log accuracy vs ground truth", fontsize=12)
    fig.tight_layout()
    path = out_dir / "metrics_by_generator.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
