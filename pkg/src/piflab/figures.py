"""Figure rendering for report outputs.

Whenever a command writes its delimited report to a directory, a matching
figure lands next to it.  matplotlib is imported lazily with the Agg
backend so that headless runs and non-plotting code paths stay light.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .distributions import CategoricalDist
from .runner import RunReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_pif_report_figure(
    report: RunReport, target: CategoricalDist, path: str | Path
) -> Path:
    """Mean empirical frequency per label (with spread) next to the target."""
    plt = _pyplot()
    labels = target.labels
    per_label = {label: [] for label in labels}
    for rep in report.repetitions:
        for label, p in zip(rep.empirical.labels, rep.empirical.probs):
            per_label[label].append(p)
    means = [sum(v) / len(v) for v in per_label.values()]
    spreads = [
        (max(v) - min(v)) / 2.0 if len(v) > 1 else 0.0 for v in per_label.values()
    ]
    x = range(len(labels))
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    width = 0.38
    ax.bar(
        [i - width / 2 for i in x],
        target.probs,
        width,
        label="target",
        color="#888888",
    )
    ax.bar(
        [i + width / 2 for i in x],
        means,
        width,
        yerr=spreads,
        capsize=3,
        label="empirical mean",
        color="#3b74b8",
    )
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel("probability")
    js = report.metrics["js"]
    ax.set_title(
        f"answer frequencies vs target "
        f"(JS {js['scaled_mean']:.2f}±{js['scaled_std']:.2f} ×10⁻³)"
    )
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_rps_scores_figure(
    scores: Sequence[int], label: str, path: str | Path
) -> Path:
    """Final match scores across seeds, with their mean marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    x = range(len(scores))
    ax.bar(list(x), list(scores), color="#3b74b8", width=0.8)
    mean = sum(scores) / len(scores)
    ax.axhline(mean, color="#c0392b", linewidth=1.2, label=f"mean {mean:.1f}")
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("match (seed index)")
    ax.set_ylabel("final score")
    ax.set_title(label)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_complexity_figure(
    reports: Sequence[dict], path: str | Path
) -> Path:
    """Normalized LZ and compression ratio per analyzed item."""
    plt = _pyplot()
    x = list(range(len(reports)))
    lz = [r["normalized_lz"] for r in reports]
    ratio = [r["compression_ratio"] for r in reports]
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(x, lz, "o-", color="#3b74b8", label="normalized LZ")
    ax.plot(x, ratio, "s--", color="#c0392b", label="compression ratio")
    ax.set_xlabel("item")
    ax.set_ylabel("complexity measure")
    ax.set_ylim(bottom=0.0)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
