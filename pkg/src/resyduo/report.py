"""Report figures rendered next to the delimited output files.

Everything goes through the Agg backend so rendering works headless and
the PNG bytes are stable for a given matplotlib/font stack, which keeps
the CLI's repeat-run outputs byte-identical.
"""

from __future__ import annotations

import io
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .persistence import write_bytes_atomic

_DPI = 120


def fold_metrics_figure(report):
    """Per-fold accuracy and error curves with the averages in the legend."""
    folds = list(range(1, len(report.per_fold) + 1))
    acc_avg, rank_avg = report.averages
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

    for name, values, avg in (
        ("precision", [a.precision for a, _ in report.per_fold], acc_avg.precision),
        ("recall", [a.recall for a, _ in report.per_fold], acc_avg.recall),
        ("success rate", [a.success_rate for a, _ in report.per_fold], acc_avg.success_rate),
    ):
        ax1.plot(folds, values, marker="o", label=f"{name} (avg {avg:.3f})")
    ax1.set_xlabel("fold")
    ax1.set_ylabel("score")
    ax1.set_ylim(-0.05, 1.05)
    ax1.set_xticks(folds)
    ax1.legend(fontsize=8)
    ax1.set_title("ranking accuracy per fold")

    for name, values, avg in (
        ("mae", [r.mae for _, r in report.per_fold], rank_avg.mae),
        ("rmse", [r.rmse for _, r in report.per_fold], rank_avg.rmse),
    ):
        ax2.plot(folds, values, marker="s", label=f"{name} (avg {avg:.4f})")
    ax2.set_xlabel("fold")
    ax2.set_ylabel("normalized error")
    ax2.set_xticks(folds)
    ax2.legend(fontsize=8)
    ax2.set_title("prediction error per fold")

    cfg = report.config
    fig.suptitle(
        f"{report.dataset_tag or 'evaluation'} | {cfg.similarity}/{cfg.mode} "
        f"min_support={cfg.min_support} k={cfg.k} "
        f"cutoff=({report.cutoff.v},{report.cutoff.h}) n={report.n}",
        fontsize=9,
    )
    fig.tight_layout()
    return fig


def scoreboard_figure(result):
    """Bar chart of every grid config's score; the winner is highlighted."""
    # failed configs carry an infinite sentinel; draw them at 0
    scores = [s if math.isfinite(s) else 0.0 for _, s in result.scoreboard]
    labels = [
        f"{c.similarity[:3]}/{c.mode[0]}/s{c.min_support}/k{c.k}"
        for c, _ in result.scoreboard
    ]
    best_idx = next(
        i for i, (c, _) in enumerate(result.scoreboard) if c == result.best
    )
    fig, ax = plt.subplots(figsize=(max(6, 0.22 * len(scores)), 4.5))
    colors = ["#d62728" if i == best_idx else "#1f77b4" for i in range(len(scores))]
    ax.bar(range(len(scores)), scores, color=colors)
    ax.set_xticks(range(len(scores)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_ylabel(result.criterion)
    ax.set_title(f"grid search scoreboard (best: {labels[best_idx]})", fontsize=9)
    fig.tight_layout()
    return fig


def save_figure(fig, path):
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=_DPI)
    plt.close(fig)
    write_bytes_atomic(path, buf.getvalue())
