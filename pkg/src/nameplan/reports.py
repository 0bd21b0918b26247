"""Delimited reports and their companion figures (PNG via the Agg backend)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .features import GROUP_OF_FEATURE
from .maxent import LooCurves, ig_group_report


def _ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def write_loo_report(curves: LooCurves, outdir: str, stem: str = "loo_curves") -> list[str]:
    """Error-rate curves over training-set fractions: TSV plus a figure."""
    _ensure_dir(outdir)
    tsv_path = os.path.join(outdir, f"{stem}.tsv")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("fraction\ttrain_error\ttest_error\n")
        for f, tr, te in zip(curves.fractions, curves.train_errors, curves.test_errors):
            fh.write(f"{f:.2f}\t{tr:.6f}\t{te:.6f}\n")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curves.fractions, curves.test_errors, "o-", label="test error")
    ax.plot(curves.fractions, curves.train_errors, "s--", label="training error")
    ax.set_xlabel("fraction of training data")
    ax.set_ylabel("error rate")
    ax.set_ylim(bottom=0)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(outdir, f"{stem}.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, png_path]


def write_ig_report(ig: dict[str, float], outdir: str, stem: str = "information_gain") -> list[str]:
    """Per-feature information gain (TSV, descending), the per-group summary
    table, and an ascending-IG-per-group figure."""
    _ensure_dir(outdir)
    tsv_path = os.path.join(outdir, f"{stem}.tsv")
    ranked = sorted(ig.items(), key=lambda kv: (-kv[1], kv[0]))
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("feature\tgroup\tinformation_gain\n")
        for name, value in ranked:
            fh.write(f"{name}\t{GROUP_OF_FEATURE.get(name, 'other')}\t{value:.6f}\n")

    groups = ig_group_report(ig, GROUP_OF_FEATURE)
    group_path = os.path.join(outdir, f"{stem}_groups.tsv")
    with open(group_path, "w", encoding="utf-8") as fh:
        fh.write("group\tavg\tmax\tmin\n")
        for group, stats in groups.items():
            fh.write(
                f"{group}\t{stats['avg']:.6f}\t{stats['max']:.6f}\t{stats['min']:.6f}\n"
            )

    fig, ax = plt.subplots(figsize=(7, 4))
    for group in sorted(groups):
        values = sorted(v for n, v in ig.items() if GROUP_OF_FEATURE.get(n) == group)
        ax.plot(range(len(values)), values, label=group)
    ax.set_xlabel("features (ascending IG within group)")
    ax.set_ylabel("information gain")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(outdir, f"{stem}.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, group_path, png_path]


def write_metrics_report(metrics: dict[str, float], outdir: str,
                         stem: str = "metrics") -> list[str]:
    """Flat metric table plus a bar figure."""
    _ensure_dir(outdir)
    tsv_path = os.path.join(outdir, f"{stem}.tsv")
    with open(tsv_path, "w", encoding="utf-8") as fh:
        fh.write("metric\tvalue\n")
        for name in sorted(metrics):
            fh.write(f"{name}\t{metrics[name]:.6f}\n")

    plotted = {k: v for k, v in metrics.items() if k != "targets"}
    fig, ax = plt.subplots(figsize=(max(4, len(plotted)), 4))
    names = sorted(plotted)
    ax.bar(range(len(names)), [plotted[n] for n in names], color="#4878a8")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(outdir, f"{stem}.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [tsv_path, png_path]
