"""Figure rendering for sweep results and deployments (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_mean_rate_figure(summary: dict, path) -> Path:
    """Bar chart of mean common rate per algorithm with 5th-percentile marks."""
    algs = sorted(summary["algorithms"])
    means = [summary["algorithms"][a]["common_rate_bps_hz"]["mean"] for a in algs]
    p5s = [summary["algorithms"][a]["common_rate_bps_hz"]["p5"] for a in algs]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(algs)), 3.2))
    xs = np.arange(len(algs))
    ax.bar(xs, means, color="tab:blue", label="mean")
    ax.plot(xs, p5s, "kv", markersize=6, label="5th percentile")
    ax.set_xticks(xs)
    ax.set_xticklabels(algs, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("common rate (bps/Hz)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_rate_cdf_figure(records, path) -> Path:
    """Empirical CDF of the per-realization common rate, one line per algorithm."""
    by_alg: dict = {}
    for rec in records:
        by_alg.setdefault(rec.algorithm, []).append(rec.common_rate)
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    for alg in sorted(by_alg):
        values = np.sort(np.asarray(by_alg[alg]))
        cdf = np.arange(1, values.size + 1) / values.size
        ax.step(values, cdf, where="post", label=alg, linewidth=1.2)
    ax.set_xlabel("common rate (bps/Hz)")
    ax.set_ylabel("CDF over realizations")
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_deployment_figure(instance, path, assignment=None) -> Path:
    """Deployment map: circles for ANs, diamonds for UEs, pairing links.

    With an assignment, links are colored by partition index.
    """
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    an = instance.deployment.an_positions
    ue = instance.deployment.ue_positions
    ax.scatter(an[:, 0], an[:, 1], marker="o", s=50, facecolors="none",
               edgecolors="tab:blue", label="AN")
    ax.scatter(ue[:, 0], ue[:, 1], marker="D", s=30, color="tab:red", label="UE")
    if assignment is not None:
        cmap = plt.get_cmap("tab10")
        for k, m in assignment.serving_an.items():
            n = assignment.partition_of[k]
            ax.plot([ue[k, 0], an[m, 0]], [ue[k, 1], an[m, 1]],
                    color=cmap(n % 10), linewidth=1.0)
    side = instance.config.area_side
    ax.set_xlim(0, side)
    ax.set_ylim(0, side)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_sweep_figures(records, summary: dict, out_stem) -> list:
    """Render the standard sweep figures next to the CSV; returns their paths."""
    stem = Path(out_stem)
    paths = [
        save_mean_rate_figure(summary, stem.with_name(stem.name + "_mean_rates.png")),
        save_rate_cdf_figure(records, stem.with_name(stem.name + "_rate_cdf.png")),
    ]
    return paths
