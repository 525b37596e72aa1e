"""Figure rendering for report outputs.

Each helper writes one PNG next to the delimited file it illustrates; the
CLI calls these after the CSV writers so a report directory always carries
both forms.  Matplotlib runs on the Agg backend, so no display is needed.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .pipeline import RunReport


def plot_per_rep_accuracy(report: RunReport, path) -> None:
    """Per-repetition accuracy with the mean marked as a horizontal line."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    reps = np.arange(len(report.per_rep_accuracy))
    ax.plot(reps, report.per_rep_accuracy, "o-", ms=4)
    ax.axhline(report.mean_accuracy, color="tab:red", lw=1,
               label=f"mean {report.mean_accuracy:.4f}")
    ax.set_xlabel("repetition")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(report: RunReport, param: str, path) -> None:
    """Mean accuracy with a one-std band over the sweep grid."""
    if report.sweep_grid is None:
        raise ValueError("report carries no sweep grid")
    values = np.array([row[0] for row in report.sweep_grid])
    means = np.array([row[1] for row in report.sweep_grid])
    stds = np.array([row[2] for row in report.sweep_grid])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(values, means, "o-", ms=4)
    ax.fill_between(values, means - stds, means + stds, alpha=0.2)
    if report.best_param is not None:
        ax.axvline(report.best_param, color="tab:red", lw=1,
                   label=f"best {report.best_param:g}")
        ax.legend(loc="lower right")
    ax.set_xlabel(param)
    ax.set_ylabel("mean accuracy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_oco(class_ids: np.ndarray, outputs: np.ndarray, path) -> None:
    """Stem plot of normalized per-class origin outputs for one probe."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.stem(class_ids, outputs)
    ax.set_xlabel("class")
    ax.set_ylabel("normalized origin output")
    ax.axhline(0.0, color="black", lw=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_confusion(report: RunReport, path) -> None:
    """Row-normalized confusion matrix pooled over repetitions."""
    conf = report.confusion.astype(np.float64)
    rows = conf.sum(axis=1, keepdims=True)
    conf = np.divide(conf, rows, out=np.zeros_like(conf), where=rows > 0)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(conf, cmap="viridis", vmin=0.0, vmax=1.0)
    fig.colorbar(im, ax=ax, label="fraction")
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
