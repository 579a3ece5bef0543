"""Figure rendering for the command-line report paths. Backend is forced to
Agg so the commands work on headless machines."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "save_accuracy_plot",
    "save_ensemble_plot",
    "save_fitness_plot",
    "save_trajectory_plot",
]


def save_trajectory_plot(traj, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name in traj.variables:
        ax.plot(traj.times, traj.column(name), label=name, linewidth=1.4)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_fitness_plot(curve, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    gens = range(len(curve))
    finite = [v for v in curve if v > 0]
    ax.plot(gens, curve, marker="o", markersize=3, linewidth=1.2)
    if finite and max(finite) / max(min(finite), 1e-300) > 1e3:
        ax.set_yscale("symlog", linthresh=min(finite))
    ax.set_xlabel("generation")
    ax.set_ylabel("best fitness")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_ensemble_plot(ensemble, param_ids, bounds, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 5))
    if ensemble and len(param_ids) >= 2:
        xs = [ind[0] for ind in ensemble]
        ys = [ind[1] for ind in ensemble]
        ax.scatter(xs, ys, s=14, alpha=0.7)
        ax.set_xlim(*bounds[0])
        ax.set_ylim(*bounds[1])
        ax.set_xlabel(param_ids[0])
        ax.set_ylabel(param_ids[1])
    else:
        # 1-D search: strip plot on the only axis
        xs = [ind[0] for ind in ensemble]
        ax.scatter(xs, [0.0] * len(xs), s=14, alpha=0.7)
        if bounds:
            ax.set_xlim(*bounds[0])
        ax.set_xlabel(param_ids[0] if param_ids else "")
        ax.set_yticks([])
    ax.set_title(f"plausible ensemble ({len(ensemble)})", fontsize=10)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_accuracy_plot(labels_curve, accuracy_curve, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(labels_curve, accuracy_curve, marker="o", markersize=3, linewidth=1.2)
    ax.set_xlabel("oracle labels spent")
    ax.set_ylabel("held-out accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
