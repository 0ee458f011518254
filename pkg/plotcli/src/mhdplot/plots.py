"""Figure builders for solver output: field heatmaps, diagnostic time
series, and 1D slices."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import LogNorm

from .io import SnapshotTable, read_diagnostics, read_reference_curve

_LABELS = {
    "mean_alpha": "mean blending coefficient",
    "total_entropy": "total entropy",
    "min_rho": "min density",
    "min_p": "min pressure",
}


def plot_field(snapshot: SnapshotTable, quantity: str, out_path, log_scale: bool = False,
               title: str | None = None):
    """Heatmap of one snapshot quantity; log color scale for e.g. rotor density."""
    xs, ys, grid = snapshot.grid(quantity)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    norm = LogNorm(vmin=max(grid.min(), 1e-300), vmax=grid.max()) if log_scale else None
    mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", norm=norm, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=quantity)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(title or quantity)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def plot_timeseries(diagnostics_paths, labels, out_path, columns=("mean_alpha", "total_entropy")):
    """Overlaid diagnostic curves from one or more runs, one panel per column."""
    if labels is None:
        labels = [str(p) for p in diagnostics_paths]
    if len(labels) != len(diagnostics_paths):
        raise ValueError("one label per diagnostics file is required")
    fig, axes = plt.subplots(1, len(columns), figsize=(5.0 * len(columns), 4.0),
                             squeeze=False)
    for path, label in zip(diagnostics_paths, labels):
        data = read_diagnostics(path)
        for ax, column in zip(axes[0], columns):
            ax.plot(data["t"], data[column], label=label)
    for ax, column in zip(axes[0], columns):
        ax.set_xlabel("t")
        ax.set_ylabel(_LABELS.get(column, column))
        ax.legend()
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)


def plot_slice(snapshot: SnapshotTable, axis: str, coord: float, quantity: str,
               out_path, reference_path=None):
    """Quantity along the node line nearest to axis=coord, with an optional
    reference curve overlay."""
    pos, values, level = snapshot.line(axis, coord, quantity)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(pos, values, label=f"{quantity} at {axis}={level:.4f}")
    if reference_path is not None:
        ref_pos, ref_values = read_reference_curve(reference_path)
        ax.plot(ref_pos, ref_values, "--", label="reference")
    ax.set_xlabel("y" if axis == "x" else "x")
    ax.set_ylabel(quantity)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return Path(out_path)
