"""Figure rendering for the CLI report path.

Plots are convenience artifacts rendered next to the delimited output;
tests never consume them.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import SpectrumResult, SweepResult

_SWEEP_XLABELS = {
    "spacing": "element spacing [m]",
    "distance": "TE-RE distance [m]",
    "elements": "transmit element count",
}


def plot_sweep(result: SweepResult, path) -> None:
    """Log-y MSE curves, one line per (model, tilt)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    tilts = sorted({p.tilt_deg for p in result.points})
    for tilt in tilts:
        pts = [p for p in result.points if p.tilt_deg == tilt and p.converged]
        xs = [p.value for p in pts]
        ax.plot(xs, [p.mse_ca1 for p in pts], marker="o", label=f"CA-I, tilt {tilt:g}°")
        ax.plot(
            xs,
            [p.mse_ca2 for p in pts],
            marker="s",
            linestyle="--",
            label=f"CA-II, tilt {tilt:g}°",
        )
    ax.set_yscale("log")
    if result.sweep_variable != "elements":
        ax.set_xscale("log")
    ax.set_xlabel(_SWEEP_XLABELS.get(result.sweep_variable, result.sweep_variable))
    ax.set_ylabel("normalized MSE")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_spectra(results: list[SpectrumResult], path) -> None:
    """Singular-value overlays, one panel per configuration."""
    config_ids = sorted({r.config_id for r in results})
    fig, axes = plt.subplots(
        1, len(config_ids), figsize=(4.8 * len(config_ids), 4.2), squeeze=False
    )
    for ax, cid in zip(axes[0], config_ids):
        for res in results:
            if res.config_id != cid:
                continue
            ax.semilogy(
                range(1, len(res.singular_values) + 1),
                res.singular_values,
                label=res.model.value if res.model else "unknown",
            )
        ax.set_title(cid, fontsize=9)
        ax.set_xlabel("mode index")
        ax.set_ylabel("singular value")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
