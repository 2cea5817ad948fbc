"""Matplotlib figure rendering for the report commands.

Figures are written next to the delimited output; the numeric artifact
stays the source of truth and the plots are derived views of it.
"""

from __future__ import annotations

from typing import Dict, Sequence

MODE_COLORS = ("black", "red", "green", "blue", "purple", "orange")


def _use_agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_z_grid(ts: Sequence, series: Dict[str, Sequence], out_path: str) -> None:
    """Overlay Z curves (one per mode) on [t_lo, t_hi]."""
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = [float(t) for t in ts]
    for idx, (label, values) in enumerate(series.items()):
        ax.plot(xs, [float(v) for v in values],
                color=MODE_COLORS[idx % len(MODE_COLORS)],
                linewidth=1.1, label=label)
    ax.axhline(0.0, color="gray", linewidth=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("Z(t)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_zero_errors(indices: Sequence[int], errors: Sequence, out_path: str) -> None:
    """|t0 - t0'| per zero index, log scale."""
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(list(indices), [abs(float(e)) for e in errors], "o-", color="black")
    ax.set_xlabel("zero index")
    ax.set_ylabel("|t0 - t0'|")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
