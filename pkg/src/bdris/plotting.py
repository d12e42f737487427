"""Figure rendering for sweep reports.

Renders the mean-efficiency-versus-element-count figure (one error-bar
series per scheme) next to the delimited outputs.  The SVG backend is
seeded so figure ids are reproducible.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .scenario import SCHEME_ORDER, AggregateRow

_LABELS = {
    "fully_connected": "BD-RIS, fully-connected",
    "group_connected": "BD-RIS, group-connected",
    "single_connected": "D-RIS, single-connected",
    "no_ris": "no RIS",
}
_MARKERS = {
    "fully_connected": "o",
    "group_connected": "s",
    "single_connected": "^",
    "no_ris": "x",
}


def render_sweep_figure(aggregates: list[AggregateRow], path: str) -> None:
    """Write the per-scheme mean efficiency curves with standard-error bars."""
    plt.rcParams["svg.hashsalt"] = "bdris"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    schemes = [s for s in SCHEME_ORDER if any(row.scheme == s for row in aggregates)]
    for scheme in reversed(schemes):  # most capable architecture drawn first
        rows = sorted((r for r in aggregates if r.scheme == scheme), key=lambda r: r.n)
        ax.errorbar(
            [r.n for r in rows],
            [r.se_mean for r in rows],
            yerr=[r.se_stderr for r in rows],
            marker=_MARKERS[scheme],
            capsize=3,
            label=_LABELS[scheme],
        )
    ax.set_xlabel("number of reconfigurable elements $N$")
    ax.set_ylabel("spectral efficiency (bits/s/Hz)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
