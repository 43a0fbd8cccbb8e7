"""Figure rendering for the report path.

Figures are written to files next to the delimited output; nothing here is
interactive.  matplotlib is imported lazily so the library stays importable
in minimal environments.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .condiv import Division, pieces
from .pipeline import PipelineReport

PIECE_COLORS = ("#4878cf", "#e8a33d", "#6acc65", "#d65f5f", "#956cb4",
                "#8c613c", "#dc7ec0")


def _mpl():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_division(d: Division, n: int, path: str,
                    values: Optional[dict[int, Sequence[Fraction]]] = None) -> str:
    """Draw the labelled pieces of a division as a strip over [0, 1].

    Subinterval boundaries are ticked, cuts are marked, and an optional table
    of per-color piece values is printed beneath the strip.
    """
    plt = _mpl()
    fig, ax = plt.subplots(figsize=(8, 1.8 + 0.25 * (len(values or {}))))
    for t, piece in enumerate(pieces(d), start=1):
        color = PIECE_COLORS[(t - 1) % len(PIECE_COLORS)]
        for lo, hi in piece.intervals:
            ax.axvspan(float(lo), float(hi), ymin=0.35, ymax=0.95,
                       color=color, label=f"piece {t}")
    for c in d.cuts:
        ax.axvline(float(c), color="black", linewidth=1.2, ymin=0.25, ymax=1.0)
    for j in range(n + 1):
        ax.axvline(j / n, color="gray", linewidth=0.4, linestyle=":")
    handles, labels = ax.get_legend_handles_labels()
    seen = dict(zip(labels, handles))
    ax.legend(seen.values(), seen.keys(), loc="upper right", fontsize=7, ncol=len(seen))
    if values:
        rows = [f"v_{i}: " + "  ".join(str(v) for v in vals)
                for i, vals in sorted(values.items())]
        ax.text(0.0, -0.05, "\n".join(rows), transform=ax.transAxes,
                fontsize=7, va="top", family="monospace")
    ax.set_xlim(0, 1)
    ax.set_yticks([])
    ax.set_xlabel("unit interval")
    ax.set_title(f"division into {d.p} pieces, {len(d.cuts)} cuts")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep(reports: Sequence[PipelineReport], path: str) -> str:
    """Two-panel sweep summary: outcome counts per route, and solver effort
    against instance size."""
    plt = _mpl()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

    counts: dict[tuple[str, str], int] = {}
    for rep in reports:
        key = (rep.route, rep.outcome.get("kind", "?"))
        counts[key] = counts.get(key, 0) + 1
    routes = sorted({r for r, _ in counts})
    kinds = sorted({k for _, k in counts})
    width = 0.8 / max(1, len(kinds))
    for ki, kind in enumerate(kinds):
        xs = range(len(routes))
        ys = [counts.get((r, kind), 0) for r in routes]
        ax1.bar([x + ki * width for x in xs], ys, width=width, label=kind)
    ax1.set_xticks([x + 0.4 - width / 2 for x in range(len(routes))])
    ax1.set_xticklabels(routes)
    ax1.set_ylabel("cells")
    ax1.set_title("outcomes by route")
    ax1.legend(fontsize=8)

    for ri, route in enumerate(routes):
        xs, ys = [], []
        for rep in reports:
            if rep.route != route or "examined" not in rep.stats:
                continue
            xs.append(rep.params.get("family", {}).get("n", 0))
            ys.append(max(1, int(rep.stats["examined"])))
        ax2.scatter(xs, ys, s=18, label=route,
                    color=PIECE_COLORS[ri % len(PIECE_COLORS)])
    ax2.set_yscale("log")
    ax2.set_xlabel("ground-set size n")
    ax2.set_ylabel("solver candidates examined")
    ax2.set_title("solver effort")
    ax2.legend(fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
