"""Render the two standard figures from sweep tables.

Figure 1: inseparability criterion S against the seeding photon number,
log-x, with the entanglement band below S = 2 shaded gray.  Figure 2: polar
per-mode gain and quadrature variances against the seeding phase, with gray
unit circles marking unity gain and the shot-noise limit.

The renderer does no arithmetic on the data beyond coordinate conversion;
``dump`` structures returned by both functions carry the plotted values
verbatim for the dump-values debug mode.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import Table

DPI = 200
CURVE_COLORS = ("magenta", "green", "red", "blue")
CURVE_MARKERS = ("+", "x", "o", "s")

#: strip the library tag so image bytes carry no environment detail
_PNG_METADATA = {"Software": None}


def _curve_labels(tables):
    labels = []
    scenario_counts = {}
    for t in tables:
        scenario = t.first("scenario") if "scenario" in t.columns else t.stem
        scenario_counts[scenario] = scenario_counts.get(scenario, 0) + 1
    seen = {}
    for t in tables:
        scenario = t.first("scenario") if "scenario" in t.columns else t.stem
        if scenario_counts[scenario] > 1:
            labels.append(f"{scenario} ({t.stem})")
            seen[scenario] = seen.get(scenario, 0) + 1
        else:
            labels.append(scenario)
    return labels


def render_fig1(tables, out_path, band=2.0):
    """S vs seed photon number, one curve per table, gray band below `band`.

    Returns the dump structure: list of dicts with the plotted arrays.
    """
    if not tables:
        raise ValueError("need at least one curve table")
    dumps = []
    labels = _curve_labels(tables)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, (table, label) in enumerate(zip(tables, labels)):
        table.require("n_in", "S")
        x = table.column("n_in")
        y = table.column("S")
        ax.plot(x, y, color=CURVE_COLORS[i % 4], marker=CURVE_MARKERS[i % 4],
                markersize=4, linewidth=1.2, label=label)
        dumps.append({"label": label, "n_in": x, "S": y})
    ax.set_xscale("log")
    ax.axhspan(0.0, band, color="0.85", zorder=0)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel(r"seeding photon number $\bar{N}_{in}$")
    ax.set_ylabel("S")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return dumps


def render_fig2(table: Table, out_path):
    """Polar gain panel and polar variance panel against the seeding phase."""
    table.require("phi", "g1", "g2", "g3",
                  "var_p1", "var_p2", "var_p3",
                  "var_q1", "var_q2", "var_q3")
    phi = table.column("phi")
    dump = {"label": table.stem, "phi": phi}
    fig, (ax_gain, ax_var) = plt.subplots(
        1, 2, figsize=(8.4, 4.2), subplot_kw={"projection": "polar"})

    circle = np.linspace(0.0, 2 * np.pi, 361)
    for ax in (ax_gain, ax_var):
        ax.plot(circle, np.ones_like(circle), color="0.6", linewidth=1.0)
        ax.set_rlabel_position(80)

    for k, style in zip((1, 2, 3), ("-", "--", ":")):
        g = table.column(f"g{k}")
        ax_gain.plot(phi, g, color="black", linestyle=style, linewidth=1.1,
                     label=f"mode {k}")
        dump[f"g{k}"] = g
    ax_gain.set_title("gain")
    ax_gain.legend(fontsize=7, loc="lower left")

    for k, style in zip((1, 2, 3), ("-", "--", ":")):
        vp = table.column(f"var_p{k}")
        vq = table.column(f"var_q{k}")
        ax_var.plot(phi, vp, color="red", linestyle=style, linewidth=1.1)
        ax_var.plot(phi, vq, color="blue", linestyle=style, linewidth=1.1)
        dump[f"var_p{k}"] = vp
        dump[f"var_q{k}"] = vq
    ax_var.set_title("quadrature variances")

    fig.tight_layout()
    fig.savefig(out_path, dpi=DPI, metadata=_PNG_METADATA)
    plt.close(fig)
    return [dump]


def format_dump(dumps):
    """Plotted values, one line per curve and column, full precision."""
    lines = []
    for d in dumps:
        for key, values in d.items():
            if key == "label":
                continue
            rendered = " ".join(format(float(v), ".17g") for v in values)
            lines.append(f"{d['label']}\t{key}\t{rendered}")
    return "\n".join(lines)
