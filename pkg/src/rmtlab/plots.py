"""Static SVG figures for experiment outputs.

Every renderer is a pure function of the data arrays handed to it:
rendering the same CSV twice produces byte-identical SVG.  That requires
pinning the hash salt matplotlib uses for element ids and stripping the
date from the metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "svg.hashsalt": "rmtlab",
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "path.simplify": False,
}
_META = {"Date": None}


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def histogram_overlay(path, values, bins, lo, hi, overlay_x=None, overlay_y=None,
                      overlay_label="", title="", xlabel="", ylabel="density"):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.hist(np.asarray(values), bins=bins, range=(lo, hi), density=True,
                color="#7aa6c2", edgecolor="#3d6e8f", linewidth=0.4, label="empirical")
        if overlay_x is not None:
            ax.plot(overlay_x, overlay_y, color="#b3342f", linewidth=1.6,
                    label=overlay_label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="best")
        _save(fig, path)


def curve_overlay(path, x, series, title="", xlabel="", ylabel="", logy=False,
                  logx=False):
    """series: list of (label, y, style) with style in {'line', 'marker'}."""
    palette = ["#1f5c99", "#b3342f", "#3f7d3a", "#7b5aa6", "#8a6d1a"]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for i, (label, y, style) in enumerate(series):
            color = palette[i % len(palette)]
            if style == "marker":
                ax.plot(x, y, "o", markersize=3.5, color=color, label=label)
            else:
                ax.plot(x, y, "-", linewidth=1.5, color=color, label=label)
        if logy:
            ax.set_yscale("log")
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="best")
        _save(fig, path)


def errorbar_overlay(path, x, y, yerr, ref_x, ref_y, label="Monte Carlo",
                     ref_label="sine-process CDF", title="", xlabel="s",
                     ylabel="CDF"):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.errorbar(x, y, yerr=yerr, fmt="o", markersize=3.5, capsize=2.5,
                    color="#1f5c99", label=label)
        ax.plot(ref_x, ref_y, color="#b3342f", linewidth=1.6, label=ref_label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.legend(loc="best")
        _save(fig, path)


def matrix_heatmap(path, entries, title=""):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 4.6))
        im = ax.imshow(np.abs(entries), cmap="viridis", interpolation="nearest")
        fig.colorbar(im, ax=ax, label="|entry|")
        ax.set_title(title)
        ax.set_xlabel("column")
        ax.set_ylabel("row")
        _save(fig, path)
