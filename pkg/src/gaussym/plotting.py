"""Deterministic SVG rendering of CSV curve tables.

The SVG backend is configured so that identical input produces identical
bytes: fixed hash salt for element ids, text kept as text rather than glyph
paths, and no creation date in the metadata.
"""
from __future__ import annotations

from enum import Enum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import FormatError  # noqa: E402
from .io import read_csv  # noqa: E402

__all__ = ["PlotStyle", "emit_plot", "RC"]


class PlotStyle(str, Enum):
    LINES = "lines"  # every column a line against the first
    OVERLAY = "overlay"  # X as markers, X_qpp as a line in the same colour
    ERRORBAR = "errorbar"  # 'mean' with 'std_error' bars, remaining columns as lines


RC = {
    "svg.hashsalt": "gaussym",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.4,
    "lines.markersize": 3.5,
    "figure.figsize": (5.0, 3.6),
    "axes.spines.top": False,
    "axes.spines.right": False,
}

QPP_SUFFIX = "_qpp"


def _draw_lines(ax, header, data):
    for j in range(1, len(header)):
        ax.plot(data[:, 0], data[:, j], label=header[j])


def _draw_overlay(ax, header, data):
    cols = {name: j for j, name in enumerate(header)}
    done = set()
    series = 0
    for j in range(1, len(header)):
        name = header[j]
        if j in done:
            continue
        base = name[: -len(QPP_SUFFIX)] if name.endswith(QPP_SUFFIX) else name
        colour = f"C{series % 10}"
        series += 1
        if base in cols and base + QPP_SUFFIX in cols:
            e, q = cols[base], cols[base + QPP_SUFFIX]
            ax.plot(data[:, 0], data[:, e], "o", color=colour, label=header[e], mfc="none")
            ax.plot(data[:, 0], data[:, q], "-", color=colour, label=header[q])
            done.update((e, q))
        else:
            ax.plot(data[:, 0], data[:, j], "-", color=colour, label=name)
            done.add(j)


def _draw_errorbar(ax, header, data):
    if "mean" not in header or "std_error" not in header:
        raise FormatError("errorbar style needs 'mean' and 'std_error' columns")
    m, s = header.index("mean"), header.index("std_error")
    ax.errorbar(data[:, 0], data[:, m], yerr=data[:, s], fmt="o", capsize=2, label="mean")
    for j in range(1, len(header)):
        if j not in (m, s):
            ax.plot(data[:, 0], data[:, j], "--", label=header[j])


_DRAW = {PlotStyle.LINES: _draw_lines, PlotStyle.OVERLAY: _draw_overlay,
         PlotStyle.ERRORBAR: _draw_errorbar}


def emit_plot(csv_path, style=PlotStyle.LINES, out=None, title=None, ylabel=None):
    """Render ``csv_path`` to an SVG next to it (or at ``out``).

    The first column is the horizontal axis; its header is the axis label.

    Raises
    ------
    FormatError
        For empty files, files without data rows or with a single column.
    """
    header, data = read_csv(csv_path)
    if len(header) < 2:
        raise FormatError(f"{csv_path}: need at least two columns to plot")
    style = PlotStyle(style)
    out = Path(out) if out is not None else Path(csv_path).with_suffix(".svg")
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        _DRAW[style](ax, header, data)
        ax.set_xlabel(header[0])
        if ylabel is not None:
            ax.set_ylabel(ylabel)
        elif len(header) == 2:
            ax.set_ylabel(header[1])
        if title:
            ax.set_title(title)
        if len(header) > 2:
            ax.legend()
        fig.tight_layout()
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out
