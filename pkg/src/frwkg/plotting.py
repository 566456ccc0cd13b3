"""Deterministic vector figures of CSV time series."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import UnknownColumn  # noqa: E402
from .io import read_csv  # noqa: E402

CANVAS = (960, 600)  # SVG user units (points)
_RC = {
    "svg.hashsalt": "frwkg",
    "svg.fonttype": "path",
    "font.size": 11,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


def render_plot(csv_path, columns, out_path, *, x="tau", logx=False, logy=False, title=None):
    """Plot ``columns`` of a series CSV against ``x`` into an SVG file.

    One line per requested column, legend in request order. Each line is an
    SVG group with id ``series-<column>``. Output bytes depend only on the
    inputs.
    """
    header, cols = read_csv(csv_path)
    columns = list(columns)
    for name in [x] + columns:
        if name not in cols:
            raise UnknownColumn(f"column {name!r} not in {Path(csv_path).name}; "
                                f"available: {', '.join(header)}")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(CANVAS[0] / 72, CANVAS[1] / 72), dpi=72)
        for name in columns:
            ax.plot(cols[x], cols[name], label=name, gid=f"series-{name}")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(columns[0] if len(columns) == 1 else "value")
        if title:
            ax.set_title(title)
        if len(columns) > 1:
            ax.legend(loc="best")
        fig.tight_layout()
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out_path
