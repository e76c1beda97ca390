"""SVG charts of a run's weekly series.

Figures are 800x400 (SVG user units) with y ticks at min/0/max. Output is
byte-stable: a fixed hash salt replaces matplotlib's random element ids and
the date/creator metadata are dropped.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402
from matplotlib.ticker import FuncFormatter, MaxNLocator  # noqa: E402

from .model import SimResult  # noqa: E402

WIDTH, HEIGHT = 800, 400
_PT_PER_INCH = 72

_RC = {
    "svg.hashsalt": "service-economy",
    "svg.fonttype": "none",
    "font.size": 11,
    "axes.spines.top": False,
    "axes.spines.right": False,
}

# (file stem, attribute, kind, y label)
FIGURES = [
    ("fig1_weekly_sales", "sales", "bar", "weekly sales"),
    ("fig2_government_account", "gov_balance", "line", "government account"),
    ("fig3_commercial_bank_account", "cb_balance", "line", "commercial bank account"),
    ("fig4_compliance", "compliance", "line", "compliance"),
    ("fig5_weekly_loans", "loans", "bar", "weekly loans"),
]


def _ticks(values: Sequence[float]) -> list[float]:
    return sorted({float(min(values)), 0.0, float(max(values))})


def render_chart_svg(series: Sequence[float], kind: str, x_label: str, y_label: str) -> str:
    """Bar or line chart of ``series`` against week number 1..len(series)."""
    if len(series) == 0:
        raise ValueError("cannot chart an empty series")
    if kind not in ("bar", "line"):
        raise ValueError(f"kind must be 'bar' or 'line', got {kind!r}")
    weeks = range(1, len(series) + 1)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(WIDTH / _PT_PER_INCH, HEIGHT / _PT_PER_INCH))
        fig.subplots_adjust(left=0.12, right=0.97, bottom=0.13, top=0.95)
        try:
            if kind == "bar":
                half = 0.4
                boxes = [[(x - half, 0), (x - half, y), (x + half, y), (x + half, 0)] for x, y in zip(weeks, series)]
                ax.add_collection(PolyCollection(boxes, facecolors="#3b6ea8", edgecolors="none"))
                lo, hi = min(0.0, min(series)), max(0.0, max(series))
                pad = 0.05 * (hi - lo) or 1.0
                ax.set_ylim(lo - (pad if lo < 0 else 0), hi + pad)
            else:
                ax.plot(weeks, series, color="#3b6ea8", linewidth=1.5)
            ax.axhline(0.0, color="0.4", linewidth=0.8)
            ax.set_yticks(_ticks(series))
            ax.yaxis.set_major_formatter(FuncFormatter(lambda v, _: f"{v:g}"))
            ax.set_xlim(0, len(series) + 1)
            ax.xaxis.set_major_locator(MaxNLocator(integer=True))
            ax.set_xlabel(x_label)
            ax.set_ylabel(y_label)
            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        finally:
            plt.close(fig)
    return buf.getvalue()


def write_figures(result: SimResult, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    for stem, attr, kind, ylabel in FIGURES:
        path = out_dir / f"{stem}.svg"
        path.write_text(render_chart_svg(result.series(attr), kind, "week", ylabel), encoding="utf-8")
        paths.append(path)
    return paths
