"""Static SVG charts of performance curves.

One chart per (metric, task), stacked vertically in a single document.
Each strategy is a polyline of its run-averaged curve; dashed horizontal
lines mark the mean M_pre and M_post. Output is a pure function of the
input rows, so it can be byte-compared.
"""

from __future__ import annotations

from collections import defaultdict
from xml.sax.saxutils import escape

from .io import CurveRow

WIDTH = 640
HEIGHT = 360
MARGIN_LEFT = 60
MARGIN_RIGHT = 150
MARGIN_TOP = 36
MARGIN_BOTTOM = 44

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
)


def _f(x: float) -> str:
    return f"{x:.2f}"


def _chart(metric: str, task: str, rows: list[CurveRow], top: float) -> list[str]:
    by_strategy: dict[str, dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    pre: dict[tuple[str, int], float] = {}
    post: dict[tuple[str, int], float] = {}
    for r in rows:
        by_strategy[r.strategy][r.b].append(r.value)
        pre[r.strategy, r.run] = r.m_pre
        post[r.strategy, r.run] = r.m_post
    m_pre = sum(pre.values()) / len(pre) if pre else None
    m_post = sum(post.values()) / len(post) if post else None

    series = {
        s: [(b, sum(v) / len(v)) for b, v in sorted(points.items())]
        for s, points in sorted(by_strategy.items())
    }
    ys = [y for pts in series.values() for _, y in pts]
    ys += [y for y in (m_pre, m_post) if y is not None]
    lo, hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.05, hi + 0.05
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    x0, y0 = MARGIN_LEFT, top + MARGIN_TOP

    def px(b):
        return x0 + b * plot_w

    def py(v):
        return y0 + (hi - v) / (hi - lo) * plot_h

    out = [f'<g class="chart" data-metric="{escape(metric)}" data-task="{escape(task)}">']
    title = f"{metric.upper()} vs budget fraction" + (f" ({task})" if task else "")
    out.append(
        f'<text x="{_f(x0)}" y="{_f(top + 22)}" font-size="14">{escape(title)}</text>'
    )
    # axes
    out.append(
        f'<line x1="{_f(x0)}" y1="{_f(y0 + plot_h)}" x2="{_f(x0 + plot_w)}" '
        f'y2="{_f(y0 + plot_h)}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x0)}" y2="{_f(y0 + plot_h)}" stroke="black"/>'
    )
    for i in range(5):
        b = i / 4
        out.append(
            f'<text x="{_f(px(b))}" y="{_f(y0 + plot_h + 16)}" font-size="10" '
            f'text-anchor="middle">{b:.2f}</text>'
        )
        v = lo + (hi - lo) * i / 4
        out.append(
            f'<text x="{_f(x0 - 6)}" y="{_f(py(v) + 3)}" font-size="10" '
            f'text-anchor="end">{v:.3f}</text>'
        )
    out.append(
        f'<text x="{_f(x0 + plot_w / 2)}" y="{_f(y0 + plot_h + 34)}" font-size="11" '
        f'text-anchor="middle">budget fraction</text>'
    )
    for label, value in (("M_pre", m_pre), ("M_post", m_post)):
        if value is None:
            continue
        out.append(
            f'<line class="anchor" x1="{_f(x0)}" y1="{_f(py(value))}" x2="{_f(x0 + plot_w)}" '
            f'y2="{_f(py(value))}" stroke="gray" stroke-dasharray="4 3"/>'
        )
        out.append(
            f'<text x="{_f(x0 + plot_w + 4)}" y="{_f(py(value) + 3)}" font-size="9" '
            f'fill="gray">{label}</text>'
        )
    for j, (strategy, pts) in enumerate(series.items()):
        color = PALETTE[j % len(PALETTE)]
        coords = " ".join(f"{_f(px(b))},{_f(py(v))}" for b, v in pts)
        out.append(
            f'<polyline class="curve" data-strategy="{escape(strategy)}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = y0 + 14 * j
        out.append(
            f'<text x="{_f(x0 + plot_w + 46)}" y="{_f(ly + 4)}" font-size="10" '
            f'fill="{color}">{escape(strategy)}</text>'
        )
    out.append("</g>")
    return out


def render_svg(rows: list[CurveRow]) -> str:
    """SVG document for the given curve rows (may be empty)."""
    groups: dict[tuple[str, str], list[CurveRow]] = defaultdict(list)
    for r in rows:
        groups[r.metric, r.task].append(r)
    keys = sorted(groups) or [("", "")]
    total_h = HEIGHT * len(keys)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{total_h}" '
        f'viewBox="0 0 {WIDTH} {total_h}">',
        f'<rect width="{WIDTH}" height="{total_h}" fill="white"/>',
    ]
    for i, (metric, task) in enumerate(keys):
        out.extend(_chart(metric, task, groups.get((metric, task), []), HEIGHT * i))
    out.append("</svg>")
    return "\n".join(out) + "\n"
