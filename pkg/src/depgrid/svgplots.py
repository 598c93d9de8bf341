"""Static SVG charts written without a rendering dependency.

Two chart types: a grouped bar chart comparing predicted (light) and observed
(bold) metrics per condition, and scatter plots of failure scenarios.
Successes are green, task failures blue, harmful failures pink.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .domain import DomainSpace
from .errors import ConfigError
from .estimator import BehaviorMode, DependabilityReport, TestCampaign

GREEN = "#2ca02c"
BLUE = "#1f77b4"
PINK = "#e377c2"

_METRICS = (
    ("dependability", GREEN),
    ("task_undependability", BLUE),
    ("harmful_undependability", PINK),
)


def _svg_header(width: int, height: int) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
    )


def _text(x: float, y: float, s: str, size: int = 11, anchor: str = "middle",
          rotate: float | None = None) -> str:
    transform = f' transform="rotate({rotate} {x:.1f} {y:.1f})"' if rotate else ""
    return (
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}"{transform}>'
        f"{escape(s)}</text>\n"
    )


def comparison_bar_svg(
    pairs: Sequence[tuple[str, DependabilityReport, DependabilityReport]],
    *, width: int = 760, height: int = 360,
) -> str:
    """Grouped bars of (label, predicted, observed) report pairs.

    Within each group the three metrics appear side by side; the predicted
    bar (light fill) stands left of the observed bar (bold fill).
    """
    if not pairs:
        raise ConfigError("no report pairs to plot")
    m_left, m_right, m_top, m_bottom = 52, 16, 28, 58
    plot_w = width - m_left - m_right
    plot_h = height - m_top - m_bottom
    parts = [_svg_header(width, height)]
    # y gridlines at 0, 25, 50, 75, 100 percent
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = m_top + plot_h * (1 - frac)
        parts.append(
            f'<line x1="{m_left}" y1="{y:.1f}" x2="{m_left + plot_w}" '
            f'y2="{y:.1f}" stroke="#dddddd" stroke-width="1"/>\n'
        )
        parts.append(_text(m_left - 6, y + 4, f"{frac * 100:.0f}%", anchor="end"))
    group_w = plot_w / len(pairs)
    slot_w = group_w / 3.0
    bar_w = slot_w * 0.38
    for g, (label, predicted, observed) in enumerate(pairs):
        gx = m_left + g * group_w
        for s, (metric, color) in enumerate(_METRICS):
            sx = gx + s * slot_w + slot_w / 2.0
            for k, (report, opacity) in enumerate(
                    ((predicted, 0.45), (observed, 1.0))):
                v = report.metrics()[metric]
                bh = plot_h * v
                bx = sx - bar_w + k * bar_w
                parts.append(
                    f'<rect x="{bx:.1f}" y="{m_top + plot_h - bh:.1f}" '
                    f'width="{bar_w:.1f}" height="{bh:.1f}" fill="{color}" '
                    f'fill-opacity="{opacity}"/>\n'
                )
        parts.append(_text(gx + group_w / 2.0, m_top + plot_h + 16, label, size=12))
    # axis line and legend
    parts.append(
        f'<line x1="{m_left}" y1="{m_top + plot_h}" x2="{m_left + plot_w}" '
        f'y2="{m_top + plot_h}" stroke="black" stroke-width="1"/>\n'
    )
    lx = m_left
    ly = height - 26
    legend = [
        ("dependability", GREEN), ("task undependability", BLUE),
        ("harmful undependability", PINK),
    ]
    for name, color in legend:
        parts.append(
            f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{color}"/>\n'
        )
        parts.append(_text(lx + 14, ly, name, anchor="start"))
        lx += 14 + 7 * len(name) + 18
    parts.append(_text(lx, ly, "light = predicted, bold = observed",
                       anchor="start"))
    parts.append("</svg>\n")
    return "".join(parts)


def failure_scatter_svg(
    campaign: TestCampaign, space: DomainSpace, dims: Sequence[str],
    *, panel: int = 300, margin: int = 56,
) -> str:
    """Scatter of failure scenarios projected onto the named dimensions.

    Two names give one panel; three give the three pairwise projections side
    by side. Successful scenarios are omitted.
    """
    if len(dims) not in (2, 3):
        raise ConfigError(f"need two or three dimension names, got {len(dims)}")
    axes = [space.index_of(name) for name in dims]
    if len(dims) == 2:
        panels = [(axes[0], axes[1])]
    else:
        panels = [(axes[0], axes[1]), (axes[0], axes[2]), (axes[1], axes[2])]
    width = margin + len(panels) * (panel + margin)
    height = panel + 2 * margin
    parts = [_svg_header(width, height)]
    for p, (dx, dy) in enumerate(panels):
        ox = margin + p * (panel + margin)
        oy = margin
        xdim, ydim = space.dims[dx], space.dims[dy]
        parts.append(
            f'<rect x="{ox}" y="{oy}" width="{panel}" height="{panel}" '
            f'fill="none" stroke="black" stroke-width="1"/>\n'
        )
        for r in campaign.records:
            if r.mode is BehaviorMode.SUCCESS:
                continue
            color = BLUE if r.mode is BehaviorMode.TASK_FAILURE else PINK
            vx = (r.scenario.values[dx] - xdim.min) / xdim.width
            vy = (r.scenario.values[dy] - ydim.min) / ydim.width
            cx = ox + vx * panel
            cy = oy + (1 - vy) * panel
            parts.append(
                f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2" fill="{color}" '
                f'fill-opacity="0.6"/>\n'
            )
        parts.append(_text(ox + panel / 2.0, oy + panel + 30, xdim.label, size=12))
        parts.append(_text(ox - 34, oy + panel / 2.0, ydim.label, size=12,
                           rotate=-90.0))
        for frac in (0.0, 1.0):
            parts.append(_text(ox + frac * panel, oy + panel + 14,
                               f"{xdim.min + frac * xdim.width:g}", size=10))
            parts.append(_text(ox - 8, oy + (1 - frac) * panel + 4,
                               f"{ydim.min + frac * ydim.width:g}", size=10,
                               anchor="end"))
    parts.append(_text(width / 2.0, 18,
                       "failures: task (blue), harmful (pink)", size=12))
    parts.append("</svg>\n")
    return "".join(parts)
