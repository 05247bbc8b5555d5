"""Line plots written as SVG documents with lxml.

Plots are advisory; the CSV tables next to them are canonical.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Mapping, Sequence

from lxml import etree

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 70, "right": 150, "top": 40, "bottom": 55}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _element(parent, tag: str, text: str | None = None, **attributes) -> etree._Element:
    node = etree.SubElement(parent, f"{{{SVG_NS}}}{tag}", {k.replace("_", "-"): str(v) for k, v in attributes.items()})
    if text is not None:
        node.text = text
    return node


def _transform(values: Sequence[float], log: bool) -> list[float | None]:
    if not log:
        return [float(v) if math.isfinite(v) else None for v in values]
    return [math.log10(v) if v > 0 and math.isfinite(v) else None for v in values]


def _ticks(lo: float, hi: float, log: bool) -> list[tuple[float, str]]:
    if log:
        first, last = math.floor(lo), math.ceil(hi)
        step = max(1, (last - first) // 6)
        return [(float(e), f"1e{e}") for e in range(first, last + 1, step) if lo <= e <= hi]
    if hi == lo:
        return [(lo, f"{lo:.3g}")]
    return [(lo + (hi - lo) * i / 5, f"{lo + (hi - lo) * i / 5:.3g}") for i in range(6)]


def line_plot(
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    path: Path,
    title: str,
    x_label: str,
    y_label: str,
    log_x: bool = True,
    log_y: bool = True,
) -> Path:
    """Write one SVG with a polyline per series; non-positive values are dropped on log axes."""

    cleaned: dict[str, list[tuple[float, float]]] = {}
    for name, (xs, ys) in series.items():
        points = [
            (x, y)
            for x, y in zip(_transform(xs, log_x), _transform(ys, log_y))
            if x is not None and y is not None
        ]
        if points:
            cleaned[name] = points

    root = etree.Element(f"{{{SVG_NS}}}svg", nsmap={None: SVG_NS},
                         width=str(WIDTH), height=str(HEIGHT), viewBox=f"0 0 {WIDTH} {HEIGHT}")
    _element(root, "rect", x=0, y=0, width=WIDTH, height=HEIGHT, fill="white")
    _element(root, "text", title, x=WIDTH / 2, y=22, text_anchor="middle", font_size=15, font_family="sans-serif")

    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]
    _element(root, "rect", x=left, y=top, width=right - left, height=bottom - top, fill="none", stroke="black")
    _element(root, "text", x_label, x=(left + right) / 2, y=HEIGHT - 12, text_anchor="middle", font_size=12, font_family="sans-serif")
    _element(root, "text", y_label, x=16, y=(top + bottom) / 2, text_anchor="middle", font_size=12,
             font_family="sans-serif", transform=f"rotate(-90 16 {(top + bottom) / 2})")

    if not cleaned:
        _element(root, "text", "no data", x=(left + right) / 2, y=(top + bottom) / 2, text_anchor="middle", font_size=13)
    else:
        xs = [x for points in cleaned.values() for x, _ in points]
        ys = [y for points in cleaned.values() for _, y in points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 1, x_hi + 1
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 1, y_hi + 1

        def px(x: float) -> float:
            return left + (x - x_lo) / (x_hi - x_lo) * (right - left)

        def py(y: float) -> float:
            return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top)

        for value, label in _ticks(x_lo, x_hi, log_x):
            _element(root, "line", x1=px(value), y1=bottom, x2=px(value), y2=bottom + 5, stroke="black")
            _element(root, "text", label, x=px(value), y=bottom + 18, text_anchor="middle", font_size=10, font_family="sans-serif")
        for value, label in _ticks(y_lo, y_hi, log_y):
            _element(root, "line", x1=left - 5, y1=py(value), x2=left, y2=py(value), stroke="black")
            _element(root, "text", label, x=left - 8, y=py(value) + 3, text_anchor="end", font_size=10, font_family="sans-serif")

        for position, (name, points) in enumerate(cleaned.items()):
            color = COLORS[position % len(COLORS)]
            coordinates = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in points)
            _element(root, "polyline", points=coordinates, fill="none", stroke=color, stroke_width=1.5)
            legend_y = top + 14 * (position + 1)
            _element(root, "line", x1=right + 10, y1=legend_y - 4, x2=right + 28, y2=legend_y - 4, stroke=color, stroke_width=2)
            _element(root, "text", name, x=right + 32, y=legend_y, font_size=10, font_family="sans-serif")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="utf-8"))
    logger.debug(f"Wrote plot {path}")
    return path
