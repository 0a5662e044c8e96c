"""Deterministic SVG rendering for chart specs.

The output is plain SVG 1.1 with no timestamps, random ids, or
environment-dependent content, so identical spec + size always yields
identical bytes. Every encoded data point is emitted exactly once as an
element with ``class="data-point"``. Required elements that are still
unset render as a visible warning so incomplete charts are obvious.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

from .charts import BAR, LINE, MAP, PIE, ChartSpec, check_completeness, pie_angles
from .errors import CardpipeError

MARGIN_LEFT = 60.0
MARGIN_RIGHT = 20.0
MARGIN_TOP = 44.0
MARGIN_BOTTOM = 56.0

AXIS_COLOR = "#374151"
SERIES_COLOR = "#2d7ff9"
WARN_COLOR = "#b91c1c"
TILE_LOW = (219, 234, 254)
TILE_HIGH = (30, 64, 175)

PIE_COLORS = ("#2d7ff9", "#ef4444", "#f59e0b", "#2e9e4f", "#8b5cf6", "#6b7280", "#0ea5e9", "#d946ef")


class RenderError(CardpipeError):
    code = "RENDER"


def _n(value: float) -> str:
    """Fixed-precision coordinate text with trailing zeros trimmed."""
    text = f"{value:.2f}"
    return text.rstrip("0").rstrip(".") if "." in text else text


def _tick_label(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return f"{value:g}"


def _scale(values: list[float]) -> tuple[float, float]:
    """Padded linear axis range: 5% beyond the data on both sides."""
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) * 0.05 or 1.0
    else:
        pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, values: list[float], count: int = 5) -> list[float]:
    all_int = all(float(v).is_integer() for v in values)
    if all_int:
        step = max(1, round((hi - lo) / count))
        start = math.ceil(lo)
        ticks = []
        v = start
        while v <= hi and len(ticks) < count + 2:
            ticks.append(float(v))
            v += step
        if ticks:
            return ticks
    return [lo + (hi - lo) * i / count for i in range(count + 1)]


class _Doc:
    def __init__(self, width: float, height: float):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_n(width)}" '
            f'height="{_n(height)}" viewBox="0 0 {_n(width)} {_n(height)}">\n'
        ]

    def tag(self, name: str, text: str | None = None, **attrs):
        # class_ -> class, text_anchor -> text-anchor
        rendered = " ".join(
            f"{k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items()
        )
        if text is None:
            self.parts.append(f"<{name} {rendered}/>\n")
        else:
            self.parts.append(f"<{name} {rendered}>{escape(text)}</{name}>\n")

    def finish(self) -> str:
        self.parts.append("</svg>\n")
        return "".join(self.parts)


def _chrome(doc: _Doc, spec: ChartSpec, width: float, height: float):
    """Title, axis labels, legend, and the missing-element warning."""
    if spec.title:
        doc.tag(
            "text", spec.title, x=_n(width / 2), y="20", text_anchor="middle",
            font_family="sans-serif", font_size="16", fill=AXIS_COLOR, class_="chart-title",
        )
    if spec.x_label:
        doc.tag(
            "text", spec.x_label, x=_n(width / 2), y=_n(height - 26), text_anchor="middle",
            font_family="sans-serif", font_size="12", fill=AXIS_COLOR, class_="x-label",
        )
    if spec.y_label:
        cx, cy = 16.0, height / 2
        doc.tag(
            "text", spec.y_label, x=_n(cx), y=_n(cy), text_anchor="middle",
            font_family="sans-serif", font_size="12", fill=AXIS_COLOR, class_="y-label",
            transform=f"rotate(-90 {_n(cx)} {_n(cy)})",
        )
    if spec.legend:
        for i, entry in enumerate(spec.legend):
            y = 16 + 14 * i
            color = PIE_COLORS[i % len(PIE_COLORS)] if spec.kind in (PIE, MAP) else SERIES_COLOR
            doc.tag("rect", x=_n(width - MARGIN_RIGHT - 110), y=_n(y - 9), width="10",
                    height="10", fill=color, class_="legend-swatch")
            doc.tag(
                "text", entry, x=_n(width - MARGIN_RIGHT - 96), y=_n(y),
                font_family="sans-serif", font_size="11", fill=AXIS_COLOR, class_="legend-entry",
            )
    report = check_completeness(spec)
    if not report.complete:
        doc.tag(
            "text", "⚠ missing: " + ", ".join(report.missing),
            x=_n(MARGIN_LEFT), y=_n(height - 8), font_family="sans-serif", font_size="12",
            fill=WARN_COLOR, class_="missing-annotation",
        )


def _axes(doc: _Doc, width: float, height: float):
    x0, y0 = MARGIN_LEFT, height - MARGIN_BOTTOM
    doc.tag("line", x1=_n(x0), y1=_n(MARGIN_TOP), x2=_n(x0), y2=_n(y0),
            stroke=AXIS_COLOR, stroke_width="1", class_="axis")
    doc.tag("line", x1=_n(x0), y1=_n(y0), x2=_n(width - MARGIN_RIGHT), y2=_n(y0),
            stroke=AXIS_COLOR, stroke_width="1", class_="axis")


def _plot_area(width: float, height: float) -> tuple[float, float, float, float]:
    return (
        MARGIN_LEFT,
        MARGIN_TOP,
        width - MARGIN_LEFT - MARGIN_RIGHT,
        height - MARGIN_TOP - MARGIN_BOTTOM,
    )


def _render_line(doc: _Doc, spec: ChartSpec, width: float, height: float):
    xs_raw, ys = spec.data["x"], spec.data["y"]
    px, py, pw, ph = _plot_area(width, height)
    _axes(doc, width, height)
    if not xs_raw:
        return
    numeric_x = all(isinstance(v, (int, float)) for v in xs_raw)
    if numeric_x:
        xlo, xhi = _scale([float(v) for v in xs_raw])
        xpos = [px + pw * ((float(v) - xlo) / (xhi - xlo)) for v in xs_raw]
        for tick in _ticks(xlo, xhi, [float(v) for v in xs_raw]):
            tx = px + pw * ((tick - xlo) / (xhi - xlo))
            doc.tag("line", x1=_n(tx), y1=_n(py + ph), x2=_n(tx), y2=_n(py + ph + 4),
                    stroke=AXIS_COLOR, stroke_width="1", class_="tick")
            doc.tag("text", _tick_label(tick), x=_n(tx), y=_n(py + ph + 16),
                    text_anchor="middle", font_family="sans-serif", font_size="10",
                    fill=AXIS_COLOR, class_="tick-label")
    else:
        step = pw / max(len(xs_raw), 1)
        xpos = [px + step * (i + 0.5) for i in range(len(xs_raw))]
        for i, v in enumerate(xs_raw):
            doc.tag("text", str(v), x=_n(xpos[i]), y=_n(py + ph + 16), text_anchor="middle",
                    font_family="sans-serif", font_size="10", fill=AXIS_COLOR, class_="tick-label")
    ylo, yhi = _scale([float(v) for v in ys])
    ypos = [py + ph * (1.0 - (float(v) - ylo) / (yhi - ylo)) for v in ys]
    for tick in _ticks(ylo, yhi, [float(v) for v in ys]):
        ty = py + ph * (1.0 - (tick - ylo) / (yhi - ylo))
        doc.tag("line", x1=_n(px - 4), y1=_n(ty), x2=_n(px), y2=_n(ty),
                stroke=AXIS_COLOR, stroke_width="1", class_="tick")
        doc.tag("text", _tick_label(tick), x=_n(px - 8), y=_n(ty + 3), text_anchor="end",
                font_family="sans-serif", font_size="10", fill=AXIS_COLOR, class_="tick-label")
    points = " ".join(f"{_n(x)},{_n(y)}" for x, y in zip(xpos, ypos))
    if len(xs_raw) > 1:
        doc.tag("polyline", points=points, fill="none", stroke=SERIES_COLOR,
                stroke_width="2", class_="series")
    for x, y in zip(xpos, ypos):
        doc.tag("circle", cx=_n(x), cy=_n(y), r="3", fill=SERIES_COLOR, class_="data-point")


def _render_bar(doc: _Doc, spec: ChartSpec, width: float, height: float):
    xs_raw, ys = spec.data["x"], spec.data["y"]
    px, py, pw, ph = _plot_area(width, height)
    _axes(doc, width, height)
    if not xs_raw:
        return
    values = [float(v) for v in ys]
    lo = min(0.0, min(values))
    hi = max(0.0, max(values))
    if lo == hi:
        hi = lo + 1.0
    span = hi - lo
    for tick in _ticks(lo, hi, values):
        ty = py + ph * (1.0 - (tick - lo) / span)
        doc.tag("line", x1=_n(px - 4), y1=_n(ty), x2=_n(px), y2=_n(ty),
                stroke=AXIS_COLOR, stroke_width="1", class_="tick")
        doc.tag("text", _tick_label(tick), x=_n(px - 8), y=_n(ty + 3), text_anchor="end",
                font_family="sans-serif", font_size="10", fill=AXIS_COLOR, class_="tick-label")
    slot = pw / len(xs_raw)
    bar_w = slot * 0.7
    zero_y = py + ph * (1.0 - (0.0 - lo) / span)
    for i, (label, value) in enumerate(zip(xs_raw, values)):
        x = px + slot * i + (slot - bar_w) / 2
        vy = py + ph * (1.0 - (value - lo) / span)
        top = min(vy, zero_y)
        doc.tag("rect", x=_n(x), y=_n(top), width=_n(bar_w), height=_n(abs(zero_y - vy)),
                fill=SERIES_COLOR, class_="data-point")
        doc.tag("text", str(label), x=_n(x + bar_w / 2), y=_n(py + ph + 16),
                text_anchor="middle", font_family="sans-serif", font_size="10",
                fill=AXIS_COLOR, class_="tick-label")


def _render_pie(doc: _Doc, spec: ChartSpec, width: float, height: float):
    categories = spec.data["categories"]
    values = [float(v) for v in spec.data["values"]]
    angles = pie_angles(values)
    px, py, pw, ph = _plot_area(width, height)
    cx, cy = px + pw / 2, py + ph / 2
    radius = min(pw, ph) / 2 * 0.9
    start = -90.0  # noon
    for i, (label, sweep) in enumerate(zip(categories, angles)):
        color = PIE_COLORS[i % len(PIE_COLORS)]
        if sweep >= 360.0 - 1e-9:
            doc.tag("circle", cx=_n(cx), cy=_n(cy), r=_n(radius), fill=color,
                    stroke="#ffffff", stroke_width="1", class_="data-point",
                    data_label=str(label))
            start += sweep
            continue
        a0 = math.radians(start)
        a1 = math.radians(start + sweep)
        x0, y0 = cx + radius * math.cos(a0), cy + radius * math.sin(a0)
        x1, y1 = cx + radius * math.cos(a1), cy + radius * math.sin(a1)
        large = 1 if sweep > 180.0 else 0
        d = (
            f"M {_n(cx)} {_n(cy)} L {_n(x0)} {_n(y0)} "
            f"A {_n(radius)} {_n(radius)} 0 {large} 1 {_n(x1)} {_n(y1)} Z"
        )
        doc.tag("path", d=d, fill=color, stroke="#ffffff", stroke_width="1",
                class_="data-point", data_label=str(label))
        start += sweep


def _tile_fill(value: float, lo: float, hi: float) -> str:
    frac = 0.5 if hi == lo else (value - lo) / (hi - lo)
    rgb = tuple(round(a + (b - a) * frac) for a, b in zip(TILE_LOW, TILE_HIGH))
    return f"#{rgb[0]:02x}{rgb[1]:02x}{rgb[2]:02x}"


def _render_map(doc: _Doc, spec: ChartSpec, width: float, height: float):
    """Tile map: one labeled square per region, shaded by value."""
    regions = spec.data["regions"]
    values = [float(v) for v in spec.data["values"]]
    px, py, pw, ph = _plot_area(width, height)
    order = sorted(range(len(regions)), key=lambda i: (regions[i], i))
    cols = max(1, math.ceil(math.sqrt(len(regions)))) if regions else 1
    rows = max(1, math.ceil(len(regions) / cols))
    tile_w, tile_h = pw / cols, ph / rows
    lo = min(values) if values else 0.0
    hi = max(values) if values else 0.0
    for slot, i in enumerate(order):
        r, c = divmod(slot, cols)
        x, y = px + c * tile_w, py + r * tile_h
        doc.tag("rect", x=_n(x + 2), y=_n(y + 2), width=_n(tile_w - 4), height=_n(tile_h - 4),
                fill=_tile_fill(values[i], lo, hi), stroke=AXIS_COLOR, stroke_width="1",
                class_="data-point", data_region=regions[i])
        doc.tag("text", f"{regions[i]} {_tick_label(values[i])}", x=_n(x + tile_w / 2),
                y=_n(y + tile_h / 2 + 4), text_anchor="middle", font_family="sans-serif",
                font_size="11", fill=AXIS_COLOR, class_="tile-label")


def _render_table(doc: _Doc, spec: ChartSpec, width: float, height: float):
    table = spec.data["table"]
    columns = table["columns"]
    n_rows = table["row_count"]
    px, py, pw, ph = _plot_area(width, height)
    n_cols = max(len(columns), 1)
    col_w = pw / n_cols
    row_h = min(22.0, ph / (n_rows + 1)) if n_rows else 22.0
    for j, col in enumerate(columns):
        doc.tag("text", col["name"], x=_n(px + col_w * j + 4), y=_n(py + row_h - 6),
                font_family="sans-serif", font_size="12", font_weight="bold",
                fill=AXIS_COLOR, class_="header-cell")
    doc.tag("line", x1=_n(px), y1=_n(py + row_h), x2=_n(px + pw), y2=_n(py + row_h),
            stroke=AXIS_COLOR, stroke_width="1", class_="rule")
    for i in range(n_rows):
        for j, col in enumerate(columns):
            cell = col["cells"][i]
            text = "" if cell is None else str(cell)
            doc.tag("text", text, x=_n(px + col_w * j + 4), y=_n(py + row_h * (i + 2) - 6),
                    font_family="sans-serif", font_size="11", fill=AXIS_COLOR,
                    class_="data-point")


def render_svg(spec: ChartSpec, *, width: int = 640, height: int = 400) -> str:
    """Render a chart spec to an SVG document (identical input, identical bytes)."""
    if width <= 0 or height <= 0:
        raise RenderError(f"size must be positive, got {width}x{height}", code="ZERO_SIZE")
    doc = _Doc(float(width), float(height))
    doc.tag("rect", x="0", y="0", width=_n(float(width)), height=_n(float(height)),
            fill="#ffffff", class_="background")
    if spec.kind == LINE:
        _render_line(doc, spec, width, height)
    elif spec.kind == BAR:
        _render_bar(doc, spec, width, height)
    elif spec.kind == PIE:
        _render_pie(doc, spec, width, height)
    elif spec.kind == MAP:
        _render_map(doc, spec, width, height)
    else:
        _render_table(doc, spec, width, height)
    _chrome(doc, spec, float(width), float(height))
    return doc.finish()
