"""Embed per-site series into map space as small glyphs.

Each site anchors a box of `width` x `height` map units at its major
coordinates; the minor (series) values are rescaled into that box,
either linearly or around the box center in polar mode. Output is plain
geometry; styling belongs to the consumer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from .core import TemporalTable
from .table import MISSING, Column, CubbleError, Kind, Table, is_missing


@dataclass(frozen=True)
class GlyphSpec:
    """Column bindings and box geometry for one glyph layer."""

    x_major: str
    y_major: str
    x_minor: str
    y_minor: str
    width: float = 1.0
    height: float = 1.0
    polar: bool = False
    global_rescale: bool = True

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise CubbleError("glyph width and height must be positive")


def rescale11(values: Sequence[Any]) -> list[Any]:
    """Linear map onto [-1, 1]; constant (or empty) input maps to 0."""
    return _rescale(values, -1.0, 1.0, 0.0)


def rescale01(values: Sequence[Any]) -> list[Any]:
    """Linear map onto [0, 1]; constant (or empty) input maps to 0.5."""
    return _rescale(values, 0.0, 1.0, 0.5)


def _rescale(values: Sequence[Any], lo: float, hi: float, center: float) -> list[Any]:
    present = [v for v in values if not is_missing(v)]
    if not present:
        return [MISSING if is_missing(v) else center for v in values]
    vmin, vmax = min(present), max(present)
    if vmin == vmax:
        return [MISSING if is_missing(v) else center for v in values]
    span = vmax - vmin
    scale = hi - lo
    return [
        MISSING if is_missing(v) else lo + scale * (v - vmin) / span
        for v in values
    ]


def _numeric_column(t: Table, name: str) -> Column:
    col = t.column(name)
    if not col.is_numeric():
        raise CubbleError(f"glyph binding {name!r} must be numeric")
    return col


def _major_by_key(t: TemporalTable, spec: GlyphSpec) -> dict[Any, tuple[float, float]]:
    keys = t.table.column(t.meta.key).values
    xs = _numeric_column(t.table, spec.x_major).values
    ys = _numeric_column(t.table, spec.y_major).values
    out: dict[Any, tuple[float, float]] = {}
    for k, x, y in zip(keys, xs, ys):
        if is_missing(x) or is_missing(y):
            raise CubbleError(f"site {k!r}: major coordinates must not be missing")
        if k in out:
            if out[k] != (x, y):
                raise CubbleError(
                    f"site {k!r}: major coordinates vary within the site"
                )
        else:
            out[k] = (x, y)
    return out


def _key_ranges(
    keys: Sequence[Any], values: Sequence[Any], global_rescale: bool
) -> dict[Any, list[Any]]:
    """Group minor values by rescale scope (one shared scope when global)."""
    groups: dict[Any, list[Any]] = {}
    for k, v in zip(keys, values):
        scope = None if global_rescale else k
        groups.setdefault(scope, []).append(v)
    return groups


def _rescaled_minors(
    t: TemporalTable, spec: GlyphSpec, name: str, onto01: bool
) -> list[Any]:
    keys = t.table.column(t.meta.key).values
    col = _numeric_column(t.table, name)
    fn = rescale01 if onto01 else rescale11
    if spec.global_rescale:
        return fn(col.values)
    out: list[Any] = [None] * len(col)
    by_key: dict[Any, list[int]] = {}
    for i, k in enumerate(keys):
        by_key.setdefault(k, []).append(i)
    for rows in by_key.values():
        scaled = fn([col.values[i] for i in rows])
        for i, v in zip(rows, scaled):
            out[i] = v
    return out


def glyph_points(t: TemporalTable, spec: GlyphSpec) -> Table:
    """Per-observation glyph coordinates (key, index, gx, gy).

    Rows whose minor values are missing yield missing coordinates, so a
    renderer can break the polyline there.
    """
    major = _major_by_key(t, spec)
    keys = t.table.column(t.meta.key).values
    idx = t.table.column(t.meta.index)
    sx = _rescaled_minors(t, spec, spec.x_minor, onto01=spec.polar)
    sy = _rescaled_minors(t, spec, spec.y_minor, onto01=spec.polar)

    gx: list[Any] = []
    gy: list[Any] = []
    half_w = spec.width / 2.0
    half_h = spec.height / 2.0
    for k, vx, vy in zip(keys, sx, sy):
        mx, my = major[k]
        if is_missing(vx) or is_missing(vy):
            gx.append(MISSING)
            gy.append(MISSING)
        elif spec.polar:
            theta = 2.0 * math.pi * vx
            r = vy
            gx.append(mx + half_w * r * math.sin(theta))
            gy.append(my + half_h * r * math.cos(theta))
        else:
            gx.append(mx + half_w * vx)
            gy.append(my + half_h * vy)

    key_src = t.table.column(t.meta.key)
    return Table(
        [
            Column(t.meta.key, keys, key_src.kind, key_src.time_kind),
            Column(t.meta.index, idx.values, idx.kind, idx.time_kind),
            Column("gx", gx, Kind.FLOAT64),
            Column("gy", gy, Kind.FLOAT64),
        ]
    )


def glyph_box(t: TemporalTable, spec: GlyphSpec) -> Table:
    """One reference box per site: [x_major ± width/2] x [y_major ± height/2]."""
    major = _major_by_key(t, spec)
    keys, xmin, xmax, ymin, ymax = [], [], [], [], []
    for k in _site_order(t, major):
        mx, my = major[k]
        keys.append(k)
        xmin.append(mx - spec.width / 2.0)
        xmax.append(mx + spec.width / 2.0)
        ymin.append(my - spec.height / 2.0)
        ymax.append(my + spec.height / 2.0)
    key_src = t.table.column(t.meta.key)
    return Table(
        [
            Column(t.meta.key, keys, key_src.kind, key_src.time_kind),
            Column("xmin", xmin, Kind.FLOAT64),
            Column("xmax", xmax, Kind.FLOAT64),
            Column("ymin", ymin, Kind.FLOAT64),
            Column("ymax", ymax, Kind.FLOAT64),
        ]
    )


def glyph_ref_line(t: TemporalTable, spec: GlyphSpec) -> Table:
    """One horizontal mid-line per site, spanning the box at y_major."""
    major = _major_by_key(t, spec)
    keys, x0, x1, y = [], [], [], []
    for k in _site_order(t, major):
        mx, my = major[k]
        keys.append(k)
        x0.append(mx - spec.width / 2.0)
        x1.append(mx + spec.width / 2.0)
        y.append(my)
    key_src = t.table.column(t.meta.key)
    return Table(
        [
            Column(t.meta.key, keys, key_src.kind, key_src.time_kind),
            Column("x0", x0, Kind.FLOAT64),
            Column("x1", x1, Kind.FLOAT64),
            Column("y", y, Kind.FLOAT64),
        ]
    )


def _site_order(t: TemporalTable, major: dict) -> list[Any]:
    return [k for k in t.sidecar.column(t.meta.key).values if k in major]


def glyph_svg(
    points: Table,
    key: str,
    boxes: Table | None = None,
    lines: Table | None = None,
    size: tuple[int, int] = (800, 600),
    margin: int = 20,
) -> str:
    """Render glyph geometry as a standalone SVG document.

    Points are joined per site in row order; missing coordinates break
    the polyline. Boxes and reference lines draw beneath the series.
    """
    xs = [v for v in points.column("gx").values if not is_missing(v)]
    ys = [v for v in points.column("gy").values if not is_missing(v)]
    if boxes is not None:
        xs += list(boxes.column("xmin").values) + list(boxes.column("xmax").values)
        ys += list(boxes.column("ymin").values) + list(boxes.column("ymax").values)
    if not xs or not ys:
        xs, ys = [0.0], [0.0]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    w, h = size
    sx = (w - 2 * margin) / ((xmax - xmin) or 1.0)
    sy = (h - 2 * margin) / ((ymax - ymin) or 1.0)
    scale = min(sx, sy)

    def px(x: float) -> float:
        return margin + (x - xmin) * scale

    def py(y: float) -> float:
        return h - margin - (y - ymin) * scale  # flip: north up

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
    ]
    if boxes is not None:
        for row in boxes.rows():
            bw = (row["xmax"] - row["xmin"]) * scale
            bh = (row["ymax"] - row["ymin"]) * scale
            parts.append(
                f'<rect x="{px(row["xmin"]):.2f}" y="{py(row["ymax"]):.2f}" '
                f'width="{bw:.2f}" height="{bh:.2f}" '
                'fill="none" stroke="#cccccc" stroke-width="1"/>'
            )
    if lines is not None:
        for row in lines.rows():
            parts.append(
                f'<line x1="{px(row["x0"]):.2f}" y1="{py(row["y"]):.2f}" '
                f'x2="{px(row["x1"]):.2f}" y2="{py(row["y"]):.2f}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
    key_vals = points.column(key).values
    gx = points.column("gx").values
    gy = points.column("gy").values
    path: list[str] = []
    prev_key = object()
    pen_down = False
    for k, x, y in zip(key_vals, gx, gy):
        if k != prev_key or is_missing(x) or is_missing(y):
            pen_down = False
            prev_key = k
        if is_missing(x) or is_missing(y):
            continue
        cmd = "L" if pen_down else "M"
        path.append(f"{cmd}{px(x):.2f} {py(y):.2f}")
        pen_down = True
    if path:
        parts.append(
            f'<path d="{" ".join(path)}" fill="none" stroke="#2b5d8c" '
            'stroke-width="1.2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
