"""Two-stage matching of sites across two cubbles.

Stage one pairs sites by distance; stage two scores each pair's series
by counting co-occurring peaks. The scoring function is pluggable: any
callable over two aligned series and a window works in place of
``match_peak``.
"""

from __future__ import annotations

import math
import warnings
from typing import Any, Callable, Mapping, Sequence

from . import calendar as _calendar
from .core import (
    TS_COLUMN,
    CoordMode,
    CubbleMeta,
    CubbleWarning,
    SpatialTable,
)
from .table import (
    MISSING,
    Column,
    CubbleError,
    Kind,
    Table,
    is_missing,
    scalar_to_text,
)

EARTH_RADIUS_M = 6_371_008.8

DEFAULT_WINDOW = 5


def great_circle_m(a: Sequence[float], b: Sequence[float]) -> float:
    """Haversine distance in meters between two (lon, lat) points."""
    lon1, lat1 = a
    lon2, lat2 = b
    for lon, lat in ((lon1, lat1), (lon2, lat2)):
        if not -180.0 <= lon <= 180.0:
            raise CubbleError(f"longitude out of range: {lon}")
        if not -90.0 <= lat <= 90.0:
            raise CubbleError(f"latitude out of range: {lat}")
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def _site_coords(s: SpatialTable) -> list[tuple[float, float]]:
    xs = s.table.column(s.meta.coords[0]).values
    ys = s.table.column(s.meta.coords[1]).values
    out = []
    for x, y in zip(xs, ys):
        if is_missing(x) or is_missing(y):
            raise CubbleError("sites must have complete coordinates for matching")
        out.append((float(x), float(y)))
    return out


def distance_matrix(df1: SpatialTable, df2: SpatialTable) -> list[list[float]]:
    """Pairwise site distances: haversine for geographic coordinates,
    Euclidean for projected ones."""
    if df1.meta.coord_mode is not df2.meta.coord_mode:
        raise CubbleError("cannot mix geographic and projected cubbles")
    a = _site_coords(df1)
    b = _site_coords(df2)
    if df1.meta.coord_mode is CoordMode.GEOGRAPHIC:
        dist = great_circle_m
    else:
        dist = lambda p, q: math.hypot(p[0] - q[0], p[1] - q[1])  # noqa: E731
    return [[dist(p, q) for q in b] for p in a]


def match_spatial(
    df1: SpatialTable,
    df2: SpatialTable,
    spatial_n_group: int = 10,
    spatial_n_each: int = 1,
    return_cubble: bool = False,
) -> "Table | list[SpatialTable]":
    """Pair sites of two cubbles by ascending distance.

    Pairs are scanned smallest-distance first; a pair is accepted when
    its df1 site is unused (df2 sites may serve several groups). Each
    accepted df1 site anchors one group holding its `spatial_n_each`
    nearest df2 sites. Returns the match table, or the per-group cubbles
    when `return_cubble` is set.
    """
    if spatial_n_group < 1 or spatial_n_each < 1:
        raise CubbleError("spatial_n_group and spatial_n_each must be >= 1")
    if df1.n_sites == 0 or df2.n_sites == 0:
        raise CubbleError("cannot match empty cubbles")
    dist = distance_matrix(df1, df2)
    keys1 = [scalar_to_text(k) for k in df1.keys()]
    keys2 = [scalar_to_text(k) for k in df2.keys()]

    pairs = sorted(
        (dist[i][j], keys1[i], keys2[j], i, j)
        for i in range(len(keys1))
        for j in range(len(keys2))
    )
    used1: set[int] = set()
    anchors: list[tuple[int, int]] = []  # (df1 row, nearest df2 row)
    for _, _, _, i, j in pairs:
        if i in used1:
            continue
        used1.add(i)
        anchors.append((i, j))
        if len(anchors) == spatial_n_group:
            break
    if len(anchors) < spatial_n_group:
        warnings.warn(
            f"only {len(anchors)} group(s) available, "
            f"{spatial_n_group} requested",
            CubbleWarning,
            stacklevel=2,
        )

    groups: list[list[tuple[int, int, float]]] = []
    for i, _ in anchors:
        order = sorted(range(len(keys2)), key=lambda j: (dist[i][j], keys2[j]))
        chosen = order[:spatial_n_each]
        groups.append([(i, j, dist[i][j]) for j in chosen])

    if not return_cubble:
        g_col, from_col, to_col, d_col = [], [], [], []
        for g, members in enumerate(groups, start=1):
            for i, j, d in members:
                g_col.append(g)
                from_col.append(keys1[i])
                to_col.append(keys2[j])
                d_col.append(d)
        return Table(
            [
                Column("group", g_col, Kind.INT64),
                Column("from_key", from_col, Kind.TEXT),
                Column("to_key", to_col, Kind.TEXT),
                Column("dist", d_col, Kind.FLOAT64),
            ]
        )

    return [
        _group_cubble(df1, df2, g + 1, members)
        for g, members in enumerate(groups)
    ]


def _union_schema(tables: list[Table], first_names: Sequence[str]) -> list[tuple]:
    """Column specs of the union schema: first table's order, then extras."""
    specs: dict[str, tuple] = {}
    order: list[str] = []
    for t in tables:
        for col in t.columns:
            if col.name not in specs:
                specs[col.name] = (col.kind, col.time_kind)
                order.append(col.name)
    ordered = [n for n in first_names if n in specs]
    ordered += [n for n in order if n not in ordered]
    return [(n, *specs[n]) for n in ordered]


def _aligned_row(table: Table, i: int, spec: list[tuple]) -> list[Any]:
    out = []
    for name, _, _ in spec:
        out.append(table.column(name).values[i] if table.has_column(name) else MISSING)
    return out


def _merge_tables(parts: list[Table]) -> Table:
    spec = _union_schema(parts, parts[0].names)
    data: dict[str, list[Any]] = {name: [] for name, _, _ in spec}
    for part in parts:
        for i in range(part.nrow):
            for (name, _, _), v in zip(spec, _aligned_row(part, i, spec)):
                data[name].append(v)
    cols = []
    for name, kind, tk in spec:
        vals = data[name]
        # a column missing from one side may hold only MISSING values
        cols.append(Column(name, vals, kind, tk))
    return Table(cols)


def _site_slice(s: SpatialTable, row: int, key_name: str, index_name: str,
                coords: tuple[str, str], source: str) -> tuple[Table, Table]:
    """(spatial row, ts cell) for one site, with roles renamed to df1's."""
    spatial = s.table.without([TS_COLUMN]).take([row])
    renames = {
        s.meta.key: key_name,
        s.meta.coords[0]: coords[0],
        s.meta.coords[1]: coords[1],
    }
    cols = []
    for col in spatial.columns:
        name = renames.get(col.name, col.name)
        if col.name == s.meta.key:
            cols.append(Column(name, [scalar_to_text(col.values[0])], Kind.TEXT))
        else:
            cols.append(col.rename(name))
    cell = s.table.column(TS_COLUMN).values[row]
    cell_cols = [
        c.rename(index_name) if c.name == s.meta.index else c for c in cell.columns
    ]
    return Table(cols), Table(cell_cols)


def _group_cubble(
    df1: SpatialTable,
    df2: SpatialTable,
    group: int,
    members: list[tuple[int, int, float]],
) -> SpatialTable:
    meta1 = df1.meta
    if df1.meta.index_kind is not df2.meta.index_kind:
        raise CubbleError("cannot combine cubbles with different index kinds")
    rows: list[Table] = []
    cells: list[Table] = []
    types: list[str] = []
    dists: list[float] = []

    seen: set[str] = set()
    entries: list[tuple[SpatialTable, int, str, float]] = []
    i = members[0][0]
    entries.append((df1, i, "df1", 0.0))
    for _, j, d in members:
        entries.append((df2, j, "df2", d))
    for src, row, label, d in entries:
        spatial, cell = _site_slice(
            src, row, meta1.key, meta1.index, meta1.coords, label
        )
        key_text = spatial.column(meta1.key).values[0]
        if key_text in seen:
            raise CubbleError(
                f"a cubble requires unique site ids; {key_text!r} repeats "
                "within one matched group"
            )
        seen.add(key_text)
        rows.append(spatial)
        cells.append(cell)
        types.append(label)
        dists.append(d)

    spatial_union = _merge_tables(rows)
    has_type = rows[0].has_column("type") or any(t.has_column("type") for t in rows)
    if not has_type:
        spatial_union = spatial_union.with_column(Column("type", types, Kind.TEXT))
    spatial_union = spatial_union.with_column(
        Column("group", [group] * len(types), Kind.INT64)
    )
    spatial_union = spatial_union.with_column(Column("dist", dists, Kind.FLOAT64))

    cell_spec = _union_schema(cells, cells[0].names)
    unified_cells = []
    for cell in cells:
        data: dict[str, list[Any]] = {name: [] for name, _, _ in cell_spec}
        for i in range(cell.nrow):
            for (name, _, _), v in zip(cell_spec, _aligned_row(cell, i, cell_spec)):
                data[name].append(v)
        unified_cells.append(
            Table([Column(n, data[n], k, tk) for n, k, tk in cell_spec])
        )

    table = spatial_union.with_column(Column(TS_COLUMN, unified_cells, Kind.NESTED))
    meta = CubbleMeta(
        key=meta1.key,
        index=meta1.index,
        coords=meta1.coords,
        coord_mode=meta1.coord_mode,
        index_kind=meta1.index_kind,
        interval=None,
    )
    return SpatialTable(table, meta)


def find_peaks(series: Sequence[Any]) -> list[int]:
    """Positions of strict local maxima; series ends never qualify and a
    MISSING anywhere in a candidate's neighborhood disqualifies it."""
    peaks = []
    for i in range(1, len(series) - 1):
        left, mid, right = series[i - 1], series[i], series[i + 1]
        if is_missing(left) or is_missing(mid) or is_missing(right):
            continue
        if mid > left and mid > right:
            peaks.append(i)
    return peaks


def match_peak(x: Sequence[Any], y: Sequence[Any], window: int = DEFAULT_WINDOW) -> int:
    """Number of peaks of x with some peak of y within ±window positions."""
    if len(x) != len(y):
        raise CubbleError("series must share one index to be scored")
    if window < 0:
        raise CubbleError("window must be >= 0")
    if len(x) < 3:
        return 0
    px = find_peaks(x)
    py = find_peaks(y)
    if not py:
        return 0
    count = 0
    for p in px:
        if any(abs(p - q) <= window for q in py):
            count += 1
    return count


def _series_by_index(cell: Table, index: str, var: str) -> dict[int, Any]:
    idx = cell.column(index).values
    vals = cell.column(var).values
    return {_calendar.index_count(i): v for i, v in zip(idx, vals)}


def align_series(
    cell_x: Table, cell_y: Table, index: str, var_x: str, var_y: str
) -> tuple[list[Any], list[Any]]:
    """Inner-join two ts cells on the index; values in index order."""
    sx = _series_by_index(cell_x, index, var_x)
    sy = _series_by_index(cell_y, index, var_y)
    shared = sorted(set(sx) & set(sy))
    return [sx[c] for c in shared], [sy[c] for c in shared]


MatchFn = Callable[[Sequence[Any], Sequence[Any], int], float]


def match_temporal(
    data: SpatialTable,
    data_id: str,
    match_id: str,
    temporal_by: Mapping[str, str],
    temporal_window: int = DEFAULT_WINDOW,
    match_fn: MatchFn = match_peak,
    return_cubble: bool = False,
) -> "Table | list[SpatialTable]":
    """Score the series similarity of each spatially matched group.

    `data_id` names the column separating the two sources and `match_id`
    the column separating groups; `temporal_by` maps the first source's
    variable to the second's. Groups with several candidate sites score
    as the best cross-source pair.
    """
    if len(temporal_by) != 1:
        raise CubbleError("`temporal_by` must map exactly one variable pair")
    (var_x, var_y), = temporal_by.items()
    for name in (data_id, match_id):
        if not data.table.has_column(name):
            raise CubbleError(f"no such column: {name!r}")
    schema_names = {c.name for cell in data.table.column(TS_COLUMN).values
                    for c in cell.columns}
    for var in (var_x, var_y):
        if var not in schema_names:
            raise CubbleError(f"no temporal variable {var!r} in the nested series")

    src_col = data.table.column(data_id).values
    grp_col = data.table.column(match_id).values
    sources: list[Any] = []
    for v in src_col:
        if v not in sources:
            sources.append(v)
    if len(sources) != 2:
        raise CubbleError(
            f"{data_id!r} must distinguish exactly two sources, found {sources!r}"
        )

    group_rows: dict[Any, list[int]] = {}
    group_order: list[Any] = []
    for i, g in enumerate(grp_col):
        if g not in group_rows:
            group_order.append(g)
        group_rows.setdefault(g, []).append(i)

    cells = data.table.column(TS_COLUMN).values
    index = data.meta.index
    scores: list[tuple[Any, float, dict[int, Any]]] = []
    for g in group_order:
        rows = group_rows[g]
        side_x = [i for i in rows if src_col[i] == sources[0]]
        side_y = [i for i in rows if src_col[i] == sources[1]]
        if not side_x or not side_y:
            raise CubbleError(f"group {g!r} lacks one of the two sources")
        best = None
        best_pair = None
        for i in side_x:
            for j in side_y:
                xs, ys = align_series(cells[i], cells[j], index, var_x, var_y)
                score = match_fn(xs, ys, temporal_window)
                if best is None or score > best:
                    best = score
                    best_pair = (i, j)
        scores.append((g, best, {r: (var_x if src_col[r] == sources[0] else var_y)
                                 for r in rows}))

    if not return_cubble:
        grp_src = data.table.column(match_id)
        return Table(
            [
                Column(match_id, [g for g, _, _ in scores], grp_src.kind,
                       grp_src.time_kind),
                Column("match_res", [s for _, s, _ in scores]),
            ]
        )

    out = []
    for g, score, var_of in scores:
        rows = group_rows[g]
        spatial = data.table.without([TS_COLUMN]).take(rows)
        new_cells = []
        for r in rows:
            cell = cells[r]
            matched = cell.column(var_of[r]).rename("matched")
            new_cells.append(Table([cell.column(index), matched]))
        table = spatial.with_column(
            Column("match_res", [score] * len(rows))
        ).with_column(Column(TS_COLUMN, new_cells, Kind.NESTED))
        out.append(SpatialTable(table, data.meta))
    return out
