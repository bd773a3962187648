"""The two cubble faces, creation, pivoting, and the table verb set.

A cubble holds one spatio-temporal dataset in either of two layouts:

* spatial face: one row per site, spatial columns plus a nested ``ts``
  column of per-site time series;
* temporal face: one long table of observations, with the spatial
  columns carried alongside as a sidecar table.

``face_temporal`` and ``face_spatial`` pivot between the two without
loss; all other operations preserve whichever face they are given.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Mapping, Sequence

from . import calendar as _calendar
from .keycheck import KeyReport, check_key
from .table import (
    MISSING,
    Column,
    CubbleError,
    Kind,
    Table,
    TimeKind,
    TimePoint,
    footprint_bytes,
    is_missing,
    kind_of,
)

TS_COLUMN = "ts"


class CubbleWarning(UserWarning):
    """Non-fatal data reconciliation notices (dropped keys and the like)."""


class CoordMode(Enum):
    GEOGRAPHIC = "geographic"
    PROJECTED = "projected"


@dataclass(frozen=True)
class CubbleMeta:
    """Which columns play the key/index/coordinate roles, plus index cadence."""

    key: str
    index: str
    coords: tuple[str, str]
    coord_mode: CoordMode = CoordMode.GEOGRAPHIC
    index_kind: TimeKind | None = None
    interval: int | None = None

    def __post_init__(self):
        if self.key == self.index:
            raise CubbleError("key and index must be different columns")
        x, y = self.coords
        if x == y:
            raise CubbleError("coordinate columns must be distinct")
        if self.interval is not None and self.interval < 1:
            raise CubbleError("interval must be a positive step count")


def _check_index_column(col: Column, meta: CubbleMeta, where: str) -> None:
    if len(col) == 0:
        return
    if meta.index_kind is None:
        if col.kind is not Kind.INT64:
            raise CubbleError(f"{where}: expected an integer index")
    elif col.kind is not Kind.TIME or col.time_kind is not meta.index_kind:
        raise CubbleError(
            f"{where}: index must be {meta.index_kind.label}"
        )


def _check_coords(table: Table, meta: CubbleMeta) -> None:
    for name in meta.coords:
        col = table.column(name)
        if not col.is_numeric():
            raise CubbleError(f"coordinate column {name!r} is not numeric")
    if meta.coord_mode is CoordMode.GEOGRAPHIC:
        xs = table.column(meta.coords[0])
        ys = table.column(meta.coords[1])
        for v in xs.values:
            if not is_missing(v) and not -180.0 <= v <= 180.0:
                raise CubbleError(f"longitude out of range: {v}")
        for v in ys.values:
            if not is_missing(v) and not -90.0 <= v <= 90.0:
                raise CubbleError(f"latitude out of range: {v}")


@dataclass(frozen=True)
class SpatialTable:
    """Spatial face: one row per site with a nested ``ts`` time series."""

    table: Table
    meta: CubbleMeta

    def __post_init__(self):
        t, meta = self.table, self.meta
        if not t.has_column(TS_COLUMN):
            raise CubbleError(f"spatial face requires a {TS_COLUMN!r} column")
        key_col = t.column(meta.key)
        seen = set()
        for v in key_col.values:
            if is_missing(v):
                raise CubbleError("key values must not be missing")
            if v in seen:
                raise CubbleError(f"duplicate key value: {v!r}")
            seen.add(v)
        _check_coords(t, meta)
        ts_col = t.column(TS_COLUMN)
        if len(ts_col) and ts_col.kind is not Kind.NESTED:
            raise CubbleError(f"{TS_COLUMN!r} must hold nested tables")
        schema = None
        for key, cell in zip(key_col.values, ts_col.values):
            if not isinstance(cell, Table):
                raise CubbleError(f"site {key!r}: ts cell is not a table")
            if cell.ncol == 0 or cell.columns[0].name != meta.index:
                raise CubbleError(
                    f"site {key!r}: first ts column must be the index {meta.index!r}"
                )
            if schema is None:
                schema = cell.schema()
            elif cell.schema() != schema:
                raise CubbleError(f"site {key!r}: ts schema differs from other sites")
            idx = cell.columns[0]
            _check_index_column(idx, meta, f"site {key!r}")
            prev = None
            for v in idx.values:
                if is_missing(v):
                    raise CubbleError(f"site {key!r}: missing index value")
                c = _calendar.index_count(v)
                if prev is not None and c <= prev:
                    raise CubbleError(
                        f"site {key!r}: ts index must be strictly increasing"
                    )
                prev = c

    @property
    def n_sites(self) -> int:
        return self.table.nrow

    def keys(self) -> tuple:
        return self.table.column(self.meta.key).values

    def spatial_columns(self) -> Table:
        return self.table.without([TS_COLUMN])

    def ts_schema(self) -> tuple | None:
        for cell in self.table.column(TS_COLUMN).values:
            return cell.schema()
        return None

    # face-preserving conveniences
    def face_temporal(self) -> "TemporalTable":
        return face_temporal(self)

    def filter_rows(self, predicate) -> "SpatialTable":
        return filter_rows(self, predicate)

    def select_cols(self, names) -> "SpatialTable":
        return select_cols(self, names)

    def derive_col(self, name, fn) -> "SpatialTable":
        return derive_col(self, name, fn)


@dataclass(frozen=True)
class TemporalTable:
    """Temporal face: long observations plus the spatial sidecar."""

    table: Table
    sidecar: Table
    meta: CubbleMeta

    def __post_init__(self):
        t, meta = self.table, self.meta
        key_col = t.column(meta.key)
        idx_col = t.column(meta.index)
        _check_index_column(idx_col, meta, "temporal face")
        pairs = set()
        for k, v in zip(key_col.values, idx_col.values):
            if is_missing(v):
                raise CubbleError("index values must not be missing")
            if (k, v) in pairs:
                raise CubbleError(f"duplicate observation for key {k!r} at {v!r}")
            pairs.add((k, v))
        side_keys = self.sidecar.column(meta.key).values
        side_set = set()
        for k in side_keys:
            if k in side_set:
                raise CubbleError(f"duplicate sidecar key: {k!r}")
            side_set.add(k)
        for k in key_col.values:
            if k not in side_set:
                raise CubbleError(f"key {k!r} has no spatial information")

    @property
    def n_obs(self) -> int:
        return self.table.nrow

    def keys(self) -> tuple:
        return self.sidecar.column(self.meta.key).values

    def temporal_var_names(self) -> tuple[str, ...]:
        side = set(self.sidecar.names)
        return tuple(
            c.name
            for c in self.table.columns
            if c.name not in (self.meta.key, self.meta.index) and c.name not in side
        )

    def face_spatial(self) -> SpatialTable:
        return face_spatial(self)

    def unfold(self, names) -> "TemporalTable":
        return unfold(self, names)

    def filter_rows(self, predicate) -> "TemporalTable":
        return filter_rows(self, predicate)

    def select_cols(self, names) -> "TemporalTable":
        return select_cols(self, names)

    def derive_col(self, name, fn) -> "TemporalTable":
        return derive_col(self, name, fn)


Cubble = SpatialTable | TemporalTable


def _group_indices(values: Sequence[Any]) -> dict[Any, list[int]]:
    groups: dict[Any, list[int]] = {}
    for i, v in enumerate(values):
        groups.setdefault(v, []).append(i)
    return groups


def _index_kind_of(col: Column) -> TimeKind | None:
    if col.kind is Kind.TIME:
        return col.time_kind
    if col.kind is Kind.INT64 or len(col) == 0:
        return None
    raise CubbleError(f"index column {col.name!r} must be a time or integer column")


def make_cubble(
    spatial: Table,
    temporal: Table,
    key: str | None = None,
    index: str = "",
    coords: tuple[str, str] | Sequence[str] = (),
    by: Mapping[str, str] | None = None,
    coord_mode: CoordMode = CoordMode.GEOGRAPHIC,
    strict: bool = False,
) -> tuple[SpatialTable, KeyReport]:
    """Build the spatial face from separate spatial and temporal tables.

    `by` maps the spatial identifier column to its temporal counterpart
    when the two tables name it differently; otherwise `key` names the
    shared column. Sites present on only one side are dropped from the
    result and reported (a warning is emitted; `strict=True` raises
    instead). The per-site series are nested into ``ts`` sorted by index.
    """
    if by is None:
        if key is None:
            raise CubbleError("either `key` or `by` must be given")
        by = {key: key}
    else:
        by = dict(by)
        if len(by) != 1:
            raise CubbleError("`by` must contain exactly one column pair")
        left = next(iter(by))
        if key is None:
            key = left
        elif key != left:
            raise CubbleError("`key` must match the spatial side of `by`")
    t_key = by[key]
    if not index:
        raise CubbleError("`index` must be given")
    coords = tuple(coords)
    if len(coords) != 2:
        raise CubbleError("`coords` must name two columns (x, y)")

    for name in (key, *coords):
        if not spatial.has_column(name):
            raise CubbleError(f"spatial table has no column {name!r}")
    for name in (t_key, index):
        if not temporal.has_column(name):
            raise CubbleError(f"temporal table has no column {name!r}")

    s_keys = spatial.column(key)
    if len(set(s_keys.values)) != len(s_keys):
        raise CubbleError("duplicate keys in the spatial table")
    t_keys = temporal.column(t_key)
    if len(s_keys) and len(t_keys) and s_keys.kind is not t_keys.kind:
        raise CubbleError(
            f"key columns disagree on kind: {s_keys.kind.value} vs {t_keys.kind.value}"
        )

    report = check_key(spatial, temporal, by={key: t_key})
    common = set(s_keys.values) & set(t_keys.values)
    if not common:
        raise CubbleError("no overlapping keys between the two tables")
    if not report.clean:
        if strict:
            raise CubbleError(
                "unmatched keys between spatial and temporal tables; "
                "inspect the key report or relax strict mode"
            )
        warnings.warn(
            "some sites lack spatial or temporal information and were dropped; "
            "inspect the key report",
            CubbleWarning,
            stacklevel=2,
        )

    temporal_vars = [c.name for c in temporal.columns if c.name not in (t_key, index)]
    clash = [n for n in temporal_vars if spatial.has_column(n)]
    if clash:
        raise CubbleError(f"temporal variables collide with spatial columns: {clash}")

    idx_col = temporal.column(index)
    meta = CubbleMeta(
        key=key,
        index=index,
        coords=coords,
        coord_mode=coord_mode,
        index_kind=_index_kind_of(idx_col),
    )

    keep_sites = [i for i, v in enumerate(s_keys.values) if v in common]
    site_table = spatial.take(keep_sites)
    by_key = _group_indices(t_keys.values)

    cell_schema = [temporal.column(index)] + [temporal.column(n) for n in temporal_vars]
    cells = []
    count_groups: list[list[int]] = []
    for site_key in site_table.column(key).values:
        rows = by_key.get(site_key, [])
        counts = [_calendar.index_count(idx_col.values[i]) for i in rows]
        order = sorted(range(len(rows)), key=lambda j: counts[j])
        rows = [rows[j] for j in order]
        cells.append(Table([c.take(rows) for c in cell_schema]))
        count_groups.append(sorted(counts))

    step, defaulted = _calendar.step_from_count_groups(count_groups)
    meta = replace(meta, interval=None if defaulted else step)

    other_spatial = [c for c in site_table.columns if c.name != key]
    cols = [site_table.column(key)] + other_spatial
    cols.append(Column(TS_COLUMN, cells, Kind.NESTED))
    result = SpatialTable(Table(cols), meta)
    return result, report


def from_flat(
    flat: Table,
    key: str,
    index: str,
    coords: tuple[str, str] | Sequence[str],
    coord_mode: CoordMode = CoordMode.GEOGRAPHIC,
) -> SpatialTable:
    """Coerce a single joined table into the spatial face.

    Columns constant within every key group (missing included) classify
    as spatial; all others nest as temporal variables. Coordinates must
    classify spatial.
    """
    coords = tuple(coords)
    for name in (key, index, *coords):
        if not flat.has_column(name):
            raise CubbleError(f"flat table has no column {name!r}")
    groups = _group_indices(flat.column(key).values)

    spatial_names: list[str] = []
    temporal_names: list[str] = []
    for col in flat.columns:
        if col.name in (key, index):
            continue
        constant = True
        offending = None
        for k, rows in groups.items():
            first = col.values[rows[0]]
            for i in rows[1:]:
                if col.values[i] != first and not (
                    is_missing(col.values[i]) and is_missing(first)
                ):
                    constant = False
                    offending = k
                    break
            if not constant:
                break
        if constant:
            spatial_names.append(col.name)
        elif col.name in coords:
            raise CubbleError(
                f"coordinate column {col.name!r} varies within key {offending!r}"
            )
        else:
            temporal_names.append(col.name)

    first_rows = [rows[0] for rows in groups.values()]
    spatial = flat.select([key] + spatial_names).take(first_rows)
    temporal = flat.select([key, index] + temporal_names)
    cubble, _ = make_cubble(
        spatial, temporal, key=key, index=index, coords=coords, coord_mode=coord_mode
    )
    return cubble


def face_temporal(s: SpatialTable) -> TemporalTable:
    """Pivot the spatial face into the long temporal face."""
    meta = s.meta
    sidecar = s.table.without([TS_COLUMN])
    cells = s.table.column(TS_COLUMN).values
    key_col = s.table.column(meta.key)

    if not cells:
        cols = [
            Column(meta.key, [], key_col.kind, key_col.time_kind),
            Column(
                meta.index,
                [],
                Kind.INT64 if meta.index_kind is None else Kind.TIME,
                meta.index_kind,
            ),
        ]
        return TemporalTable(Table(cols), sidecar, meta)

    schema = cells[0].columns
    key_values: list[Any] = []
    for k, cell in zip(key_col.values, cells):
        key_values.extend([k] * cell.nrow)
    long_cols = [Column(meta.key, key_values, key_col.kind, key_col.time_kind)]
    for j, proto in enumerate(schema):
        vals: list[Any] = []
        for cell in cells:
            vals.extend(cell.columns[j].values)
        long_cols.append(Column(proto.name, vals, proto.kind, proto.time_kind))
    return TemporalTable(Table(long_cols), sidecar, meta)


def face_spatial(t: TemporalTable) -> SpatialTable:
    """Pivot the temporal face back into the nested spatial face.

    Long columns whose names also appear in the sidecar were unfolded
    from it; they are dropped rather than re-nested, so the pivot pair
    is lossless.
    """
    meta = t.meta
    side_names = set(t.sidecar.names)
    value_cols = [
        c
        for c in t.table.columns
        if c.name not in (meta.key, meta.index) and c.name not in side_names
    ]
    idx_col = t.table.column(meta.index)
    groups = _group_indices(t.table.column(meta.key).values)

    cells = []
    for site_key in t.sidecar.column(meta.key).values:
        rows = groups.get(site_key, [])
        rows.sort(key=lambda i: _calendar.index_count(idx_col.values[i]))
        cell_cols = [idx_col.take(rows)] + [c.take(rows) for c in value_cols]
        cells.append(Table(cell_cols))

    cols = list(t.sidecar.columns) + [Column(TS_COLUMN, cells, Kind.NESTED)]
    return SpatialTable(Table(cols), meta)


def unfold(t: TemporalTable, names: Sequence[str] | str) -> TemporalTable:
    """Broadcast sidecar columns onto the long table by key."""
    if isinstance(names, str):
        names = [names]
    if not names:
        return t
    for name in names:
        if not t.sidecar.has_column(name):
            raise CubbleError(f"no spatial variable {name!r} to unfold")
        if t.table.has_column(name):
            raise CubbleError(f"column {name!r} already present in the long table")
    row_of = {k: i for i, k in enumerate(t.sidecar.column(t.meta.key).values)}
    key_vals = t.table.column(t.meta.key).values
    cols = list(t.table.columns)
    for name in names:
        src = t.sidecar.column(name)
        vals = [src.values[row_of[k]] for k in key_vals]
        cols.append(Column(name, vals, src.kind, src.time_kind))
    return TemporalTable(Table(cols), t.sidecar, t.meta)


def spatial_of(t: TemporalTable) -> Table:
    """The spatial sidecar, verbatim."""
    return t.sidecar


def key_vars(c: Cubble) -> str:
    return c.meta.key


def index_var(c: Cubble) -> str:
    return c.meta.index


def coords_of(c: Cubble) -> tuple[str, str]:
    return c.meta.coords


def key_data(c: Cubble) -> Table:
    """One row per distinct key, in site order."""
    if isinstance(c, SpatialTable):
        src = c.table.column(c.meta.key)
    else:
        src = c.sidecar.column(c.meta.key)
    return Table([Column(c.meta.key, src.values, src.kind, src.time_kind)])


def _rebuild(c: Cubble, table: Table) -> Cubble:
    if isinstance(c, SpatialTable):
        return SpatialTable(table, c.meta)
    return TemporalTable(table, c.sidecar, c.meta)


def filter_rows(c: Cubble, predicate: Callable[[dict[str, Any]], bool]) -> Cubble:
    """Keep rows (sites or observations) where the predicate holds."""
    mask = []
    for row in c.table.rows():
        keep = predicate(row)
        if not isinstance(keep, bool):
            raise CubbleError("row predicate must return a bool")
        mask.append(keep)
    return _rebuild(c, c.table.filter(mask))


def _protected(c: Cubble) -> set[str]:
    if isinstance(c, SpatialTable):
        return {c.meta.key, *c.meta.coords, TS_COLUMN}
    return {c.meta.key, c.meta.index}


def select_cols(c: Cubble, names: Sequence[str]) -> Cubble:
    """Column projection; key/index/coords/ts are silently retained."""
    for n in names:
        if not c.table.has_column(n):
            raise CubbleError(f"no such column: {n!r}")
    keep = set(names) | _protected(c)
    cols = [col for col in c.table.columns if col.name in keep]
    return _rebuild(c, Table(cols))


def derive_col(c: Cubble, name: str, fn: Callable[[dict[str, Any]], Any]) -> Cubble:
    """Add (or replace) a column computed row-wise from existing ones."""
    if name in _protected(c) or name == TS_COLUMN:
        raise CubbleError(f"cannot overwrite protected column {name!r}")
    values = [fn(row) for row in c.table.rows()]
    for v in values:
        if kind_of(v) is Kind.NESTED:
            raise CubbleError("derived values must be scalars")
    col = Column(name, values)
    table = c.table
    if isinstance(c, SpatialTable) and not table.has_column(name):
        cols = [x for x in table.columns if x.name != TS_COLUMN]
        cols.append(col)
        cols.append(table.column(TS_COLUMN))
        return _rebuild(c, Table(cols))
    return _rebuild(c, table.with_column(col))


_BUCKETS = ("year", "month", "yearmonth")
AGG_OPS = ("mean", "min", "max", "sum", "count", "var")


def _bucket_value(tp: Any, bucket: str) -> Any:
    if not isinstance(tp, TimePoint):
        raise CubbleError("time buckets require a time index")
    d = tp.to_date()
    if bucket == "year":
        return d.year
    if bucket == "month":
        return d.month
    return TimePoint.yearmonth(d.year, d.month)


def _aggregate(op: str, values: list[Any]) -> Any:
    vals = [v for v in values if not is_missing(v)]
    if op == "count":
        return len(vals)
    if not vals:
        return MISSING
    if op == "mean":
        return sum(vals) / len(vals)
    if op == "min":
        return min(vals)
    if op == "max":
        return max(vals)
    if op == "sum":
        return sum(vals)
    if op == "var":
        if len(vals) < 2:
            return MISSING
        m = sum(vals) / len(vals)
        return sum((v - m) ** 2 for v in vals) / (len(vals) - 1)
    raise CubbleError(f"unknown aggregation {op!r}")


def _agg_kind(op: str, source: Column) -> Kind:
    if op == "count":
        return Kind.INT64
    if op in ("mean", "var"):
        return Kind.FLOAT64
    return source.kind


def summarise_by(
    t: TemporalTable,
    grouping: Sequence[str],
    aggs: Mapping[str, tuple[str, str]],
) -> "TemporalTable | Table":
    """Aggregate observations over key and/or a derived time bucket.

    `grouping` lists "key" and/or one of "year" / "month" / "yearmonth";
    `aggs` maps output names to (op, column) pairs with op one of
    mean/min/max/sum/count/var. Missing values are skipped; an all-missing
    group aggregates to MISSING. Grouping by key plus a bucket returns a
    temporal face whose index is the bucket (interval recomputed);
    any other grouping returns a plain table.
    """
    if isinstance(t, SpatialTable):
        raise CubbleError("summarise over time is only defined on the temporal face")
    grouping = list(grouping)
    buckets = [g for g in grouping if g in _BUCKETS]
    bad = [g for g in grouping if g != "key" and g not in _BUCKETS]
    if bad:
        raise CubbleError(f"unknown grouping terms: {bad}")
    if len(buckets) > 1:
        raise CubbleError("at most one time bucket may be used")
    by_key = "key" in grouping
    bucket = buckets[0] if buckets else None
    if not by_key and bucket is None:
        raise CubbleError("grouping must include 'key' and/or a time bucket")

    for out, (op, col_name) in aggs.items():
        if op not in AGG_OPS:
            raise CubbleError(f"unknown aggregation {op!r}")
        src = t.table.column(col_name)
        if not src.is_numeric():
            raise CubbleError(f"cannot aggregate non-numeric column {col_name!r}")

    key_vals = t.table.column(t.meta.key).values
    idx_vals = t.table.column(t.meta.index).values
    bucket_vals = (
        [_bucket_value(v, bucket) for v in idx_vals] if bucket is not None else None
    )

    groups: dict[tuple, list[int]] = {}
    for i in range(t.table.nrow):
        gk = (
            key_vals[i] if by_key else None,
            bucket_vals[i] if bucket is not None else None,
        )
        groups.setdefault(gk, []).append(i)

    if by_key:
        key_order = {k: i for i, k in enumerate(t.sidecar.column(t.meta.key).values)}
        ordered = sorted(
            groups,
            key=lambda gk: (
                key_order[gk[0]],
                _calendar.index_count(gk[1]) if isinstance(gk[1], TimePoint)
                else (gk[1] if gk[1] is not None else 0),
            ),
        )
    else:
        ordered = sorted(
            groups,
            key=lambda gk: _calendar.index_count(gk[1])
            if isinstance(gk[1], TimePoint)
            else gk[1],
        )

    cols: list[Column] = []
    if by_key:
        src = t.table.column(t.meta.key)
        cols.append(
            Column(t.meta.key, [gk[0] for gk in ordered], src.kind, src.time_kind)
        )
    if bucket is not None:
        if bucket == "yearmonth":
            cols.append(
                Column(
                    bucket,
                    [gk[1] for gk in ordered],
                    Kind.TIME,
                    TimeKind.YEARMONTH,
                )
            )
        else:
            cols.append(Column(bucket, [gk[1] for gk in ordered], Kind.INT64))
    for out, (op, col_name) in aggs.items():
        src = t.table.column(col_name)
        values = [
            _aggregate(op, [src.values[i] for i in groups[gk]]) for gk in ordered
        ]
        cols.append(Column(out, values, _agg_kind(op, src)))

    result = Table(cols)
    if not (by_key and bucket is not None):
        return result

    index_kind = TimeKind.YEARMONTH if bucket == "yearmonth" else None
    count_groups: dict[Any, list[int]] = {}
    for gk in ordered:
        count_groups.setdefault(gk[0], []).append(
            _calendar.index_count(gk[1]) if isinstance(gk[1], TimePoint) else gk[1]
        )
    step, defaulted = _calendar.step_from_count_groups(list(count_groups.values()))
    meta = CubbleMeta(
        key=t.meta.key,
        index=bucket,
        coords=t.meta.coords,
        coord_mode=t.meta.coord_mode,
        index_kind=index_kind,
        interval=None if defaulted else step,
    )
    return TemporalTable(result, t.sidecar, meta)


def combine_sites(parts: Sequence[SpatialTable]) -> SpatialTable:
    """Row-concatenate spatial faces with disjoint keys, preserving order."""
    if not parts:
        raise CubbleError("no parts to combine")
    first = parts[0]
    if len(parts) == 1:
        return first
    cell_schema = None
    seen_keys: set = set()
    for p in parts:
        if p.meta != first.meta:
            raise CubbleError("parts disagree on key/index/coords metadata")
        if p.table.schema() != first.table.schema():
            raise CubbleError("parts disagree on spatial columns")
        sch = p.ts_schema()
        if sch is not None:
            if cell_schema is None:
                cell_schema = sch
            elif sch != cell_schema:
                raise CubbleError("parts disagree on nested ts schema")
        for k in p.keys():
            if k in seen_keys:
                raise CubbleError(
                    f"a cubble requires unique site ids; key {k!r} appears in "
                    "more than one part"
                )
            seen_keys.add(k)
    return SpatialTable(Table.concat([p.table for p in parts]), first.meta)


def flatten(s: SpatialTable) -> Table:
    """Join the spatial columns onto every temporal row (the long, wide form)."""
    meta = s.meta
    cells = s.table.column(TS_COLUMN).values
    spatial_cols = [c for c in s.table.columns if c.name != TS_COLUMN]
    counts = [cell.nrow for cell in cells]

    out: list[Column] = []
    for col in spatial_cols:
        vals: list[Any] = []
        for v, n in zip(col.values, counts):
            vals.extend([v] * n)
        out.append(Column(col.name, vals, col.kind, col.time_kind))
    if cells:
        for j, proto in enumerate(cells[0].columns):
            vals = []
            for cell in cells:
                vals.extend(cell.columns[j].values)
            out.append(Column(proto.name, vals, proto.kind, proto.time_kind))
    return Table(out)


def cubble_footprint(c: Cubble) -> int:
    """Bytes of the face's compact columnar encoding (sidecar included)."""
    if isinstance(c, SpatialTable):
        return footprint_bytes(c.table)
    return footprint_bytes(c.table) + footprint_bytes(c.sidecar)


def _kind_label(col: Column) -> str:
    if col.kind is Kind.TIME and col.time_kind is not None:
        return col.time_kind.label
    return col.kind.value


def spatial_header(s: SpatialTable) -> list[str]:
    """Human-readable summary lines for the nested face."""
    meta = s.meta
    lines = [f"key: {meta.key} [{s.n_sites}], index: {meta.index}, nested form"]
    xs = [v for v in s.table.column(meta.coords[0]).values if not is_missing(v)]
    ys = [v for v in s.table.column(meta.coords[1]).values if not is_missing(v)]
    if xs and ys:
        lines.append(
            f"extent: [{min(xs):g}, {min(ys):g}, {max(xs):g}, {max(ys):g}] "
            f"({meta.coord_mode.value})"
        )
    schema = s.ts_schema()
    if schema:
        rendered = ", ".join(
            f"{name} [{tk.label if tk is not None else kind.value}]"
            for name, kind, tk in schema
        )
        lines.append(f"temporal: {rendered}")
    return lines


def temporal_header(t: TemporalTable) -> list[str]:
    """Human-readable summary lines for the long face, with span and gaps."""
    meta = t.meta
    lines = [f"key: {meta.key} [{len(t.keys())}], index: {meta.index}, long form"]
    idx = t.table.column(meta.index)
    if len(idx):
        counts = [_calendar.index_count(v) for v in idx.values]
        lo, hi = min(counts), max(counts)
        interval = _calendar.infer_interval(t)
        gap_flags = _calendar.has_gaps(t).column("gaps").values
        gaps = "has gaps!" if any(gap_flags) else "no gaps"
        lines.append(
            f"span: {_fmt_index(lo, meta.index_kind)} -- {_fmt_index(hi, meta.index_kind)} "
            f"[{interval.label()}], {gaps}"
        )
    rendered = ", ".join(
        f"{c.name} [{_kind_label(c)}]"
        for c in t.sidecar.columns
        if c.name != meta.key
    )
    lines.append(f"spatial: {rendered}")
    return lines


def _fmt_index(count: int, kind: TimeKind | None) -> str:
    if kind is None:
        return str(count)
    return TimePoint(kind, count).iso()
