"""CSV reading/writing with type inference, and NetCDF grid coercion.

CSV follows RFC 4180 with ISO 8601 time values; an empty field is a
missing value. Inference tries int, float, date, datetime, bool, then
falls back to text — so text that happens to look numeric does not
survive a round trip untyped; pass a `schema` to pin kinds.
"""

from __future__ import annotations

import csv
import datetime as _dt
import re
from typing import Any, Iterable, Mapping, Sequence

from .core import CoordMode, CubbleMeta, SpatialTable, TS_COLUMN
from .netcdf import NcFile, NcVar, NetcdfError
from .table import (
    MISSING,
    Column,
    CubbleError,
    Kind,
    Table,
    TimeKind,
    TimePoint,
    scalar_to_text,
)

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}Z?$")

ColumnSchema = Mapping[str, "Kind | TimeKind"]


def _parse_as(text: str, spec: "Kind | TimeKind") -> Any:
    if isinstance(spec, TimeKind):
        return TimePoint.parse(text, spec)
    if spec is Kind.INT64:
        if not _INT_RE.match(text):
            raise CubbleError(f"not an integer: {text!r}")
        return int(text)
    if spec is Kind.FLOAT64:
        if not _FLOAT_RE.match(text):
            raise CubbleError(f"not a number: {text!r}")
        return float(text)
    if spec is Kind.BOOL:
        if text == "true":
            return True
        if text == "false":
            return False
        raise CubbleError(f"not a boolean: {text!r}")
    if spec is Kind.TEXT:
        return text
    raise CubbleError(f"cannot parse CSV cells as {spec}")


def _infer_spec(values: list[str]) -> "Kind | TimeKind":
    present = [v for v in values if v != ""]
    if not present:
        return Kind.TEXT
    if all(_INT_RE.match(v) for v in present):
        return Kind.INT64
    if all(_FLOAT_RE.match(v) for v in present):
        return Kind.FLOAT64
    if all(_DATE_RE.match(v) for v in present):
        try:
            for v in present:
                _dt.date.fromisoformat(v)
            return TimeKind.DATE
        except ValueError:
            return Kind.TEXT
    if all(_DATETIME_RE.match(v) for v in present):
        return TimeKind.DATETIME
    if all(v in ("true", "false") for v in present):
        return Kind.BOOL
    return Kind.TEXT


def read_csv(path: str, schema: ColumnSchema | None = None) -> Table:
    """Parse an RFC 4180 file into a typed table.

    `schema` pins individual columns to a Kind or a TimeKind; everything
    else is inferred.
    """
    schema = dict(schema or {})
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise CubbleError(f"{path}: empty CSV") from None
        raw: list[list[str]] = [[] for _ in header]
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise CubbleError(
                    f"{path}:{line_no}: expected {len(header)} fields, got {len(row)}"
                )
            for cell, bucket in zip(row, raw):
                bucket.append(cell)

    cols = []
    for name, values in zip(header, raw):
        spec = schema.get(name) or _infer_spec(values)
        parsed = [MISSING if v == "" else _parse_as(v, spec) for v in values]
        if isinstance(spec, TimeKind):
            cols.append(Column(name, parsed, Kind.TIME, spec))
        else:
            cols.append(Column(name, parsed, spec))
    return Table(cols)


def write_csv(table: Table, path: str) -> None:
    """Write a table as RFC 4180 with ISO time values; MISSING as empty."""
    for col in table.columns:
        if col.kind is Kind.NESTED:
            raise CubbleError("nested columns cannot be written to CSV")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(table.names)
        for i in range(table.nrow):
            writer.writerow(
                [scalar_to_text(c.values[i]) for c in table.columns]
            )


_LON_NAMES = ("lon", "long", "longitude")
_LAT_NAMES = ("lat", "latitude")
_TIME_NAMES = ("time",)

_UNITS_RE = re.compile(
    r"^\s*(seconds|hours|days)\s+since\s+(.+?)\s*$", re.IGNORECASE
)


def _find_coord_var(nc: NcFile, names: Sequence[str]) -> NcVar | None:
    for v in nc.vars:
        if v.name.lower() in names and len(v.dim_ids) == 1:
            return v
    return None


def _decode_time(values: list, attrs: Mapping[str, Any]) -> tuple[list[TimePoint], TimeKind]:
    units = attrs.get("units")
    if not isinstance(units, str):
        raise NetcdfError("time variable lacks a textual `units` attribute")
    m = _UNITS_RE.match(units)
    if not m:
        raise NetcdfError(f"unsupported time units: {units!r}")
    unit = m.group(1).lower()
    instant = m.group(2).strip().rstrip("Z").replace(" ", "T")
    date_only = "T" not in instant
    if date_only:
        base_date = _dt.date.fromisoformat(instant)
        base = TimePoint.from_date(base_date)
        base_seconds = TimePoint.from_datetime(
            _dt.datetime(base_date.year, base_date.month, base_date.day)
        ).count
    else:
        base_dt = _dt.datetime.fromisoformat(instant)
        base = TimePoint.from_date(base_dt.date())
        base_seconds = TimePoint.from_datetime(base_dt).count

    def _int(v: Any) -> int:
        f = float(v)
        if f != int(f):
            raise NetcdfError(f"non-integral time offset: {v!r}")
        return int(f)

    if unit == "days":
        if not date_only:
            raise NetcdfError("days-based units require a date origin")
        return [base.add(_int(v)) for v in values], TimeKind.DATE
    factor = 3600 if unit == "hours" else 1
    points = [
        TimePoint(TimeKind.DATETIME, base_seconds + factor * _int(v)) for v in values
    ]
    return points, TimeKind.DATETIME


def _kept_indices(values: list[float], wanted: Iterable[float] | None) -> list[int]:
    if wanted is None:
        return list(range(len(values)))
    allowed = {round(float(v), 6) for v in wanted}
    return [i for i, v in enumerate(values) if round(float(v), 6) in allowed]


def _fill_values(attrs: Mapping[str, Any]) -> set:
    out = set()
    for key in ("_FillValue", "missing_value"):
        v = attrs.get(key)
        if isinstance(v, (int, float)):
            out.add(v)
    return out


def nc_to_cubble(
    nc: NcFile,
    vars: Sequence[str],
    long_range: Iterable[float] | None = None,
    lat_range: Iterable[float] | None = None,
) -> SpatialTable:
    """Turn gridded NetCDF variables into a cubble of grid-cell sites.

    Cells are numbered 1..n in storage order (longitude fastest); each
    site's ts holds the time coordinate plus the requested time-varying
    variables. Variables laid out over (lat, lon) only become spatial
    columns. `long_range`/`lat_range` keep cells whose coordinates match
    the given value sets (compared at 6-decimal precision).
    """
    lon_var = _find_coord_var(nc, _LON_NAMES)
    lat_var = _find_coord_var(nc, _LAT_NAMES)
    time_var = _find_coord_var(nc, _TIME_NAMES)
    if lon_var is None or lat_var is None:
        raise NetcdfError("no longitude/latitude coordinate variables found")
    if time_var is None:
        raise NetcdfError("no time coordinate variable found")
    lon_dim = lon_var.dim_ids[0]
    lat_dim = lat_var.dim_ids[0]
    time_dim = time_var.dim_ids[0]

    _, lon_values = nc.read_var(lon_var.name)
    _, lat_values = nc.read_var(lat_var.name)
    _, time_raw = nc.read_var(time_var.name)
    time_points, time_kind = _decode_time(time_raw, time_var.attrs)

    keep_lon = _kept_indices(lon_values, long_range)
    keep_lat = _kept_indices(lat_values, lat_range)
    if not keep_lon or not keep_lat:
        raise NetcdfError("coordinate subset selects no grid cells")

    series_vars: list[tuple[NcVar, list]] = []
    static_vars: list[tuple[NcVar, list]] = []
    for name in vars:
        if not nc.has_var(name):
            raise NetcdfError(f"no such variable: {name!r}")
        v = nc.var(name)
        _, values = nc.read_var(name)
        if v.dim_ids == (time_dim, lat_dim, lon_dim):
            series_vars.append((v, values))
        elif v.dim_ids == (lat_dim, lon_dim):
            static_vars.append((v, values))
        else:
            raise NetcdfError(
                f"variable {name!r} is not laid out over (time, lat, lon) "
                "or (lat, lon)"
            )

    n_lon = len(lon_values)
    n_time = len(time_points)
    ids: list[int] = []
    site_lon: list[float] = []
    site_lat: list[float] = []
    statics: dict[str, list] = {v.name: [] for v, _ in static_vars}
    cells: list[Table] = []

    fills = {v.name: _fill_values(v.attrs) for v, _ in series_vars + static_vars}

    def _clean(var: NcVar, raw_value):
        return MISSING if raw_value in fills[var.name] else raw_value

    next_id = 1
    for i in keep_lat:
        for j in keep_lon:
            ids.append(next_id)
            next_id += 1
            site_lon.append(float(lon_values[j]))
            site_lat.append(float(lat_values[i]))
            for v, values in static_vars:
                statics[v.name].append(_clean(v, values[i * n_lon + j]))
            cell_cols = [
                Column(time_var.name, time_points, Kind.TIME, time_kind)
            ]
            for v, values in series_vars:
                kind = Kind.INT64 if v.kind == "int32" else Kind.FLOAT64
                cell = [
                    _clean(v, values[(t * len(lat_values) + i) * n_lon + j])
                    for t in range(n_time)
                ]
                cell_cols.append(Column(v.name, cell, kind))
            cells.append(Table(cell_cols))

    cols = [
        Column("id", ids, Kind.INT64),
        Column("long", site_lon, Kind.FLOAT64),
        Column("lat", site_lat, Kind.FLOAT64),
    ]
    for v, _ in static_vars:
        kind = Kind.INT64 if v.kind == "int32" else Kind.FLOAT64
        cols.append(Column(v.name, statics[v.name], kind))
    cols.append(Column(TS_COLUMN, cells, Kind.NESTED))

    from .calendar import step_from_count_groups

    step, defaulted = step_from_count_groups([[tp.count for tp in time_points]])
    meta = CubbleMeta(
        key="id",
        index=time_var.name,
        coords=("long", "lat"),
        coord_mode=CoordMode.GEOGRAPHIC,
        index_kind=time_kind,
        interval=None if defaulted else step,
    )
    return SpatialTable(Table(cols), meta)
