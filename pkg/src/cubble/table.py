"""Columnar table primitives: typed scalars, columns, and tables.

Values are immutable after construction; every operation returns a new
value, so tables are safe to share across threads.
"""

from __future__ import annotations

import datetime as _dt
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Sequence


class CubbleError(Exception):
    """Raised when a table or cubble contract is violated."""


class _Missing:
    """Sentinel for a missing cell. Compares equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()


def is_missing(value: Any) -> bool:
    return value is MISSING


class TimeKind(Enum):
    """Supported time-index kinds. Each kind counts whole base units."""

    DATE = ("date", "days", "D")
    DATETIME = ("datetime", "seconds", "s")
    YEARMONTH = ("yearmonth", "months", "M")
    YEARWEEK = ("yearweek", "weeks", "W")
    YEARQUARTER = ("yearquarter", "quarters", "Q")

    def __init__(self, label: str, base_unit: str, short: str):
        self.label = label
        self.base_unit = base_unit
        self.short = short

    @classmethod
    def from_label(cls, label: str) -> "TimeKind":
        for kind in cls:
            if kind.label == label:
                return kind
        raise CubbleError(f"unknown time kind {label!r}")


_EPOCH_ORDINAL = _dt.date(1970, 1, 1).toordinal()
# Monday of the first ISO week of 1970.
_EPOCH_WEEK_ORDINAL = _dt.date(1969, 12, 29).toordinal()

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}Z?$")
_YEARMONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")
_YEARWEEK_RE = re.compile(r"^(\d{4})-W(\d{2})$")
_YEARQUARTER_RE = re.compile(r"^(\d{4})-Q([1-4])$")


@dataclass(frozen=True, order=False)
class TimePoint:
    """A point on a regular calendar: an integer count of base units.

    Counts are relative to 1970 (days, seconds, months, ISO weeks or
    quarters since the epoch, depending on ``kind``).
    """

    kind: TimeKind
    count: int

    def _check_kind(self, other: "TimePoint") -> None:
        if not isinstance(other, TimePoint):
            raise TypeError(f"cannot compare TimePoint with {type(other).__name__}")
        if other.kind is not self.kind:
            raise CubbleError(
                f"cannot mix time kinds {self.kind.label} and {other.kind.label}"
            )

    def __lt__(self, other: "TimePoint") -> bool:
        self._check_kind(other)
        return self.count < other.count

    def __le__(self, other: "TimePoint") -> bool:
        self._check_kind(other)
        return self.count <= other.count

    def __gt__(self, other: "TimePoint") -> bool:
        self._check_kind(other)
        return self.count > other.count

    def __ge__(self, other: "TimePoint") -> bool:
        self._check_kind(other)
        return self.count >= other.count

    def add(self, steps: int) -> "TimePoint":
        return TimePoint(self.kind, self.count + steps)

    def to_date(self) -> _dt.date:
        """Representative calendar date (first day of the period)."""
        k = self.kind
        if k is TimeKind.DATE:
            return _dt.date.fromordinal(_EPOCH_ORDINAL + self.count)
        if k is TimeKind.DATETIME:
            return (_dt.datetime(1970, 1, 1) + _dt.timedelta(seconds=self.count)).date()
        if k is TimeKind.YEARMONTH:
            year, month = divmod(self.count, 12)
            return _dt.date(1970 + year, month + 1, 1)
        if k is TimeKind.YEARWEEK:
            return _dt.date.fromordinal(_EPOCH_WEEK_ORDINAL + 7 * self.count)
        year, quarter = divmod(self.count, 4)
        return _dt.date(1970 + year, 3 * quarter + 1, 1)

    def iso(self) -> str:
        k = self.kind
        if k is TimeKind.DATE:
            return self.to_date().isoformat()
        if k is TimeKind.DATETIME:
            stamp = _dt.datetime(1970, 1, 1) + _dt.timedelta(seconds=self.count)
            return stamp.strftime("%Y-%m-%dT%H:%M:%SZ")
        if k is TimeKind.YEARMONTH:
            year, month = divmod(self.count, 12)
            return f"{1970 + year:04d}-{month + 1:02d}"
        if k is TimeKind.YEARWEEK:
            iso_year, iso_week, _ = self.to_date().isocalendar()
            return f"{iso_year:04d}-W{iso_week:02d}"
        year, quarter = divmod(self.count, 4)
        return f"{1970 + year:04d}-Q{quarter + 1}"

    def __repr__(self) -> str:
        return f"TimePoint({self.kind.label}, {self.iso()})"

    @staticmethod
    def from_date(value: _dt.date) -> "TimePoint":
        return TimePoint(TimeKind.DATE, value.toordinal() - _EPOCH_ORDINAL)

    @staticmethod
    def from_datetime(value: _dt.datetime) -> "TimePoint":
        seconds = int((value - _dt.datetime(1970, 1, 1)).total_seconds())
        return TimePoint(TimeKind.DATETIME, seconds)

    @staticmethod
    def yearmonth(year: int, month: int) -> "TimePoint":
        if not 1 <= month <= 12:
            raise CubbleError(f"month out of range: {month}")
        return TimePoint(TimeKind.YEARMONTH, (year - 1970) * 12 + month - 1)

    @staticmethod
    def yearweek(year: int, week: int) -> "TimePoint":
        monday = _dt.date.fromisocalendar(year, week, 1)
        return TimePoint(TimeKind.YEARWEEK, (monday.toordinal() - _EPOCH_WEEK_ORDINAL) // 7)

    @staticmethod
    def yearquarter(year: int, quarter: int) -> "TimePoint":
        if not 1 <= quarter <= 4:
            raise CubbleError(f"quarter out of range: {quarter}")
        return TimePoint(TimeKind.YEARQUARTER, (year - 1970) * 4 + quarter - 1)

    @staticmethod
    def parse(text: str, kind: TimeKind | None = None) -> "TimePoint":
        """Parse ISO text into a TimePoint, optionally forcing a kind."""
        if kind is None:
            kind = _sniff_time_kind(text)
            if kind is None:
                raise CubbleError(f"not a recognised time value: {text!r}")
        if kind is TimeKind.DATE:
            if not _DATE_RE.match(text):
                raise CubbleError(f"not an ISO date: {text!r}")
            return TimePoint.from_date(_dt.date.fromisoformat(text))
        if kind is TimeKind.DATETIME:
            if not _DATETIME_RE.match(text):
                raise CubbleError(f"not an ISO datetime: {text!r}")
            clean = text.rstrip("Z").replace(" ", "T")
            return TimePoint.from_datetime(_dt.datetime.fromisoformat(clean))
        if kind is TimeKind.YEARMONTH:
            m = _YEARMONTH_RE.match(text)
            if not m:
                raise CubbleError(f"not a year-month: {text!r}")
            return TimePoint.yearmonth(int(m.group(1)), int(m.group(2)))
        if kind is TimeKind.YEARWEEK:
            m = _YEARWEEK_RE.match(text)
            if not m:
                raise CubbleError(f"not a year-week: {text!r}")
            return TimePoint.yearweek(int(m.group(1)), int(m.group(2)))
        m = _YEARQUARTER_RE.match(text)
        if not m:
            raise CubbleError(f"not a year-quarter: {text!r}")
        return TimePoint.yearquarter(int(m.group(1)), int(m.group(2)))


def _sniff_time_kind(text: str) -> TimeKind | None:
    if _DATE_RE.match(text):
        return TimeKind.DATE
    if _DATETIME_RE.match(text):
        return TimeKind.DATETIME
    if _YEARMONTH_RE.match(text):
        return TimeKind.YEARMONTH
    if _YEARWEEK_RE.match(text):
        return TimeKind.YEARWEEK
    if _YEARQUARTER_RE.match(text):
        return TimeKind.YEARQUARTER
    return None


class Kind(Enum):
    """Column value kinds."""

    FLOAT64 = "float"
    INT64 = "int"
    TEXT = "text"
    BOOL = "bool"
    TIME = "time"
    NESTED = "nested"


def kind_of(value: Any) -> Kind | None:
    """Kind of a single scalar; None for MISSING."""
    if value is MISSING:
        return None
    if isinstance(value, bool):
        return Kind.BOOL
    if isinstance(value, int):
        return Kind.INT64
    if isinstance(value, float):
        return Kind.FLOAT64
    if isinstance(value, str):
        return Kind.TEXT
    if isinstance(value, TimePoint):
        return Kind.TIME
    if isinstance(value, Table):
        return Kind.NESTED
    raise CubbleError(f"unsupported scalar type {type(value).__name__}")


class Column:
    """A named, homogeneously typed sequence of scalars (MISSING allowed).

    Mixed int/float input is promoted to float; any other kind mix is an
    error. Time columns additionally require a single TimeKind.
    """

    __slots__ = ("name", "values", "kind", "time_kind")

    def __init__(
        self,
        name: str,
        values: Iterable[Any],
        kind: Kind | None = None,
        time_kind: TimeKind | None = None,
    ):
        if not name:
            raise CubbleError("column name must be non-empty")
        vals = [MISSING if v is None else v for v in values]
        inferred, inferred_tk = _scan_kinds(name, vals)
        if kind is None:
            kind = inferred if inferred is not None else Kind.TEXT
        elif inferred is not None and inferred is not kind:
            if kind is Kind.FLOAT64 and inferred is Kind.INT64:
                pass  # promotion below
            else:
                raise CubbleError(
                    f"column {name!r}: values are {inferred.value}, declared {kind.value}"
                )
        if kind is Kind.FLOAT64:
            vals = [float(v) if isinstance(v, int) and not isinstance(v, bool) else v
                    for v in vals]
        if kind is Kind.TIME:
            if time_kind is None:
                time_kind = inferred_tk
            elif inferred_tk is not None and inferred_tk is not time_kind:
                raise CubbleError(
                    f"column {name!r}: values are {inferred_tk.label}, "
                    f"declared {time_kind.label}"
                )
        elif time_kind is not None:
            raise CubbleError(f"column {name!r}: time_kind only valid for time columns")
        self.name = name
        self.values = tuple(vals)
        self.kind = kind
        self.time_kind = time_kind

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.values)

    def __getitem__(self, i: int) -> Any:
        return self.values[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Column):
            return NotImplemented
        return (
            self.name == other.name
            and self.kind is other.kind
            and self.time_kind is other.time_kind
            and self.values == other.values
        )

    def __hash__(self):
        raise TypeError("Column is not hashable")

    def __repr__(self) -> str:
        return f"Column({self.name!r}, {self.kind.value}, n={len(self.values)})"

    def rename(self, name: str) -> "Column":
        return Column(name, self.values, self.kind, self.time_kind)

    def take(self, indices: Sequence[int]) -> "Column":
        vals = self.values
        return Column(self.name, [vals[i] for i in indices], self.kind, self.time_kind)

    def is_numeric(self) -> bool:
        return self.kind in (Kind.FLOAT64, Kind.INT64)

    def schema(self) -> tuple:
        return (self.name, self.kind, self.time_kind)


def _scan_kinds(name: str, vals: list) -> tuple[Kind | None, TimeKind | None]:
    seen: Kind | None = None
    time_kind: TimeKind | None = None
    for v in vals:
        k = kind_of(v)
        if k is None:
            continue
        if k is Kind.TIME:
            tk = v.kind
            if time_kind is None:
                time_kind = tk
            elif time_kind is not tk:
                raise CubbleError(
                    f"column {name!r} mixes time kinds "
                    f"{time_kind.label} and {tk.label}"
                )
        if seen is None:
            seen = k
        elif seen is not k:
            if {seen, k} == {Kind.INT64, Kind.FLOAT64}:
                seen = Kind.FLOAT64
            else:
                raise CubbleError(
                    f"column {name!r} mixes kinds {seen.value} and {k.value}"
                )
    return seen, time_kind


class Table:
    """An ordered collection of equally long, uniquely named columns."""

    __slots__ = ("columns", "_index")

    def __init__(self, columns: Sequence[Column]):
        cols = list(columns)
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise CubbleError(f"duplicate column names: {dupes}")
        if cols:
            n = len(cols[0])
            for c in cols:
                if len(c) != n:
                    raise CubbleError(
                        f"column {c.name!r} has length {len(c)}, expected {n}"
                    )
        self.columns = tuple(cols)
        self._index = {c.name: i for i, c in enumerate(cols)}

    @classmethod
    def from_dict(cls, data: dict[str, Iterable[Any]]) -> "Table":
        return cls([Column(name, values) for name, values in data.items()])

    @property
    def nrow(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def ncol(self) -> int:
        return len(self.columns)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def has_column(self, name: str) -> bool:
        return name in self._index

    def column(self, name: str) -> Column:
        try:
            return self.columns[self._index[name]]
        except KeyError:
            raise CubbleError(f"no such column: {name!r}") from None

    def select(self, names: Sequence[str]) -> "Table":
        return Table([self.column(n) for n in names])

    def without(self, names: Sequence[str]) -> "Table":
        drop = set(names)
        return Table([c for c in self.columns if c.name not in drop])

    def with_column(self, col: Column) -> "Table":
        """Append a column, or replace one with the same name in place."""
        if col.name in self._index:
            cols = list(self.columns)
            cols[self._index[col.name]] = col
            return Table(cols)
        return Table(list(self.columns) + [col])

    def take(self, indices: Sequence[int]) -> "Table":
        return Table([c.take(indices) for c in self.columns])

    def filter(self, mask: Sequence[bool]) -> "Table":
        idx = [i for i, keep in enumerate(mask) if keep]
        return self.take(idx)

    def row(self, i: int) -> dict[str, Any]:
        return {c.name: c.values[i] for c in self.columns}

    def rows(self) -> Iterator[dict[str, Any]]:
        for i in range(self.nrow):
            yield self.row(i)

    def sort_by(self, key: Callable[[int], Any]) -> "Table":
        order = sorted(range(self.nrow), key=key)
        return self.take(order)

    @classmethod
    def concat(cls, parts: Sequence["Table"]) -> "Table":
        if not parts:
            raise CubbleError("cannot concatenate zero tables")
        first = parts[0]
        for p in parts[1:]:
            if p.schema() != first.schema():
                raise CubbleError("cannot concatenate tables with different schemas")
        cols = []
        for j, col in enumerate(first.columns):
            vals: list[Any] = []
            for p in parts:
                vals.extend(p.columns[j].values)
            cols.append(Column(col.name, vals, col.kind, col.time_kind))
        return cls(cols)

    def schema(self) -> tuple:
        return tuple(c.schema() for c in self.columns)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Table):
            return NotImplemented
        return self.columns == other.columns

    def __hash__(self):
        raise TypeError("Table is not hashable")

    def __repr__(self) -> str:
        return f"Table({self.nrow} x {self.ncol}: {', '.join(self.names)})"


def scalar_to_text(value: Any) -> str:
    """Canonical text form of a scalar (used by CSV output and keys)."""
    if value is MISSING:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, TimePoint):
        return value.iso()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _scalar_bytes(value: Any) -> int:
    if value is MISSING:
        return 0
    if isinstance(value, bool):
        return 1
    if isinstance(value, str):
        return 4 + len(value.encode("utf-8"))
    # int, float and time points occupy one 8-byte slot
    return 8


_TABLE_FIXED = 16
_NAME_SLOT = 8
_CELL_POINTER = 8


def footprint_bytes(table: Table) -> int:
    """Size of a compact columnar encoding of *table*, in bytes.

    The model charges each column a validity bitmap plus per-value data
    bytes; a nested column stores its cell schema once (cells share one
    schema by construction) plus one offset per cell. This measures the
    layout's storage economics independent of interpreter object layout.
    """
    total = _TABLE_FIXED
    for col in table.columns:
        total += len(col.name.encode("utf-8")) + _NAME_SLOT
        if col.kind is Kind.NESTED:
            total += _CELL_POINTER * len(col)
            schema_counted = False
            for cell in col.values:
                if cell is MISSING:
                    continue
                if not schema_counted:
                    total += _TABLE_FIXED
                    for sub in cell.columns:
                        total += len(sub.name.encode("utf-8")) + _NAME_SLOT
                    schema_counted = True
                for sub in cell.columns:
                    total += _column_data_bytes(sub)
        else:
            total += _column_data_bytes(col)
    return total


def _column_data_bytes(col: Column) -> int:
    n = len(col)
    total = math.ceil(n / 8)  # validity bitmap
    for v in col.values:
        total += _scalar_bytes(v)
    return total
