"""Time-index intervals and gap handling on the temporal face.

A gap is a (key, index) combination absent from a site's observed span
at the inferred regular interval. Spans are per key, not global, so no
rows are fabricated outside a site's own observation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .table import (
    MISSING,
    Column,
    CubbleError,
    Kind,
    Table,
    TimeKind,
    TimePoint,
    kind_of,
)

__all__ = [
    "Interval",
    "TimeKind",
    "TimePoint",
    "infer_interval",
    "has_gaps",
    "scan_gaps",
    "fill_gaps",
]


@dataclass(frozen=True)
class Interval:
    """A regular step of `step` base units of `kind` (None = integer index)."""

    kind: TimeKind | None
    step: int
    defaulted: bool = False

    def __post_init__(self):
        if self.step < 1:
            raise CubbleError(f"interval step must be >= 1, got {self.step}")

    def label(self) -> str:
        short = self.kind.short if self.kind is not None else ""
        return f"{self.step}{short}"


def index_count(value: Any) -> int:
    """Integer position of an index value (TimePoint count or the int itself)."""
    if isinstance(value, TimePoint):
        return value.count
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise CubbleError(f"index values must be time points or integers, got {value!r}")


def step_from_count_groups(groups: list[list[int]]) -> tuple[int, bool]:
    """GCD of successive differences across sorted count series.

    Returns (step, defaulted): step falls back to 1 with defaulted=True
    when no series has two observations.
    """
    step = 0
    for counts in groups:
        prev = None
        for c in sorted(counts):
            if prev is not None:
                diff = c - prev
                if diff > 0:
                    step = math.gcd(step, diff)
            prev = c
    if step == 0:
        return 1, True
    return step, False


def _per_key_counts(t) -> dict[Any, list[int]]:
    key_col = t.table.column(t.meta.key)
    idx_col = t.table.column(t.meta.index)
    out: dict[Any, list[int]] = {}
    for k, v in zip(key_col.values, idx_col.values):
        out.setdefault(k, []).append(index_count(v))
    return out


def infer_interval(t) -> Interval:
    """Infer the regular interval of a temporal table.

    The step is the gcd of all positive successive index differences
    across all keys, tolerating sites observed at multiples of the base
    cadence.
    """
    groups = list(_per_key_counts(t).values())
    step, defaulted = step_from_count_groups(groups)
    return Interval(t.meta.index_kind, step, defaulted)


def _key_order(t) -> list[Any]:
    # Sidecar order covers sites with no observations as well.
    return list(t.sidecar.column(t.meta.key).values)


def has_gaps(t) -> Table:
    """Per-key gap flag: does the index miss any point of its min..max stride?"""
    step = infer_interval(t).step
    per_key = _per_key_counts(t)
    keys = _key_order(t)
    flags = []
    for k in keys:
        counts = per_key.get(k, [])
        flags.append(_series_has_gaps(counts, step))
    key_src = t.sidecar.column(t.meta.key)
    return Table(
        [
            Column(t.meta.key, keys, key_src.kind, key_src.time_kind),
            Column("gaps", flags, Kind.BOOL),
        ]
    )


def _series_has_gaps(counts: list[int], step: int) -> bool:
    if len(counts) < 2:
        return False
    lo, hi = min(counts), max(counts)
    expected = (hi - lo) // step + 1
    if len(counts) != expected:
        return True
    return any((c - lo) % step != 0 for c in counts)


def _missing_counts(counts: list[int], step: int) -> list[int]:
    if len(counts) < 2:
        return []
    present = set(counts)
    lo, hi = min(counts), max(counts)
    return [c for c in range(lo, hi + 1, step) if c not in present]


def _count_to_index(count: int, kind: TimeKind | None) -> Any:
    return count if kind is None else TimePoint(kind, count)


def scan_gaps(t) -> Table:
    """All absent (key, index) pairs inside each key's span, sorted."""
    step = infer_interval(t).step
    per_key = _per_key_counts(t)
    kind = t.meta.index_kind
    key_src = t.sidecar.column(t.meta.key)
    keys_out: list[Any] = []
    idx_out: list[Any] = []
    for k in sorted(per_key):
        for c in _missing_counts(per_key[k], step):
            keys_out.append(k)
            idx_out.append(_count_to_index(c, kind))
    return Table(
        [
            Column(t.meta.key, keys_out, key_src.kind, key_src.time_kind),
            Column(t.meta.index, idx_out,
                   Kind.INT64 if kind is None else Kind.TIME,
                   kind),
        ]
    )


def fill_gaps(t, fill: Mapping[str, Any] | None = None):
    """Insert the scan_gaps rows, filling variables with MISSING or constants.

    `fill` maps column names to fill constants; unmapped columns get
    MISSING. Existing rows are untouched; the result is re-sorted into
    the canonical (site order, index) layout.
    """
    from .core import TemporalTable

    fill = dict(fill or {})
    data_cols = [c for c in t.table.columns if c.name not in (t.meta.key, t.meta.index)]
    for name, value in fill.items():
        matches = [c for c in data_cols if c.name == name]
        if not matches:
            raise CubbleError(f"fill column {name!r} is not a temporal variable")
        col = matches[0]
        vk = kind_of(value)
        if vk is None:
            continue  # MISSING is always acceptable
        if vk is not col.kind and not (col.kind is Kind.FLOAT64 and vk is Kind.INT64):
            raise CubbleError(
                f"fill value for {name!r} is {vk.value}, column is {col.kind.value}"
            )

    gaps = scan_gaps(t)
    if gaps.nrow == 0:
        return t
    new_cols = []
    for col in t.table.columns:
        if col.name == t.meta.key:
            add = list(gaps.column(t.meta.key).values)
        elif col.name == t.meta.index:
            add = list(gaps.column(t.meta.index).values)
        else:
            add = [fill.get(col.name, MISSING)] * gaps.nrow
        new_cols.append(Column(col.name, list(col.values) + add, col.kind, col.time_kind))
    table = Table(new_cols)

    order = {k: i for i, k in enumerate(_key_order(t))}
    key_vals = table.column(t.meta.key).values
    idx_vals = table.column(t.meta.index).values
    table = table.sort_by(lambda i: (order[key_vals[i]], index_count(idx_vals[i])))
    return TemporalTable(table, t.sidecar, t.meta)
