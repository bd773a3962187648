"""Spatio-temporal tables with a nested spatial face and a long temporal face."""

from .calendar import Interval, fill_gaps, has_gaps, infer_interval, scan_gaps
from .core import (
    CoordMode,
    Cubble,
    CubbleMeta,
    CubbleWarning,
    SpatialTable,
    TemporalTable,
    combine_sites,
    coords_of,
    cubble_footprint,
    derive_col,
    face_spatial,
    face_temporal,
    filter_rows,
    flatten,
    from_flat,
    index_var,
    key_data,
    key_vars,
    make_cubble,
    select_cols,
    spatial_header,
    spatial_of,
    summarise_by,
    temporal_header,
    unfold,
)
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
)

__version__ = "0.1.0"

__all__ = [
    "MISSING",
    "Column",
    "CoordMode",
    "Cubble",
    "CubbleError",
    "CubbleMeta",
    "CubbleWarning",
    "Interval",
    "KeyReport",
    "Kind",
    "SpatialTable",
    "Table",
    "TemporalTable",
    "TimeKind",
    "TimePoint",
    "check_key",
    "combine_sites",
    "coords_of",
    "cubble_footprint",
    "derive_col",
    "face_spatial",
    "face_temporal",
    "fill_gaps",
    "filter_rows",
    "flatten",
    "footprint_bytes",
    "from_flat",
    "has_gaps",
    "index_var",
    "infer_interval",
    "is_missing",
    "key_data",
    "key_vars",
    "make_cubble",
    "scan_gaps",
    "select_cols",
    "spatial_header",
    "spatial_of",
    "summarise_by",
    "temporal_header",
    "unfold",
]
