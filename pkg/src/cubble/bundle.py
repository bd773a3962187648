"""On-disk cubble bundle: meta.json + spatial.csv + temporal.csv.

The two CSVs hold the split tables (RFC 4180, ISO 8601 time values,
empty field = missing); meta.json records the column roles and index
cadence. Loading reconstitutes the cubble via make_cubble, so spatial
rows without observations do not survive a round trip.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

from .core import (
    CoordMode,
    CubbleWarning,
    SpatialTable,
    TS_COLUMN,
    face_temporal,
    make_cubble,
)
from .ingest import read_csv, write_csv
from .table import CubbleError, Kind, TimeKind

META_FILE = "meta.json"
SPATIAL_FILE = "spatial.csv"
TEMPORAL_FILE = "temporal.csv"


def save_bundle(s: SpatialTable, directory: "str | Path") -> Path:
    """Write a cubble to a bundle directory (created if needed)."""
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    meta = s.meta
    doc = {
        "key": meta.key,
        "index": meta.index,
        "coords": list(meta.coords),
        "coord_mode": meta.coord_mode.value,
        "index_kind": meta.index_kind.label if meta.index_kind else None,
        "interval": meta.interval,
    }
    (path / META_FILE).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    write_csv(s.table.without([TS_COLUMN]), str(path / SPATIAL_FILE))
    write_csv(face_temporal(s).table, str(path / TEMPORAL_FILE))
    return path


def load_bundle(directory: "str | Path") -> SpatialTable:
    """Reconstitute a cubble from a bundle directory."""
    path = Path(directory)
    meta_path = path / META_FILE
    if not meta_path.exists():
        raise CubbleError(f"not a cubble bundle (no {META_FILE}): {path}")
    doc = json.loads(meta_path.read_text(encoding="utf-8"))
    for field in ("key", "index", "coords"):
        if field not in doc:
            raise CubbleError(f"bundle meta lacks {field!r}")
    index_kind = (
        TimeKind.from_label(doc["index_kind"]) if doc.get("index_kind") else None
    )
    coord_mode = CoordMode(doc.get("coord_mode", "geographic"))

    index_spec = index_kind if index_kind is not None else Kind.INT64
    spatial = read_csv(str(path / SPATIAL_FILE))
    temporal = read_csv(str(path / TEMPORAL_FILE), schema={doc["index"]: index_spec})

    key = doc["key"]
    if spatial.has_column(key) and temporal.has_column(key):
        s_kind = spatial.column(key).kind
        if temporal.column(key).kind is not s_kind:
            # re-read pinning the spatial key kind on both sides
            spec = s_kind if s_kind is not Kind.TIME else Kind.TEXT
            spatial = read_csv(str(path / SPATIAL_FILE), schema={key: spec})
            temporal = read_csv(
                str(path / TEMPORAL_FILE),
                schema={doc["index"]: index_spec, key: spec},
            )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CubbleWarning)
        cubble, _ = make_cubble(
            spatial,
            temporal,
            key=key,
            index=doc["index"],
            coords=tuple(doc["coords"]),
            coord_mode=coord_mode,
        )
    return cubble
