"""HTTP query-and-selection service for linked exploration.

Serves one cubble read-only, plus named selection groups that any
client may read, replace, and subscribe to. A map view and a series
view stay linked by writing their selections to the same group and
following its event stream; the service itself is view-agnostic and
only stores and broadcasts.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any
from urllib.parse import parse_qs, urlparse

from .core import SpatialTable, face_temporal
from .core import _aggregate as _agg  # shared missing-skipping aggregation
from .table import MISSING, CubbleError, TimePoint, scalar_to_text

SELECTION_SOURCES = ("map", "series", "api")

_AGGS = ("mean", "min", "max", "sum", "count", "var")


def _jsonable(value: Any) -> Any:
    if value is MISSING:
        return None
    if isinstance(value, TimePoint):
        return value.iso()
    return value


@dataclass(frozen=True)
class Selection:
    group: str
    keys: tuple
    source: str | None
    seq: int

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "keys": [_jsonable(k) for k in self.keys],
            "source": self.source,
            "seq": self.seq,
        }


class SelectionStore:
    """Per-group selection state with atomic replace and fan-out."""

    def __init__(self):
        self._lock = threading.Lock()
        self._state: dict[str, Selection] = {}
        self._subscribers: dict[str, list[queue.SimpleQueue]] = {}

    def get(self, group: str) -> Selection:
        with self._lock:
            return self._state.get(group) or Selection(group, (), None, 0)

    def replace(self, group: str, keys: tuple, source: str | None) -> Selection:
        with self._lock:
            seq = (self._state[group].seq if group in self._state else 0) + 1
            state = Selection(group, keys, source, seq)
            self._state[group] = state
            for q in self._subscribers.get(group, []):
                q.put(state)
        return state

    def subscribe(self, group: str) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            self._subscribers.setdefault(group, []).append(q)
            q.put(self._state.get(group) or Selection(group, (), None, 0))
        return q

    def unsubscribe(self, group: str, q: queue.SimpleQueue) -> None:
        with self._lock:
            subs = self._subscribers.get(group, [])
            if q in subs:
                subs.remove(q)


class CubbleService:
    """The served dataset plus selection state, independent of HTTP."""

    def __init__(self, cubble: SpatialTable):
        self.cubble = cubble
        self.temporal = face_temporal(cubble)
        self.store = SelectionStore()
        self._by_text = {scalar_to_text(k): k for k in cubble.keys()}
        meta = cubble.meta
        self._value_names = [
            c.name
            for c in self.temporal.table.columns
            if c.name not in (meta.key, meta.index)
        ]
        self._numeric_names = [
            n for n in self._value_names
            if self.temporal.table.column(n).is_numeric()
        ]
        key_vals = self.temporal.table.column(meta.key).values
        self._rows_by_key: dict[Any, list[int]] = {}
        for i, k in enumerate(key_vals):
            self._rows_by_key.setdefault(k, []).append(i)

    def meta_dict(self) -> dict:
        meta = self.cubble.meta
        return {
            "key": meta.key,
            "index": meta.index,
            "coords": list(meta.coords),
            "coord_mode": meta.coord_mode.value,
            "index_kind": meta.index_kind.label if meta.index_kind else None,
            "interval": meta.interval,
            "n_sites": self.cubble.n_sites,
            "temporal_vars": self._value_names,
        }

    def sites(self) -> list[dict]:
        side = self.cubble.spatial_columns()
        meta = self.cubble.meta
        out = []
        for i in range(side.nrow):
            row = {c.name: _jsonable(c.values[i]) for c in side.columns}
            key = side.column(meta.key).values[i]
            stats: dict[str, dict] = {}
            rows = self._rows_by_key.get(key, [])
            for name in self._numeric_names:
                col = self.temporal.table.column(name)
                vals = [col.values[j] for j in rows]
                stats[name] = {
                    "mean": _jsonable(_agg("mean", vals)),
                    "min": _jsonable(_agg("min", vals)),
                    "max": _jsonable(_agg("max", vals)),
                    "count": _agg("count", vals),
                }
            row["stats"] = stats
            out.append(row)
        return out

    def series(self, key_text: str, vars: list[str] | None, bucket: str) -> list[dict]:
        if key_text not in self._by_text:
            raise KeyError(key_text)
        key = self._by_text[key_text]
        meta = self.cubble.meta
        names = vars if vars else self._value_names
        for n in names:
            if n not in self._value_names:
                raise CubbleError(f"no temporal variable {n!r}")
        rows = self._rows_by_key.get(key, [])
        idx_col = self.temporal.table.column(meta.index)
        if bucket == "none":
            out = []
            for i in rows:
                rec = {meta.index: _jsonable(idx_col.values[i])}
                for n in names:
                    rec[n] = _jsonable(self.temporal.table.column(n).values[i])
                out.append(rec)
            return out
        if bucket != "month":
            raise CubbleError(f"unsupported bucket {bucket!r}")
        return self._monthly(rows, names, "mean")

    def _monthly(self, rows: list[int], names: list[str], agg: str) -> list[dict]:
        meta = self.cubble.meta
        idx_col = self.temporal.table.column(meta.index)
        by_month: dict[int, list[int]] = {}
        for i in rows:
            v = idx_col.values[i]
            if not isinstance(v, TimePoint):
                raise CubbleError("monthly buckets require a time index")
            by_month.setdefault(v.to_date().month, []).append(i)
        out = []
        for month in sorted(by_month):
            rec: dict[str, Any] = {"month": month}
            for n in names:
                col = self.temporal.table.column(n)
                if not col.is_numeric():
                    raise CubbleError(f"cannot aggregate non-numeric {n!r}")
                rec[n] = _jsonable(
                    _agg(agg, [col.values[i] for i in by_month[month]])
                )
            out.append(rec)
        return out

    def summary(self, agg: str, bucket: str, vars: list[str] | None) -> list[dict]:
        if agg not in _AGGS:
            raise CubbleError(f"unsupported aggregation {agg!r}")
        if bucket != "month":
            raise CubbleError(f"unsupported bucket {bucket!r}")
        names = vars if vars else self._numeric_names
        meta = self.cubble.meta
        out = []
        for key in self.cubble.keys():
            rows = self._rows_by_key.get(key, [])
            for rec in self._monthly(rows, names, agg):
                rec = {meta.key: _jsonable(key), **rec}
                out.append(rec)
        return out

    def resolve_keys(self, raw_keys: list) -> tuple[list, list]:
        """Split POSTed key values into (native keys, unknown inputs)."""
        known, unknown = [], []
        for rk in raw_keys:
            text = scalar_to_text(rk) if not isinstance(rk, str) else rk
            if text in self._by_text:
                known.append(self._by_text[text])
            else:
                unknown.append(rk)
        return known, unknown


class _Handler(BaseHTTPRequestHandler):
    service: CubbleService
    cors: bool = False

    # anything quieter than one log line per request
    def log_message(self, fmt, *args):
        pass

    def _headers(self, status: int, content_type="application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        if self.cors:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
        if content_type != "text/event-stream":
            self.end_headers()

    def _json(self, status: int, payload) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        if self.cors:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self._headers(204)

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        params = parse_qs(url.query)
        try:
            if parts == ["meta"]:
                self._json(200, self.service.meta_dict())
            elif parts == ["sites"]:
                self._json(200, self.service.sites())
            elif len(parts) == 2 and parts[0] == "series":
                vars_param = params.get("vars", [None])[0]
                vars = vars_param.split(",") if vars_param else None
                bucket = params.get("bucket", ["none"])[0]
                try:
                    self._json(200, self.service.series(parts[1], vars, bucket))
                except KeyError:
                    self._json(404, {"error": f"unknown key {parts[1]!r}"})
            elif parts == ["summary"]:
                agg = params.get("agg", ["mean"])[0]
                bucket = params.get("bucket", ["month"])[0]
                vars_param = params.get("vars", [None])[0]
                vars = vars_param.split(",") if vars_param else None
                self._json(200, self.service.summary(agg, bucket, vars))
            elif len(parts) == 2 and parts[0] == "selection":
                self._json(200, self.service.store.get(parts[1]).to_dict())
            elif len(parts) == 3 and parts[0] == "selection" and parts[2] == "events":
                self._stream_events(parts[1])
            else:
                self._json(404, {"error": "no such endpoint"})
        except CubbleError as e:
            self._json(400, {"error": str(e)})
        except (BrokenPipeError, ConnectionResetError):
            pass

    def do_POST(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        if len(parts) != 2 or parts[0] != "selection":
            self._json(404, {"error": "no such endpoint"})
            return
        group = parts[1]
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
        except (ValueError, json.JSONDecodeError):
            self._json(400, {"error": "malformed JSON body"})
            return
        keys = body.get("keys")
        if not isinstance(keys, list):
            self._json(400, {"error": "body must carry a `keys` list"})
            return
        source = body.get("source", "api")
        if source not in SELECTION_SOURCES:
            self._json(
                400,
                {"error": f"source must be one of {list(SELECTION_SOURCES)}"},
            )
            return
        native, unknown = self.service.resolve_keys(keys)
        if unknown:
            self._json(422, {"error": "unknown keys", "keys": unknown})
            return
        state = self.service.store.replace(group, tuple(native), source)
        self._json(200, state.to_dict())

    def _stream_events(self, group: str) -> None:
        self._headers(200, "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        self.send_header("Connection", "keep-alive")
        self.end_headers()
        q = self.service.store.subscribe(group)
        try:
            while True:
                try:
                    state = q.get(timeout=15.0)
                except queue.Empty:
                    self.wfile.write(b": ping\n\n")
                    self.wfile.flush()
                    continue
                payload = json.dumps(state.to_dict())
                self.wfile.write(f"data: {payload}\n\n".encode("utf-8"))
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError, OSError):
            pass
        finally:
            self.service.store.unsubscribe(group, q)


def make_server(
    cubble: SpatialTable, port: int = 0, cors: bool = False
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; port 0 picks a free port."""
    service = CubbleService(cubble)
    handler = type("BoundHandler", (_Handler,), {"service": service, "cors": cors})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    return server


def serve(cubble: SpatialTable, port: int, cors: bool = False) -> None:
    """Run the service until interrupted."""
    server = make_server(cubble, port, cors)
    host, actual_port = server.server_address[:2]
    print(f"serving on http://{host}:{actual_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
