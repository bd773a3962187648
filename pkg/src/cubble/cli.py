"""Command-line interface over bundles, CSV inputs, and the HTTP service.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from .bundle import load_bundle, save_bundle
from .core import (
    TemporalTable,
    face_spatial,
    face_temporal,
    from_flat,
    make_cubble,
    spatial_header,
    summarise_by,
    temporal_header,
    unfold,
)
from .calendar import fill_gaps, scan_gaps
from .glyph import GlyphSpec, glyph_box, glyph_points, glyph_ref_line, glyph_svg
from .ingest import nc_to_cubble, read_csv
from .keycheck import check_key
from .match import match_spatial, match_temporal
from .netcdf import ncdump_header, parse_netcdf
from .service import serve
from .table import MISSING, CubbleError, Table, TimePoint, scalar_to_text


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _cell_text(v: Any) -> str:
    if v is MISSING:
        return "NA"
    if isinstance(v, Table):
        return f"<table [{v.nrow} x {v.ncol}]>"
    return scalar_to_text(v)


def print_table(t: Table, limit: int = 20, file=None) -> None:
    file = file if file is not None else sys.stdout
    header = list(t.names)
    shown = min(t.nrow, limit)
    body = [
        [_cell_text(c.values[i]) for c in t.columns] for i in range(shown)
    ]
    widths = [
        max(len(header[j]), *(len(r[j]) for r in body)) if body else len(header[j])
        for j in range(len(header))
    ]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=file)
    for row in body:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)), file=file)
    if t.nrow > shown:
        print(f"... {t.nrow - shown} more row(s)", file=file)


def _rows_json(t: Table) -> list[dict]:
    def enc(v):
        if v is MISSING:
            return None
        if isinstance(v, TimePoint):
            return v.iso()
        if isinstance(v, Table):
            return {"nrow": v.nrow, "ncol": v.ncol}
        return v

    return [{k: enc(v) for k, v in row.items()} for row in t.rows()]


def _emit_table(t: Table, as_json: bool) -> None:
    if as_json:
        json.dump(_rows_json(t), sys.stdout)
        print()
    else:
        print_table(t)


def _split_pair(text: str, flag: str) -> tuple[str, str]:
    if "=" not in text:
        raise UsageError(f"{flag} expects from=to, got {text!r}")
    left, right = text.split("=", 1)
    return left.strip(), right.strip()


def _parse_coords(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"--coords expects two names, got {text!r}")
    return parts[0], parts[1]


def _parse_literal(text: str) -> Any:
    if text == "missing":
        return MISSING
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_range(text: str) -> list[float]:
    """a:b:s stride or comma-separated values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"range must be a:b or a:b:s, got {text!r}")
        a, b = float(parts[0]), float(parts[1])
        s = float(parts[2]) if len(parts) == 3 else 1.0
        if s <= 0:
            raise UsageError("range stride must be positive")
        out = []
        v = a
        while v <= b + 1e-9:
            out.append(round(v, 9))
            v += s
        return out
    return [float(p) for p in text.split(",") if p.strip()]


def build_parser() -> _Parser:
    p = _Parser(prog="cubble", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("make", help="build a bundle from two CSV tables")
    sp.add_argument("--spatial", required=True)
    sp.add_argument("--temporal", required=True)
    sp.add_argument("--key")
    sp.add_argument("--index", required=True)
    sp.add_argument("--coords", required=True)
    sp.add_argument("--by", help="spatial=temporal key column mapping")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("flat", help="build a bundle from one joined CSV")
    sp.add_argument("--input", required=True)
    sp.add_argument("--key", required=True)
    sp.add_argument("--index", required=True)
    sp.add_argument("--coords", required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("face", help="print a cubble in one of its two faces")
    sp.add_argument("which", choices=["spatial", "temporal"])
    sp.add_argument("bundle")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--limit", type=int, default=20)

    sp = sub.add_parser("unfold", help="broadcast spatial columns onto the long form")
    sp.add_argument("bundle")
    sp.add_argument("--vars", required=True)
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("checkkey", help="reconcile key values of two CSV tables")
    sp.add_argument("--spatial", required=True)
    sp.add_argument("--temporal", required=True)
    sp.add_argument("--by", required=True, help="spatial=temporal key columns")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("gaps", help="scan or fill temporal gaps")
    sp.add_argument("action", choices=["scan", "fill"])
    sp.add_argument("bundle")
    sp.add_argument("--fill", default="missing",
                    help='"missing" or col=value[,col=value...]')
    sp.add_argument("--out", help="bundle directory for the filled cubble")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("match", help="match sites across two cubbles")
    sp.add_argument("stage", choices=["spatial", "temporal"])
    sp.add_argument("--df1", help="first bundle (spatial stage)")
    sp.add_argument("--df2", help="second bundle (spatial stage)")
    sp.add_argument("--data", help="combined bundle (temporal stage)")
    sp.add_argument("--data-id", default="type")
    sp.add_argument("--match-id", default="group")
    sp.add_argument("--by", help="from=to temporal variable mapping")
    sp.add_argument("--n-group", type=int, default=10)
    sp.add_argument("--n-each", type=int, default=1)
    sp.add_argument("--window", type=int, default=5)
    sp.add_argument("--emit", choices=["table", "cubbles"], default="table")
    sp.add_argument("--out", help="directory for per-group bundles")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("glyph", help="emit glyph geometry (CSV/JSON/SVG)")
    sp.add_argument("bundle")
    sp.add_argument("--x-minor", required=True)
    sp.add_argument("--y-minor", required=True)
    sp.add_argument("--width", type=float, default=1.0)
    sp.add_argument("--height", type=float, default=1.0)
    sp.add_argument("--polar", action="store_true")
    sp.add_argument("--local-rescale", action="store_true")
    sp.add_argument("--svg", help="write an SVG rendering to this path")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("ncdump", help="dump a NetCDF classic header")
    sp.add_argument("file")
    sp.add_argument("--header", action="store_true", default=True)

    sp = sub.add_parser("nc2cubble", help="coerce a NetCDF grid into a bundle")
    sp.add_argument("file")
    sp.add_argument("--vars", required=True)
    sp.add_argument("--lon", help="a:b:s stride or comma list")
    sp.add_argument("--lat", help="a:b:s stride or comma list")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("summarise", help="aggregate the temporal face")
    sp.add_argument("bundle")
    sp.add_argument("--bucket", choices=["year", "month", "yearmonth"],
                    required=True)
    sp.add_argument("--agg", required=True,
                    help="out=op:col[,out=op:col...]")
    sp.add_argument("--out", help="bundle directory for the summarised cubble")
    sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("serve", help="serve a bundle over HTTP")
    sp.add_argument("bundle")
    sp.add_argument("--port", type=int, default=8787)
    sp.add_argument("--cors", action="store_true")

    return p


def _cmd_make(args) -> int:
    spatial = read_csv(args.spatial)
    temporal = read_csv(args.temporal)
    by = dict([_split_pair(args.by, "--by")]) if args.by else None
    cubble, report = make_cubble(
        spatial, temporal, key=args.key, index=args.index,
        coords=_parse_coords(args.coords), by=by,
    )
    if not report.clean:
        print(report.render(), file=sys.stderr)
    save_bundle(cubble, args.out)
    print(f"wrote bundle with {cubble.n_sites} site(s) to {args.out}")
    return 0


def _cmd_flat(args) -> int:
    cubble = from_flat(
        read_csv(args.input), key=args.key, index=args.index,
        coords=_parse_coords(args.coords),
    )
    save_bundle(cubble, args.out)
    print(f"wrote bundle with {cubble.n_sites} site(s) to {args.out}")
    return 0


def _cmd_face(args) -> int:
    cubble = load_bundle(args.bundle)
    if args.which == "spatial":
        if args.json:
            _emit_table(cubble.table, True)
        else:
            for line in spatial_header(cubble):
                print(line)
            print_table(cubble.table, args.limit)
    else:
        t = face_temporal(cubble)
        if args.json:
            _emit_table(t.table, True)
        else:
            for line in temporal_header(t):
                print(line)
            print_table(t.table, args.limit)
    return 0


def _cmd_unfold(args) -> int:
    t = face_temporal(load_bundle(args.bundle))
    out = unfold(t, [v.strip() for v in args.vars.split(",")])
    _emit_table(out.table, args.json)
    return 0


def _cmd_checkkey(args) -> int:
    left, right = _split_pair(args.by, "--by")
    report = check_key(read_csv(args.spatial), read_csv(args.temporal),
                       by={left: right})
    if args.json:
        json.dump(report.to_json_dict(), sys.stdout)
        print()
    else:
        print(report.render())
    return 0


def _cmd_gaps(args) -> int:
    t = face_temporal(load_bundle(args.bundle))
    if args.action == "scan":
        _emit_table(scan_gaps(t), args.json)
        return 0
    fill = None
    if args.fill and args.fill != "missing":
        fill = {}
        if "=" in args.fill:
            for part in args.fill.split(","):
                name, raw = _split_pair(part, "--fill")
                fill[name] = _parse_literal(raw)
        else:
            # bare constant: fill every temporal variable with it
            value = _parse_literal(args.fill)
            for col in t.table.columns:
                if col.name not in (t.meta.key, t.meta.index):
                    fill[col.name] = value
    filled = fill_gaps(t, fill)
    if args.out:
        save_bundle(face_spatial(filled), args.out)
        print(f"wrote filled bundle to {args.out}")
    else:
        _emit_table(filled.table, args.json)
    return 0


def _cmd_match(args) -> int:
    if args.stage == "spatial":
        if not args.df1 or not args.df2:
            raise UsageError("match spatial requires --df1 and --df2")
        df1 = load_bundle(args.df1)
        df2 = load_bundle(args.df2)
        if args.emit == "cubbles":
            groups = match_spatial(df1, df2, args.n_group, args.n_each,
                                   return_cubble=True)
            if not args.out:
                raise UsageError("--emit cubbles requires --out")
            for i, g in enumerate(groups, start=1):
                save_bundle(g, f"{args.out}/group{i:03d}")
            print(f"wrote {len(groups)} group bundle(s) to {args.out}")
        else:
            out = match_spatial(df1, df2, args.n_group, args.n_each)
            _emit_table(out, args.json)
        return 0
    if not args.data:
        raise UsageError("match temporal requires --data")
    if not args.by:
        raise UsageError("match temporal requires --by from=to")
    left, right = _split_pair(args.by, "--by")
    data = load_bundle(args.data)
    if args.emit == "cubbles":
        groups = match_temporal(
            data, data_id=args.data_id, match_id=args.match_id,
            temporal_by={left: right}, temporal_window=args.window,
            return_cubble=True,
        )
        if not args.out:
            raise UsageError("--emit cubbles requires --out")
        for i, g in enumerate(groups, start=1):
            save_bundle(g, f"{args.out}/group{i:03d}")
        print(f"wrote {len(groups)} group bundle(s) to {args.out}")
    else:
        out = match_temporal(
            data, data_id=args.data_id, match_id=args.match_id,
            temporal_by={left: right}, temporal_window=args.window,
        )
        _emit_table(out, args.json)
    return 0


def _cmd_glyph(args) -> int:
    cubble = load_bundle(args.bundle)
    t = unfold(face_temporal(cubble), list(cubble.meta.coords))
    x_minor, y_minor = args.x_minor, args.y_minor
    index = cubble.meta.index
    if index in (x_minor, y_minor):
        # binding the time index as a minor axis: use its numeric position
        from .calendar import index_count

        t = t.derive_col(f"{index}_pos",
                         lambda r: float(index_count(r[index])))
        x_minor = f"{index}_pos" if x_minor == index else x_minor
        y_minor = f"{index}_pos" if y_minor == index else y_minor
    x_major, y_major = cubble.meta.coords
    spec = GlyphSpec(
        x_major=x_major, y_major=y_major,
        x_minor=x_minor, y_minor=y_minor,
        width=args.width, height=args.height,
        polar=args.polar, global_rescale=not args.local_rescale,
    )
    pts = glyph_points(t, spec)
    if args.svg:
        svg = glyph_svg(
            pts, key=cubble.meta.key,
            boxes=glyph_box(t, spec), lines=glyph_ref_line(t, spec),
        )
        with open(args.svg, "w", encoding="utf-8") as f:
            f.write(svg)
        print(f"wrote {args.svg}")
    elif args.json:
        _emit_table(pts, True)
    else:
        _csv_stdout(pts)
    return 0


def _csv_stdout(t: Table) -> None:
    import csv as _csv

    writer = _csv.writer(sys.stdout)
    writer.writerow(t.names)
    for i in range(t.nrow):
        writer.writerow([scalar_to_text(c.values[i]) for c in t.columns])


def _cmd_ncdump(args) -> int:
    print(ncdump_header(parse_netcdf(args.file)))
    return 0


def _cmd_nc2cubble(args) -> int:
    nc = parse_netcdf(args.file)
    cubble = nc_to_cubble(
        nc,
        vars=[v.strip() for v in args.vars.split(",")],
        long_range=_parse_range(args.lon) if args.lon else None,
        lat_range=_parse_range(args.lat) if args.lat else None,
    )
    save_bundle(cubble, args.out)
    print(f"wrote bundle with {cubble.n_sites} site(s) to {args.out}")
    return 0


def _cmd_summarise(args) -> int:
    t = face_temporal(load_bundle(args.bundle))
    aggs = {}
    for part in args.agg.split(","):
        out_name, rest = _split_pair(part, "--agg")
        if ":" not in rest:
            raise UsageError(f"--agg expects out=op:col, got {part!r}")
        op, col = rest.split(":", 1)
        aggs[out_name] = (op.strip(), col.strip())
    result = summarise_by(t, ["key", args.bucket], aggs)
    if args.out:
        if not isinstance(result, TemporalTable):
            raise CubbleError("only key+bucket summaries can be saved as bundles")
        save_bundle(face_spatial(result), args.out)
        print(f"wrote summarised bundle to {args.out}")
    else:
        table = result.table if isinstance(result, TemporalTable) else result
        _emit_table(table, args.json)
    return 0


def _cmd_serve(args) -> int:
    serve(load_bundle(args.bundle), port=args.port, cors=args.cors)
    return 0


_COMMANDS = {
    "make": _cmd_make,
    "flat": _cmd_flat,
    "face": _cmd_face,
    "unfold": _cmd_unfold,
    "checkkey": _cmd_checkkey,
    "gaps": _cmd_gaps,
    "match": _cmd_match,
    "glyph": _cmd_glyph,
    "ncdump": _cmd_ncdump,
    "nc2cubble": _cmd_nc2cubble,
    "summarise": _cmd_summarise,
    "serve": _cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.cmd](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except CubbleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
