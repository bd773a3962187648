"""Glyph coordinate transformation and reference geometry."""

import random

import pytest

from cubble import MISSING, CubbleError, Table, face_temporal, make_cubble, unfold
from cubble.glyph import (
    GlyphSpec,
    glyph_box,
    glyph_points,
    glyph_ref_line,
    glyph_svg,
    rescale01,
    rescale11,
)
from helpers import DAY1


def _glyph_input(sites, series, x_var="xm", y_var="ym"):
    """TemporalTable with coords unfolded; series maps key -> (xm, ym) lists."""
    keys = list(series)
    ids, dates, xm, ym = [], [], [], []
    for k in keys:
        xs, ys = series[k]
        for d, (a, b) in enumerate(zip(xs, ys)):
            ids.append(k)
            dates.append(DAY1.add(d))
            xm.append(a)
            ym.append(b)
    temporal = Table.from_dict({"id": ids, "date": dates, x_var: xm, y_var: ym})
    spatial = Table.from_dict(
        {
            "id": keys,
            "long": [sites[k][0] for k in keys],
            "lat": [sites[k][1] for k in keys],
        }
    )
    cb, _ = make_cubble(spatial, temporal, key="id", index="date",
                        coords=("long", "lat"))
    return unfold(face_temporal(cb), ["long", "lat"])


def _spec(**kw):
    base = dict(x_major="long", y_major="lat", x_minor="xm", y_minor="ym")
    base.update(kw)
    return GlyphSpec(**base)


class TestRescale:
    def test_endpoints_and_midpoint(self):
        assert rescale11([0.0, 5.0, 10.0]) == [-1.0, 0.0, 1.0]

    def test_constant_maps_to_center(self):
        assert rescale11([7.0, 7.0]) == [0.0, 0.0]
        assert rescale01([7.0, 7.0]) == [0.5, 0.5]

    def test_random_min_max(self):
        rng = random.Random(0)
        for _ in range(30):
            vals = [rng.uniform(-100, 100) for _ in range(rng.randint(2, 50))]
            out = rescale11(vals)
            assert out[vals.index(min(vals))] == -1.0
            assert out[vals.index(max(vals))] == 1.0
            assert all(-1.0 <= v <= 1.0 for v in out)

    def test_missing_passes_through(self):
        out = rescale11([0.0, MISSING, 10.0])
        assert out[1] is MISSING


class TestGlyphPoints:
    def test_linear_endpoint_example(self):
        t = _glyph_input({"a": (100.0, -30.0)},
                         {"a": ([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])})
        out = glyph_points(t, _spec(width=2.0, height=1.0))
        assert list(out.column("gx").values) == [99.0, 100.0, 101.0]
        assert list(out.column("gy").values) == [-30.0, -30.0, -30.0]

    def test_local_rescale_spans_each_box(self):
        sites = {"a": (0.0, 0.0), "b": (50.0, 10.0)}
        series = {
            "a": ([0.0, 1.0], [0.0, 2.0]),
            "b": ([0.0, 1.0], [0.0, 200.0]),  # much larger amplitude
        }
        t = _glyph_input(sites, series)
        spec = _spec(width=2.0, height=2.0, global_rescale=False)
        out = glyph_points(t, spec)
        by_key = {}
        for row in out.rows():
            by_key.setdefault(row["id"], []).append(row["gy"])
        # per-key oracle: each site's min/max maps to the full box height
        assert by_key["a"] == [0.0 - 1.0, 0.0 + 1.0]
        assert by_key["b"] == [10.0 - 1.0, 10.0 + 1.0]

    def test_global_rescale_shares_scale(self):
        sites = {"a": (0.0, 0.0), "b": (50.0, 10.0)}
        series = {
            "a": ([0.0, 1.0], [0.0, 2.0]),
            "b": ([0.0, 1.0], [0.0, 200.0]),
        }
        out = glyph_points(_glyph_input(sites, series),
                           _spec(width=2.0, height=2.0))
        # site a barely moves on the shared [0, 200] scale
        a_span = max(r["gy"] for r in out.rows() if r["id"] == "a") - \
            min(r["gy"] for r in out.rows() if r["id"] == "a")
        b_span = max(r["gy"] for r in out.rows() if r["id"] == "b") - \
            min(r["gy"] for r in out.rows() if r["id"] == "b")
        assert b_span == pytest.approx(2.0)
        assert a_span == pytest.approx(2.0 * 2.0 / 200.0)

    def test_per_key_oracle_randomized(self):
        rng = random.Random(4)
        sites = {f"k{i}": (rng.uniform(-50, 50), rng.uniform(-40, 40))
                 for i in range(5)}
        series = {
            k: ([rng.uniform(0, 10) for _ in range(8)],
                [rng.uniform(-5, 5) for _ in range(8)])
            for k in sites
        }
        t = _glyph_input(sites, series)
        out = glyph_points(t, _spec(width=3.0, height=1.5,
                                    global_rescale=False))
        for k, (xs, ys) in series.items():
            got_x = [r["gx"] for r in out.rows() if r["id"] == k]
            lo, hi = min(xs), max(xs)
            expected = [sites[k][0] + 1.5 * (2 * (v - lo) / (hi - lo) - 1)
                        for v in xs]
            assert got_x == pytest.approx(expected)

    def test_containment_linear_and_polar(self):
        rng = random.Random(5)
        sites = {f"k{i}": (rng.uniform(-170, 170), rng.uniform(-80, 80))
                 for i in range(10)}
        series = {
            k: ([rng.uniform(-3, 3) for _ in range(50)],
                [rng.uniform(-3, 3) for _ in range(50)])
            for k in sites
        }
        t = _glyph_input(sites, series)
        for polar in (False, True):
            for global_rescale in (False, True):
                spec = _spec(width=0.8, height=0.4, polar=polar,
                             global_rescale=global_rescale)
                pts = glyph_points(t, spec)
                boxes = {r["id"]: r for r in glyph_box(t, spec).rows()}
                for row in pts.rows():
                    box = boxes[row["id"]]
                    eps = 1e-12
                    assert box["xmin"] - eps <= row["gx"] <= box["xmax"] + eps
                    assert box["ymin"] - eps <= row["gy"] <= box["ymax"] + eps

    def test_translation_equivariance(self):
        rng = random.Random(6)
        sites = {"a": (10.0, 20.0), "b": (30.0, -10.0)}
        series = {
            k: ([rng.uniform(0, 1) for _ in range(12)],
                [rng.uniform(0, 1) for _ in range(12)])
            for k in sites
        }
        dx, dy = 5.25, -3.75
        shifted = {k: (x + dx, y + dy) for k, (x, y) in sites.items()}
        base = glyph_points(_glyph_input(sites, series), _spec())
        moved = glyph_points(_glyph_input(shifted, series), _spec())
        for r0, r1 in zip(base.rows(), moved.rows()):
            assert r1["gx"] == pytest.approx(r0["gx"] + dx, abs=1e-9)
            assert r1["gy"] == pytest.approx(r0["gy"] + dy, abs=1e-9)

    def test_minor_scale_invariance_local(self):
        rng = random.Random(7)
        sites = {"a": (0.0, 0.0)}
        xs = [rng.uniform(0, 1) for _ in range(10)]
        ys = [rng.uniform(0, 1) for _ in range(10)]
        base = glyph_points(
            _glyph_input(sites, {"a": (xs, ys)}),
            _spec(global_rescale=False),
        )
        scaled = glyph_points(
            _glyph_input(sites, {"a": ([3 * v + 7 for v in xs],
                                       [0.5 * v - 2 for v in ys])}),
            _spec(global_rescale=False),
        )
        for r0, r1 in zip(base.rows(), scaled.rows()):
            assert r1["gx"] == pytest.approx(r0["gx"])
            assert r1["gy"] == pytest.approx(r0["gy"])

    def test_constant_minor_centers(self):
        t = _glyph_input({"a": (10.0, 20.0)},
                         {"a": ([1.0, 2.0], [4.0, 4.0])})
        out = glyph_points(t, _spec(height=6.0))
        assert list(out.column("gy").values) == [20.0, 20.0]
        polar = glyph_points(t, _spec(height=6.0, polar=True))
        # constant y_minor puts the radius at 0.5: strictly inside the box
        for row in polar.rows():
            assert abs(row["gy"] - 20.0) <= 3.0 / 2 + 1e-12

    def test_varying_major_rejected(self, cb_temporal):
        t = unfold(cb_temporal, ["long", "lat"])
        bad = t.derive_col("wobble", lambda r: r["prcp"])
        with pytest.raises(CubbleError):
            glyph_points(bad, GlyphSpec("wobble", "lat", "tmax", "tmin"))

    def test_non_numeric_minor_rejected(self, cb_temporal):
        t = unfold(cb_temporal, ["long", "lat", "name"])
        with pytest.raises(CubbleError):
            glyph_points(t, GlyphSpec("long", "lat", "name", "tmin"))


class TestReferenceGeometry:
    def test_box_example(self):
        t = _glyph_input({"a": (0.0, 0.0)}, {"a": ([1.0, 2.0], [3.0, 4.0])})
        spec = _spec(width=2.0, height=4.0)
        box = glyph_box(t, spec).row(0)
        assert (box["xmin"], box["xmax"]) == (-1.0, 1.0)
        assert (box["ymin"], box["ymax"]) == (-2.0, 2.0)
        line = glyph_ref_line(t, spec).row(0)
        assert (line["x0"], line["x1"], line["y"]) == (-1.0, 1.0, 0.0)

    def test_invalid_spec(self):
        with pytest.raises(CubbleError):
            GlyphSpec("a", "b", "c", "d", width=0.0)


class TestSvg:
    def test_svg_smoke(self, cb_temporal):
        t = unfold(cb_temporal, ["long", "lat"])
        t2 = t.derive_col("date_num", lambda r: float(r["date"].count))
        spec = GlyphSpec("long", "lat", "date_num", "tmax",
                         width=0.1, height=0.1)
        pts = glyph_points(t2, spec)
        svg = glyph_svg(pts, key="id", boxes=glyph_box(t2, spec),
                        lines=glyph_ref_line(t2, spec))
        assert svg.startswith("<svg")
        assert svg.count("<rect") == 3
        assert svg.count("<line") == 3
        assert "<path" in svg
        assert svg.endswith("</svg>")

    def test_missing_breaks_path(self):
        t = _glyph_input({"a": (0.0, 0.0)},
                         {"a": ([1.0, 2.0, 3.0, 4.0],
                                [1.0, MISSING, 3.0, 4.0])})
        pts = glyph_points(t, _spec())
        svg = glyph_svg(pts, key="id")
        path = [ln for ln in svg.splitlines() if ln.startswith("<path")][0]
        assert path.count("M") == 2
