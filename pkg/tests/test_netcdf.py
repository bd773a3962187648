"""NetCDF classic parsing against an independent reference writer (scipy)."""

import random
import struct

import numpy as np
import pytest
from scipy.io import netcdf_file

from cubble import MISSING, TimeKind
from cubble.ingest import nc_to_cubble
from cubble.netcdf import NetcdfError, ncdump_header, parse_netcdf

RNG = random.Random(31)

Q_DATA = [[[round(RNG.uniform(0, 0.01), 9) for _ in range(4)] for _ in range(3)]
          for _ in range(8)]
Z_DATA = [[[round(RNG.uniform(1e4, 2e5), 6) for _ in range(4)] for _ in range(3)]
          for _ in range(8)]
LON = [-180.0, -179.0, -178.0, -177.0]
LAT = [-15.0, -16.0, -17.0]


def write_fixture(path, version=1, record_time=True):
    """4 lon x 3 lat x 8 time grid with float64 q and z."""
    f = netcdf_file(str(path), "w", version=version)
    f.createDimension("time", None if record_time else 8)
    f.createDimension("lat", 3)
    f.createDimension("lon", 4)
    lon = f.createVariable("lon", "d", ("lon",))
    lon[:] = LON
    lat = f.createVariable("lat", "d", ("lat",))
    lat[:] = LAT
    time = f.createVariable("time", "i", ("time",))
    time[:] = list(range(8))
    time.units = b"days since 2002-09-22"
    q = f.createVariable("q", "d", ("time", "lat", "lon"))
    z = f.createVariable("z", "d", ("time", "lat", "lon"))
    q[:] = np.array(Q_DATA)
    z[:] = np.array(Z_DATA)
    f.history = b"reference fixture"
    f.close()
    return str(path)


class TestHeaderParsing:
    def test_dims_and_vars_match_declaration(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        assert nc.version == 1
        assert [(d.name, d.length) for d in nc.dims] == [
            ("time", 0), ("lat", 3), ("lon", 4),
        ]
        assert nc.numrecs == 8
        names = {v.name: v.kind for v in nc.vars}
        assert names == {
            "lon": "float64", "lat": "float64", "time": "int32",
            "q": "float64", "z": "float64",
        }
        assert nc.var("q").dim_ids == (0, 1, 2)
        assert nc.var("time").attrs["units"] == "days since 2002-09-22"
        assert nc.attrs["history"] == "reference fixture"

    def test_fixed_time_layout(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "b.nc", record_time=False))
        assert nc.numrecs == 0
        assert [(d.name, d.length) for d in nc.dims] == [
            ("time", 8), ("lat", 3), ("lon", 4),
        ]
        shape, values = nc.read_var("q")
        assert shape == (8, 3, 4)

    def test_cdf2_parses_identically(self, tmp_path):
        nc1 = parse_netcdf(write_fixture(tmp_path / "a.nc", version=1))
        nc2 = parse_netcdf(write_fixture(tmp_path / "b.nc", version=2))
        assert nc2.version == 2
        assert [(d.name, d.length) for d in nc1.dims] == \
            [(d.name, d.length) for d in nc2.dims]
        for name in ("lon", "lat", "time", "q", "z"):
            assert nc1.read_var(name) == nc2.read_var(name)

    def test_empty_variable_list(self, tmp_path):
        f = netcdf_file(str(tmp_path / "e.nc"), "w")
        f.createDimension("x", 3)
        f.close()
        nc = parse_netcdf(str(tmp_path / "e.nc"))
        assert nc.vars == ()
        assert [(d.name, d.length) for d in nc.dims] == [("x", 3)]

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.nc"
        p.write_bytes(b"HDF5whatever")
        with pytest.raises(NetcdfError):
            parse_netcdf(str(p))

    def test_truncated_header(self, tmp_path):
        good = write_fixture(tmp_path / "a.nc")
        raw = open(good, "rb").read()
        p = tmp_path / "trunc.nc"
        p.write_bytes(raw[:40])
        with pytest.raises(NetcdfError):
            parse_netcdf(str(p))

    def test_truncated_payload(self, tmp_path):
        good = write_fixture(tmp_path / "a.nc")
        raw = open(good, "rb").read()
        p = tmp_path / "short.nc"
        p.write_bytes(raw[:-64])
        with pytest.raises(NetcdfError):
            parse_netcdf(str(p))

    def test_unsupported_kind_skipped_with_warning(self, tmp_path):
        f = netcdf_file(str(tmp_path / "c.nc"), "w")
        f.createDimension("n", 2)
        f.createDimension("slen", 3)
        v = f.createVariable("ok", "d", ("n",))
        v[:] = [1.0, 2.0]
        s = f.createVariable("label", "c", ("n", "slen"))
        s[:] = np.array([list("abc"), list("def")], dtype="S1")
        h = f.createVariable("half", "h", ("n",))
        h[:] = [1, 2]
        f.close()
        with pytest.warns(UserWarning, match="unsupported kind"):
            nc = parse_netcdf(str(tmp_path / "c.nc"))
        assert [v.name for v in nc.vars] == ["ok"]

    def test_ncdump_header_text(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        text = ncdump_header(nc)
        assert "time = UNLIMITED" in text
        assert "float64 q(time, lat, lon)" in text


class TestValueFidelity:
    def test_float64_bit_exact(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        shape, values = nc.read_var("q")
        assert shape == (8, 3, 4)
        flat = [Q_DATA[t][i][j]
                for t in range(8) for i in range(3) for j in range(4)]
        assert all(struct.pack(">d", a) == struct.pack(">d", b)
                   for a, b in zip(values, flat))
        _, zvals = nc.read_var("z")
        zflat = [Z_DATA[t][i][j]
                 for t in range(8) for i in range(3) for j in range(4)]
        assert zvals == zflat

    def test_matches_reference_reader(self, tmp_path):
        path = write_fixture(tmp_path / "a.nc")
        nc = parse_netcdf(path)
        ref = netcdf_file(path, "r", mmap=False)
        for name in ("lon", "lat", "q", "z"):
            _, mine = nc.read_var(name)
            theirs = [float(v) for v in ref.variables[name][:].ravel()]
            assert mine == theirs
        ref.close()

    def test_float32_and_int32(self, tmp_path):
        f = netcdf_file(str(tmp_path / "k.nc"), "w")
        f.createDimension("n", 5)
        fv = f.createVariable("fv", "f", ("n",))
        raw = [0.1, 2.5, -3.75, 1e-8, 9.9]
        fv[:] = raw
        iv = f.createVariable("iv", "i", ("n",))
        iv[:] = [-2, 0, 7, 2**31 - 1, -2**31]
        f.close()
        nc = parse_netcdf(str(tmp_path / "k.nc"))
        _, fvals = nc.read_var("fv")
        assert fvals == [float(np.float32(v)) for v in raw]
        _, ivals = nc.read_var("iv")
        assert ivals == [-2, 0, 7, 2**31 - 1, -(2**31)]


class TestNcToCubble:
    def test_desk_scale_grid(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        cb = nc_to_cubble(nc, vars=["q", "z"])
        assert cb.n_sites == 12
        assert cb.table.names == ("id", "long", "lat", "ts")
        assert cb.table.column("id").values == tuple(range(1, 13))
        # longitude varies fastest in storage order
        assert cb.table.column("long").values[:4] == (-180.0, -179.0, -178.0, -177.0)
        assert cb.table.column("lat").values[:5] == (-15.0,) * 4 + (-16.0,)
        for cell in cb.table.column("ts").values:
            assert (cell.nrow, cell.ncol) == (8, 3)
            assert cell.names == ("time", "q", "z")
        assert cb.meta.index_kind is TimeKind.DATE
        first = cb.table.column("ts").values[0]
        assert first.column("time").values[0].iso() == "2002-09-22"
        assert first.column("q").values == tuple(
            Q_DATA[t][0][0] for t in range(8))

    def test_single_cell_single_time(self, tmp_path):
        f = netcdf_file(str(tmp_path / "one.nc"), "w")
        f.createDimension("lon", 1)
        f.createDimension("lat", 1)
        f.createDimension("time", 1)
        lon = f.createVariable("lon", "d", ("lon",)); lon[:] = [3.5]
        lat = f.createVariable("lat", "d", ("lat",)); lat[:] = [-10.0]
        tv = f.createVariable("time", "i", ("time",)); tv[:] = [0]
        tv.units = b"days since 2020-06-01"
        q = f.createVariable("q", "d", ("time", "lat", "lon")); q[:] = [[[4.25]]]
        f.close()
        cb = nc_to_cubble(parse_netcdf(str(tmp_path / "one.nc")), vars=["q"])
        assert cb.n_sites == 1
        cell = cb.table.column("ts").values[0]
        assert (cell.nrow, cell.ncol) == (1, 2)
        assert cell.column("q").values == (4.25,)

    def test_range_subset_equals_filter_oracle(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        full = nc_to_cubble(nc, vars=["q", "z"])
        sub = nc_to_cubble(nc, vars=["q", "z"],
                           long_range=[-179.0, -177.0],
                           lat_range=[-15.0, -17.0])
        keep = [
            i for i in range(full.n_sites)
            if full.table.column("long").values[i] in (-179.0, -177.0)
            and full.table.column("lat").values[i] in (-15.0, -17.0)
        ]
        assert sub.n_sites == len(keep) == 4
        for out_row, src_row in enumerate(keep):
            assert sub.table.column("long").values[out_row] == \
                full.table.column("long").values[src_row]
            assert sub.table.column("lat").values[out_row] == \
                full.table.column("lat").values[src_row]
            assert sub.table.column("ts").values[out_row] == \
                full.table.column("ts").values[src_row]
        # ids are renumbered in storage order
        assert sub.table.column("id").values == (1, 2, 3, 4)

    def test_time_units_hours(self, tmp_path):
        f = netcdf_file(str(tmp_path / "h.nc"), "w")
        f.createDimension("lon", 1)
        f.createDimension("lat", 1)
        f.createDimension("time", 2)
        lon = f.createVariable("lon", "d", ("lon",)); lon[:] = [0.0]
        lat = f.createVariable("lat", "d", ("lat",)); lat[:] = [0.0]
        tv = f.createVariable("time", "i", ("time",)); tv[:] = [0, 6]
        tv.units = b"hours since 1900-01-01 00:00:00"
        q = f.createVariable("q", "d", ("time", "lat", "lon"))
        q[:] = [[[1.0]], [[2.0]]]
        f.close()
        cb = nc_to_cubble(parse_netcdf(str(tmp_path / "h.nc")), vars=["q"])
        assert cb.meta.index_kind is TimeKind.DATETIME
        cell = cb.table.column("ts").values[0]
        stamps = [tp.iso() for tp in cell.column("time").values]
        assert stamps == ["1900-01-01T00:00:00Z", "1900-01-01T06:00:00Z"]

    def test_fill_value_mapped_to_missing(self, tmp_path):
        f = netcdf_file(str(tmp_path / "m.nc"), "w")
        f.createDimension("lon", 1)
        f.createDimension("lat", 1)
        f.createDimension("time", 2)
        lon = f.createVariable("lon", "d", ("lon",)); lon[:] = [0.0]
        lat = f.createVariable("lat", "d", ("lat",)); lat[:] = [0.0]
        tv = f.createVariable("time", "i", ("time",)); tv[:] = [0, 1]
        tv.units = b"days since 2020-01-01"
        q = f.createVariable("q", "d", ("time", "lat", "lon"))
        q[:] = [[[-9999.0]], [[2.0]]]
        q.missing_value = -9999.0
        f.close()
        cb = nc_to_cubble(parse_netcdf(str(tmp_path / "m.nc")), vars=["q"])
        cell = cb.table.column("ts").values[0]
        assert cell.column("q").values == (MISSING, 2.0)

    def test_errors(self, tmp_path):
        nc = parse_netcdf(write_fixture(tmp_path / "a.nc"))
        with pytest.raises(NetcdfError):
            nc_to_cubble(nc, vars=["nope"])
        with pytest.raises(NetcdfError):
            nc_to_cubble(nc, vars=["q"], long_range=[123.456])
        f = netcdf_file(str(tmp_path / "nocoord.nc"), "w")
        f.createDimension("n", 1)
        v = f.createVariable("v", "d", ("n",)); v[:] = [1.0]
        f.close()
        with pytest.raises(NetcdfError):
            nc_to_cubble(parse_netcdf(str(tmp_path / "nocoord.nc")), vars=["v"])


class TestParserTotality:
    def test_random_bytes_never_escape_structured_errors(self, tmp_path):
        rng = random.Random(55)
        good = open(write_fixture(tmp_path / "seed.nc"), "rb").read()
        cases = []
        for i in range(120):
            n = rng.randint(0, 300)
            cases.append(bytes(rng.getrandbits(8) for _ in range(n)))
        for i in range(1, 80):
            cases.append(good[: rng.randint(0, len(good))])
        # bit flips inside an otherwise valid file
        for _ in range(60):
            mutated = bytearray(good)
            for _ in range(rng.randint(1, 4)):
                mutated[rng.randrange(len(mutated))] = rng.getrandbits(8)
            cases.append(bytes(mutated))
        path = tmp_path / "fuzz.nc"
        for raw in cases:
            path.write_bytes(b"CDF\x01" + raw if rng.random() < 0.5 else raw)
            try:
                nc = parse_netcdf(str(path))
                for v in nc.vars:
                    nc.read_var(v.name)
            except NetcdfError:
                pass
