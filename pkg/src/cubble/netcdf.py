"""Self-contained reader for the NetCDF classic binary format.

Handles CDF-1 and CDF-2 (64-bit offset) files: big-endian header with
4-byte-padded names and attribute payloads, contiguous fixed-size
variables, and interleaved record variables. The classic data model
only (no groups, no compression).
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field
from typing import Any, BinaryIO

from .table import CubbleError


class NetcdfError(CubbleError):
    """Malformed or unsupported NetCDF input."""


_NC_BYTE = 1
_NC_CHAR = 2
_NC_SHORT = 3
_NC_INT = 4
_NC_FLOAT = 5
_NC_DOUBLE = 6

_TAG_DIMENSION = 10
_TAG_VARIABLE = 11
_TAG_ATTRIBUTE = 12

_TYPE_SIZE = {1: 1, 2: 1, 3: 2, 4: 4, 5: 4, 6: 8}
_TYPE_STRUCT = {1: "b", 3: "h", 4: "i", 5: "f", 6: "d"}
_TYPE_NAME = {
    1: "int8",
    2: "char",
    3: "int16",
    4: "int32",
    5: "float32",
    6: "float64",
}
SUPPORTED_KINDS = ("int32", "float32", "float64")

_STREAMING_NUMRECS = 0xFFFFFFFF


@dataclass(frozen=True)
class NcDim:
    name: str
    length: int  # 0 marks the record dimension

    @property
    def is_record(self) -> bool:
        return self.length == 0


@dataclass(frozen=True)
class NcVar:
    name: str
    kind: str
    dim_ids: tuple[int, ...]
    attrs: dict[str, Any]
    vsize: int
    begin: int
    nc_type: int = field(repr=False, default=0)


@dataclass(frozen=True)
class NcFile:
    """Decoded header plus lazily readable payloads."""

    path: str
    version: int  # 1 = CDF-1, 2 = CDF-2
    numrecs: int
    dims: tuple[NcDim, ...]
    attrs: dict[str, Any]
    vars: tuple[NcVar, ...]
    record_size: int = field(repr=False, default=0)

    def dim_lengths(self, var: NcVar) -> tuple[int, ...]:
        """Concrete dimension lengths; the record dimension expands to numrecs."""
        out = []
        for d in var.dim_ids:
            dim = self.dims[d]
            out.append(self.numrecs if dim.is_record else dim.length)
        return tuple(out)

    def has_var(self, name: str) -> bool:
        return any(v.name == name for v in self.vars)

    def var(self, name: str) -> NcVar:
        for v in self.vars:
            if v.name == name:
                return v
        raise NetcdfError(f"no such variable: {name!r}")

    def is_record_var(self, var: NcVar) -> bool:
        return bool(var.dim_ids) and self.dims[var.dim_ids[0]].is_record

    def read_var(self, name: str) -> tuple[tuple[int, ...], list]:
        """(shape, row-major flat values) of one variable's full payload."""
        var = self.var(name)
        shape = self.dim_lengths(var)
        n_values = 1
        for length in shape:
            n_values *= length
        code = _TYPE_STRUCT[var.nc_type]
        size = _TYPE_SIZE[var.nc_type]
        with open(self.path, "rb") as f:
            if not self.is_record_var(var):
                f.seek(var.begin)
                raw = _read_exact(f, n_values * size)
                values = list(struct.unpack(f">{n_values}{code}", raw))
            else:
                per_record = n_values // self.numrecs if self.numrecs else 0
                values = []
                for r in range(self.numrecs):
                    f.seek(var.begin + r * self.record_size)
                    raw = _read_exact(f, per_record * size)
                    values.extend(struct.unpack(f">{per_record}{code}", raw))
        if var.nc_type == _NC_FLOAT or var.nc_type == _NC_DOUBLE:
            values = [float(v) for v in values]
        return shape, values


def _read_exact(f: BinaryIO, n: int) -> bytes:
    raw = f.read(n)
    if len(raw) != n:
        raise NetcdfError("truncated file: payload extends past end of file")
    return raw


class _HeaderReader:
    def __init__(self, f: BinaryIO):
        self.f = f

    def bytes(self, n: int) -> bytes:
        raw = self.f.read(n)
        if len(raw) != n:
            raise NetcdfError("truncated header")
        return raw

    def int32(self) -> int:
        return struct.unpack(">i", self.bytes(4))[0]

    def uint32(self) -> int:
        return struct.unpack(">I", self.bytes(4))[0]

    def int64(self) -> int:
        return struct.unpack(">q", self.bytes(8))[0]

    def non_negative(self) -> int:
        n = self.int32()
        if n < 0:
            raise NetcdfError("negative count in header")
        return n

    def name(self) -> str:
        n = self.non_negative()
        raw = self.bytes(n)
        self.bytes(_padding(n))
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            return raw.decode("latin-1")

    def attr_values(self, nc_type: int, count: int) -> Any:
        size = _TYPE_SIZE.get(nc_type)
        if size is None:
            raise NetcdfError(f"unknown attribute type {nc_type}")
        raw = self.bytes(size * count)
        self.bytes(_padding(size * count))
        if nc_type == _NC_CHAR:
            try:
                return raw.decode("utf-8")
            except UnicodeDecodeError:
                return raw.decode("latin-1")
        values = list(struct.unpack(f">{count}{_TYPE_STRUCT[nc_type]}", raw))
        if nc_type in (_NC_FLOAT, _NC_DOUBLE):
            values = [float(v) for v in values]
        return values[0] if count == 1 else values


def _padding(n: int) -> int:
    return (4 - n % 4) % 4


def _read_tagged_count(r: _HeaderReader, expected_tag: int, what: str) -> int:
    tag = r.int32()
    count = r.non_negative()
    if tag == expected_tag:
        return count
    if tag == 0 and count == 0:
        return 0
    raise NetcdfError(f"malformed {what} list (tag {tag})")


def _read_attrs(r: _HeaderReader) -> dict[str, Any]:
    count = _read_tagged_count(r, _TAG_ATTRIBUTE, "attribute")
    attrs = {}
    for _ in range(count):
        name = r.name()
        nc_type = r.int32()
        nelems = r.non_negative()
        attrs[name] = r.attr_values(nc_type, nelems)
    return attrs


def parse_netcdf(path: str) -> NcFile:
    """Decode a CDF-1/CDF-2 header and validate its payload layout.

    Variables of unsupported kinds (int8/int16/char) are dropped with a
    warning; their space still counts toward the record stride.
    """
    with open(path, "rb") as f:
        r = _HeaderReader(f)
        magic = r.bytes(4)
        if magic[:3] != b"CDF" or magic[3] not in (1, 2):
            raise NetcdfError("not a NetCDF classic file (bad magic)")
        version = magic[3]
        numrecs = r.uint32()
        if numrecs == _STREAMING_NUMRECS:
            raise NetcdfError("streaming record count is not supported")

        dim_count = _read_tagged_count(r, _TAG_DIMENSION, "dimension")
        dims = []
        for _ in range(dim_count):
            name = r.name()
            length = r.non_negative()
            dims.append(NcDim(name, length))
        if sum(1 for d in dims if d.is_record) > 1:
            raise NetcdfError("more than one record dimension")

        attrs = _read_attrs(r)

        var_count = _read_tagged_count(r, _TAG_VARIABLE, "variable")
        parsed: list[NcVar] = []
        for _ in range(var_count):
            name = r.name()
            ndims = r.non_negative()
            dim_ids = tuple(r.non_negative() for _ in range(ndims))
            for d in dim_ids:
                if d >= len(dims):
                    raise NetcdfError(f"variable {name!r} references unknown dimension")
            for d in dim_ids[1:]:
                if dims[d].is_record:
                    raise NetcdfError(
                        f"variable {name!r}: record dimension must be outermost"
                    )
            vattrs = _read_attrs(r)
            nc_type = r.int32()
            if nc_type not in _TYPE_SIZE:
                raise NetcdfError(f"variable {name!r} has unknown type {nc_type}")
            vsize = r.non_negative()
            begin = r.int64() if version == 2 else r.non_negative()
            parsed.append(
                NcVar(name, _TYPE_NAME[nc_type], dim_ids, vattrs, vsize, begin, nc_type)
            )

    record_size = _compute_record_size(parsed, dims)
    file_size = _file_size(path)
    _check_extents(parsed, dims, numrecs, record_size, file_size)

    kept = []
    for v in parsed:
        if v.kind in SUPPORTED_KINDS:
            kept.append(v)
        else:
            warnings.warn(
                f"skipping variable {v.name!r} of unsupported kind {v.kind}",
                stacklevel=2,
            )
    return NcFile(
        path=path,
        version=version,
        numrecs=numrecs,
        dims=tuple(dims),
        attrs=attrs,
        vars=tuple(kept),
        record_size=record_size,
    )


def _per_record_bytes(var: NcVar, dims: list[NcDim]) -> int:
    n = _TYPE_SIZE[var.nc_type]
    for d in var.dim_ids[1:]:
        n *= dims[d].length
    return n


def _compute_record_size(parsed: list[NcVar], dims: list[NcDim]) -> int:
    record_vars = [
        v for v in parsed if v.dim_ids and dims[v.dim_ids[0]].is_record
    ]
    if not record_vars:
        return 0
    if len(record_vars) == 1:
        # single record variable: records are packed without padding
        return _per_record_bytes(record_vars[0], dims)
    return sum(v.vsize for v in record_vars)


def _file_size(path: str) -> int:
    import os

    return os.path.getsize(path)


def _check_extents(
    parsed: list[NcVar],
    dims: list[NcDim],
    numrecs: int,
    record_size: int,
    file_size: int,
) -> None:
    for v in parsed:
        if v.dim_ids and dims[v.dim_ids[0]].is_record:
            if numrecs == 0:
                continue
            end = v.begin + (numrecs - 1) * record_size + _per_record_bytes(v, dims)
        else:
            n = _TYPE_SIZE[v.nc_type]
            for d in v.dim_ids:
                n *= dims[d].length
            end = v.begin + n
        if end > file_size:
            raise NetcdfError(
                f"variable {v.name!r} declares data past end of file "
                f"({end} > {file_size})"
            )


def ncdump_header(nc: NcFile) -> str:
    """Text rendering of the decoded header, one declaration per line."""
    lines = [f"netcdf (classic, CDF-{nc.version}) {{", "dimensions:"]
    for d in nc.dims:
        length = f"UNLIMITED ; // ({nc.numrecs} currently)" if d.is_record else f"{d.length} ;"
        lines.append(f"\t{d.name} = {length}")
    lines.append("variables:")
    for v in nc.vars:
        dim_names = ", ".join(nc.dims[i].name for i in v.dim_ids)
        lines.append(f"\t{v.kind} {v.name}({dim_names}) ;")
        for name, value in v.attrs.items():
            lines.append(f"\t\t{v.name}:{name} = {value!r} ;")
    if nc.attrs:
        lines.append("// global attributes:")
        for name, value in nc.attrs.items():
            lines.append(f"\t:{name} = {value!r} ;")
    lines.append("}")
    return "\n".join(lines)
