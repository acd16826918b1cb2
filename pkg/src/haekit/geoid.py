"""Geoid undulation grids in the portable UGG format.

Undulation ``N`` is the geoid height above the ellipsoid, so ``h = H + N``.

UGG text::

    UGG1 <name>
    <lat0> <lon0> <dlat> <dlon> <nrows> <ncols>
    <nrows lines of ncols values, meters>

UGG binary: ``b"UGGB"``, then little-endian lat0, lon0, dlat, dlon (float64),
nrows, ncols (uint32), then nrows*ncols float32 undulations, row-major.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGrid, MalformedHeader, NonFiniteValue, ValueCountMismatch
from .grid import GridGeometry, bilinear

MAGIC_TEXT = "UGG1"
MAGIC_BINARY = b"UGGB"
_HEADER = struct.Struct("<4sddddII")
MAX_ABS_UNDULATION = 150.0


@dataclass(frozen=True, eq=False)
class GeoidGrid:
    name: str
    geometry: GridGeometry
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.shape != self.geometry.shape:
            raise InvalidGrid(f"values shape {vals.shape} != grid shape {self.geometry.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue("geoid grid contains non-finite undulations")
        if np.any(np.abs(vals) >= MAX_ABS_UNDULATION):
            raise InvalidGrid(f"undulation magnitude must be < {MAX_ABS_UNDULATION} m")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_arrays(cls, name, lat0, lon0, dlat, dlon, values) -> "GeoidGrid":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidGrid("values must be 2-D")
        geom = GridGeometry(float(lat0), float(lon0), float(dlat), float(dlon), *values.shape)
        return cls(name, geom, values)

    def undulation(self, lat, lon):
        """Bilinearly interpolated undulation in meters (scalar in, float out)."""
        out = bilinear(self.values, self.geometry, lat, lon)
        return float(out) if out.ndim == 0 else out

    def equals(self, other: "GeoidGrid") -> bool:
        return (self.name == other.name and self.geometry.same_as(other.geometry)
                and np.array_equal(self.values, other.values))


def undulation(grid: GeoidGrid, lat, lon):
    return grid.undulation(lat, lon)


# -- reading ---------------------------------------------------------------

def load_geoid_grid(source, format: str | None = None, name: str = "unnamed") -> GeoidGrid:
    """Load a UGG grid from bytes, a binary stream or a path.

    ``format`` is ``"ugg-text"`` or ``"ugg-binary"``; when omitted it is
    sniffed from the magic bytes.  The binary layout carries no name, so
    ``name`` labels binary grids.
    """
    data = _read_bytes(source)
    if format is None:
        format = "ugg-binary" if data[:4] == MAGIC_BINARY else "ugg-text"
    if format == "ugg-text":
        return _parse_text(data)
    if format == "ugg-binary":
        return _parse_binary(data, name)
    raise ValueError(f"unknown geoid format {format!r}")


def _read_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if hasattr(source, "read"):
        data = source.read()
        return data.encode() if isinstance(data, str) else data
    with open(source, "rb") as f:
        return f.read()


def _parse_text(data: bytes) -> GeoidGrid:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedHeader("UGG text is not UTF-8") from exc
    lines = text.splitlines()
    if len(lines) < 2:
        raise MalformedHeader("UGG text needs a two-line header")
    magic, _, name = lines[0].strip().partition(" ")
    if magic != MAGIC_TEXT:
        raise MalformedHeader(f"bad magic {magic!r}, expected {MAGIC_TEXT}")
    parts = lines[1].split()
    if len(parts) != 6:
        raise MalformedHeader("geometry line needs 6 fields")
    try:
        lat0, lon0, dlat, dlon = (float(p) for p in parts[:4])
        nrows, ncols = int(parts[4]), int(parts[5])
    except ValueError as exc:
        raise MalformedHeader(f"bad geometry line: {lines[1]!r}") from exc
    if nrows < 0 or ncols < 0:
        raise MalformedHeader("negative dimensions")
    try:
        vals = np.array([float(t) for line in lines[2:] for t in line.split()], dtype=np.float64)
    except ValueError as exc:
        raise MalformedHeader(f"unparseable value: {exc}") from exc
    if vals.size != nrows * ncols:
        raise ValueCountMismatch(f"header declares {nrows * ncols} values, found {vals.size}")
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("UGG payload contains non-finite values")
    geom = GridGeometry(lat0, lon0, dlat, dlon, nrows, ncols)
    return GeoidGrid(name.strip(), geom, vals.reshape(nrows, ncols))


def _parse_binary(data: bytes, name: str) -> GeoidGrid:
    if len(data) < _HEADER.size:
        raise MalformedHeader("truncated UGG binary header")
    magic, lat0, lon0, dlat, dlon, nrows, ncols = _HEADER.unpack_from(data)
    if magic != MAGIC_BINARY:
        raise MalformedHeader(f"bad magic {magic!r}")
    payload = data[_HEADER.size:]
    expected = nrows * ncols * 4
    if len(payload) != expected:
        raise ValueCountMismatch(
            f"header declares {nrows * ncols} values, payload holds {len(payload) / 4:g}")
    vals = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("UGG payload contains non-finite values")
    geom = GridGeometry(lat0, lon0, dlat, dlon, nrows, ncols)
    return GeoidGrid(name, geom, vals.reshape(nrows, ncols))


# -- writing ---------------------------------------------------------------

def write_geoid_grid(grid: GeoidGrid, dest=None, format: str = "ugg-binary") -> bytes:
    """Serialize ``grid``; returns the bytes and writes them to ``dest`` if given.

    Binary payloads store float32, so values not representable in float32
    are rounded on write.
    """
    g = grid.geometry
    if format == "ugg-text":
        buf = io.StringIO()
        buf.write(f"{MAGIC_TEXT} {grid.name}\n")
        buf.write(f"{g.lat0!r} {g.lon0!r} {g.dlat!r} {g.dlon!r} {g.nrows} {g.ncols}\n")
        for row in grid.values:
            buf.write(" ".join(repr(float(v)) for v in row))
            buf.write("\n")
        data = buf.getvalue().encode("utf-8")
    elif format == "ugg-binary":
        header = _HEADER.pack(MAGIC_BINARY, g.lat0, g.lon0, g.dlat, g.dlon, g.nrows, g.ncols)
        data = header + grid.values.astype("<f4").tobytes()
    else:
        raise ValueError(f"unknown geoid format {format!r}")
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(data)
        else:
            with open(dest, "wb") as f:
                f.write(data)
    return data


def describe(grid: GeoidGrid) -> dict:
    g = grid.geometry
    return {
        "name": grid.name,
        "lat0": g.lat0, "lon0": g.lon0, "dlat": g.dlat, "dlon": g.dlon,
        "nrows": g.nrows, "ncols": g.ncols,
        "global": g.is_global,
        "min_m": float(grid.values.min()),
        "max_m": float(grid.values.max()),
        "mean_m": float(grid.values.mean()),
    }

