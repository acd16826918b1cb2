"""Terrain rasters (DTM/DSM): ESRI ASCII and extended-UGG I/O, sampling, HAE conversion."""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (GeoidCoverageGap, InvalidGrid, MalformedHeader, NodataNeighborhood,
                     NonFiniteValue, OutOfExtent, UnsupportedPath, ValueCountMismatch)
from .geoid import MAGIC_BINARY, GeoidGrid, _read_bytes
from .grid import GridGeometry, stencil_values
from .references import HAE, MSL, SURFACE_KINDS, HeightReference

MIN_ELEVATION = -500.0
MAX_ELEVATION = 9000.0
DEFAULT_NODATA = -9999.0

# extended UGG: geoid header + surface_kind, vref class, datum label, nodata
_EXT_HEADER = struct.Struct("<4sddddIIBB16sf")
_VREF_CODES = {"MSL": 0, "HAE": 1}


@dataclass(frozen=True, eq=False)
class TerrainRaster:
    surface_kind: str
    vertical_ref: HeightReference
    geometry: GridGeometry
    values: np.ndarray = field(repr=False)
    nodata: float = DEFAULT_NODATA

    def __post_init__(self):
        if self.surface_kind not in SURFACE_KINDS:
            raise InvalidGrid(f"surface_kind must be one of {SURFACE_KINDS}")
        if not isinstance(self.vertical_ref, (MSL, HAE)):
            raise InvalidGrid("terrain must be referenced to MSL or HAE")
        vals = np.array(self.values, dtype=np.float64)
        if vals.shape != self.geometry.shape:
            raise InvalidGrid(f"values shape {vals.shape} != grid shape {self.geometry.shape}")
        valid = _valid_mask(vals, self.nodata)
        if not np.all(np.isfinite(vals[valid])):
            raise NonFiniteValue("raster contains non-finite elevations")
        if np.any((vals[valid] < MIN_ELEVATION) | (vals[valid] > MAX_ELEVATION)):
            raise InvalidGrid(f"elevations must lie in [{MIN_ELEVATION}, {MAX_ELEVATION}] m")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def valid(self) -> np.ndarray:
        """Boolean mask of non-nodata pixels."""
        return _valid_mask(self.values, self.nodata)

    def equals(self, other: "TerrainRaster") -> bool:
        same_nodata = (self.nodata == other.nodata
                       or (math.isnan(self.nodata) and math.isnan(other.nodata)))
        return (self.surface_kind == other.surface_kind
                and self.vertical_ref == other.vertical_ref
                and self.geometry.same_as(other.geometry)
                and same_nodata
                and np.array_equal(self.values, other.values, equal_nan=True))


def _valid_mask(vals: np.ndarray, nodata: float) -> np.ndarray:
    if math.isnan(nodata):
        return ~np.isnan(vals)
    return vals != nodata


# -- sampling and conversion --------------------------------------------------

def sample_elevation(raster: TerrainRaster, lat: float, lon: float) -> float:
    """Bilinear elevation at (lat, lon), in the raster's own vertical reference."""
    vals, weights = stencil_values(raster.values, raster.geometry, lat, lon)
    used = weights > 0
    if np.any(~_valid_mask(vals, raster.nodata) & used):
        raise NodataNeighborhood(f"nodata cell next to ({lat}, {lon})")
    return float(np.sum(np.where(used, vals, 0.0) * weights, axis=0))


def _undulation_field(raster: TerrainRaster, geoid: GeoidGrid) -> np.ndarray:
    lat, lon = raster.geometry.centers()
    try:
        return geoid.undulation(lat, lon)
    except OutOfExtent as exc:
        raise GeoidCoverageGap(f"geoid {geoid.name!r} does not cover the raster: {exc}") from exc


def raster_to_hae(raster: TerrainRaster, geoid: GeoidGrid) -> TerrainRaster:
    """Per-pixel ``h = H + N`` using the undulation at each pixel center."""
    if not isinstance(raster.vertical_ref, MSL):
        raise UnsupportedPath("raster_to_hae needs an MSL-referenced raster")
    n = _undulation_field(raster, geoid)
    valid = raster.valid
    out = np.where(valid, raster.values + n, raster.values)
    return replace(raster, vertical_ref=HAE(), values=out)


def raster_to_msl(raster: TerrainRaster, geoid: GeoidGrid, datum: str | None = None) -> TerrainRaster:
    """Inverse of :func:`raster_to_hae`: per-pixel ``H = h - N``."""
    if not isinstance(raster.vertical_ref, HAE):
        raise UnsupportedPath("raster_to_msl needs an HAE-referenced raster")
    n = _undulation_field(raster, geoid)
    valid = raster.valid
    out = np.where(valid, raster.values - n, raster.values)
    return replace(raster, vertical_ref=MSL(datum or geoid.name or "EGM96"), values=out)


# -- ESRI ASCII grid ----------------------------------------------------------

_ESRI_KEYS = {"ncols", "nrows", "xllcorner", "xllcenter", "yllcorner", "yllcenter",
              "cellsize", "dx", "dy", "nodata_value"}


def load_esri_ascii(source, vertical_ref: HeightReference | None = None,
                    surface_kind: str = "DTM") -> TerrainRaster:
    """Parse an ESRI ASCII grid; vertical reference and surface kind come from the caller."""
    data = _read_bytes(source)
    try:
        tokens_by_line = [line.split() for line in data.decode("utf-8").splitlines()]
    except UnicodeDecodeError as exc:
        raise MalformedHeader("ESRI grid is not UTF-8 text") from exc
    header: dict[str, float] = {}
    body_start = 0
    for body_start, toks in enumerate(tokens_by_line):
        if not toks:
            continue
        key = toks[0].lower()
        if key[0].isalpha() and key not in ("nan", "inf", "-inf"):
            if key not in _ESRI_KEYS or len(toks) != 2:
                raise MalformedHeader(f"unexpected header line: {' '.join(toks)!r}")
            try:
                header[key] = float(toks[1])
            except ValueError as exc:
                raise MalformedHeader(f"bad header value for {key}") from exc
        else:
            break
    else:
        body_start = len(tokens_by_line)

    for key in ("ncols", "nrows"):
        if key not in header:
            raise MalformedHeader(f"missing {key}")
    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    if "cellsize" in header:
        dx = dy = header["cellsize"]
    elif "dx" in header and "dy" in header:
        dx, dy = header["dx"], header["dy"]
    else:
        raise MalformedHeader("missing cellsize")
    if dx <= 0 or dy <= 0:
        raise MalformedHeader("cell size must be positive")
    if "xllcenter" in header:
        xc = header["xllcenter"]
    elif "xllcorner" in header:
        xc = header["xllcorner"] + dx / 2
    else:
        raise MalformedHeader("missing xllcorner/xllcenter")
    if "yllcenter" in header:
        yc = header["yllcenter"]
    elif "yllcorner" in header:
        yc = header["yllcorner"] + dy / 2
    else:
        raise MalformedHeader("missing yllcorner/yllcenter")
    nodata = header.get("nodata_value", DEFAULT_NODATA)

    try:
        vals = np.array([float(t) for toks in tokens_by_line[body_start:] for t in toks],
                        dtype=np.float64)
    except ValueError as exc:
        raise MalformedHeader(f"unparseable value: {exc}") from exc
    if vals.size != nrows * ncols:
        raise ValueCountMismatch(f"header declares {nrows * ncols} values, found {vals.size}")

    # first data row is the northernmost
    geom = GridGeometry(yc + (nrows - 1) * dy, xc, -dy, dx, nrows, ncols)
    return TerrainRaster(surface_kind, vertical_ref or MSL(), geom,
                         vals.reshape(nrows, ncols), nodata)


def write_esri_ascii(raster: TerrainRaster, dest=None) -> bytes:
    g = raster.geometry
    if g.dlat >= 0:
        raster = flip_north_up(raster)
        g = raster.geometry
    buf = io.StringIO()
    buf.write(f"ncols {g.ncols}\nnrows {g.nrows}\n")
    buf.write(f"xllcenter {g.lon0!r}\n")
    buf.write(f"yllcenter {g.lat0 + (g.nrows - 1) * g.dlat!r}\n")
    if -g.dlat == g.dlon:
        buf.write(f"cellsize {g.dlon!r}\n")
    else:
        buf.write(f"dx {g.dlon!r}\ndy {-g.dlat!r}\n")
    buf.write(f"NODATA_value {raster.nodata!r}\n")
    for row in raster.values:
        buf.write(" ".join(repr(float(v)) for v in row))
        buf.write("\n")
    data = buf.getvalue().encode("utf-8")
    _emit(data, dest)
    return data


def flip_north_up(raster: TerrainRaster) -> TerrainRaster:
    """Reorder rows so the first row is the northernmost (dlat < 0)."""
    g = raster.geometry
    if g.dlat < 0:
        return raster
    geom = GridGeometry(g.lat0 + (g.nrows - 1) * g.dlat, g.lon0, -g.dlat, g.dlon, g.nrows, g.ncols)
    return replace(raster, geometry=geom, values=raster.values[::-1].copy())


# -- extended UGG binary ------------------------------------------------------

def load_terrain_ugg(source) -> TerrainRaster:
    data = _read_bytes(source)
    if len(data) < _EXT_HEADER.size:
        raise MalformedHeader("truncated extended-UGG header")
    (magic, lat0, lon0, dlat, dlon, nrows, ncols,
     kind, vref, label, nodata) = _EXT_HEADER.unpack_from(data)
    if magic != MAGIC_BINARY:
        raise MalformedHeader(f"bad magic {magic!r}")
    if kind > 1 or vref > 1:
        raise MalformedHeader("bad surface_kind / vertical_ref code")
    payload = data[_EXT_HEADER.size:]
    if len(payload) != nrows * ncols * 4:
        raise ValueCountMismatch(
            f"header declares {nrows * ncols} values, payload holds {len(payload) / 4:g}")
    vals = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    datum = label.rstrip(b"\x00").decode("utf-8")
    ref = HAE() if vref == 1 else MSL(datum or "EGM96")
    geom = GridGeometry(lat0, lon0, dlat, dlon, nrows, ncols)
    return TerrainRaster(SURFACE_KINDS[kind], ref, geom, vals.reshape(nrows, ncols), float(nodata))


def write_terrain_ugg(raster: TerrainRaster, dest=None) -> bytes:
    g = raster.geometry
    ref = raster.vertical_ref
    label = ref.datum.encode("utf-8") if isinstance(ref, MSL) else b""
    if len(label) > 16:
        raise ValueError("datum label longer than 16 bytes")
    header = _EXT_HEADER.pack(MAGIC_BINARY, g.lat0, g.lon0, g.dlat, g.dlon, g.nrows, g.ncols,
                              SURFACE_KINDS.index(raster.surface_kind),
                              _VREF_CODES[type(ref).__name__], label, raster.nodata)
    data = header + raster.values.astype("<f4").tobytes()
    _emit(data, dest)
    return data


def is_terrain_ugg(data: bytes) -> bool:
    """Extended and plain UGG binaries differ in header size by 22 bytes, which no
    whole number of float32 values can absorb."""
    return data[:4] == MAGIC_BINARY and (len(data) - _EXT_HEADER.size) % 4 == 0


def load_terrain(path, vertical_ref: HeightReference | None = None,
                 surface_kind: str = "DTM") -> TerrainRaster:
    """Load a raster file, choosing extended-UGG or ESRI ASCII from its content."""
    data = _read_bytes(path)
    if data[:4] == MAGIC_BINARY:
        if not is_terrain_ugg(data):
            raise MalformedHeader("binary file is a plain UGG geoid grid, not a terrain raster")
        return load_terrain_ugg(data)
    return load_esri_ascii(data, vertical_ref, surface_kind)


def describe(raster: TerrainRaster) -> dict:
    g = raster.geometry
    valid = raster.valid
    v = raster.values[valid]
    return {
        "surface_kind": raster.surface_kind,
        "vertical_ref": raster.vertical_ref.to_json(),
        "lat0": g.lat0, "lon0": g.lon0, "dlat": g.dlat, "dlon": g.dlon,
        "nrows": g.nrows, "ncols": g.ncols,
        "nodata": raster.nodata,
        "nodata_count": int(valid.size - valid.sum()),
        "min_m": float(v.min()) if v.size else None,
        "max_m": float(v.max()) if v.size else None,
        "mean_m": float(v.mean()) if v.size else None,
    }


def _emit(data: bytes, dest) -> None:
    if dest is None:
        return
    if hasattr(dest, "write"):
        dest.write(data)
    else:
        with open(dest, "wb") as f:
            f.write(data)
