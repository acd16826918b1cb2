"""Regular lat/lon grid geometry and bilinear interpolation.

Both geoid grids and terrain rasters use cell-center registration: row ``i``
sits at ``lat0 + i*dlat`` and column ``j`` at ``lon0 + j*dlon``.  ``dlat`` may
be negative (north-up rasters), ``dlon`` is always positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGrid, OutOfExtent

_GLOBAL_TOL = 1e-9
# a coordinate this many ulps from a cell center is that center
CENTER_ULPS = 4


@dataclass(frozen=True)
class GridGeometry:
    lat0: float
    lon0: float
    dlat: float
    dlon: float
    nrows: int
    ncols: int

    def __post_init__(self):
        for name in ("lat0", "lon0", "dlat", "dlon"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidGrid(f"{name} must be finite")
        if self.nrows < 2 or self.ncols < 2:
            raise InvalidGrid(f"grid must be at least 2x2, got {self.nrows}x{self.ncols}")
        if self.dlat == 0:
            raise InvalidGrid("dlat must be non-zero")
        if self.dlon <= 0:
            raise InvalidGrid("dlon must be positive")
        if (self.ncols - 1) * self.dlon > 360.0 + _GLOBAL_TOL:
            raise InvalidGrid("longitude span exceeds 360 degrees")
        lat_last = self.lat0 + (self.nrows - 1) * self.dlat
        if min(self.lat0, lat_last) < -90.0 - _GLOBAL_TOL or max(self.lat0, lat_last) > 90.0 + _GLOBAL_TOL:
            raise InvalidGrid("row centers outside [-90, 90]")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def wraps(self) -> bool:
        """True when the columns close the full circle (last column neighbours the first)."""
        return abs(self.ncols * self.dlon - 360.0) < _GLOBAL_TOL

    @property
    def is_global(self) -> bool:
        return self.wraps or (self.ncols - 1) * self.dlon >= 360.0 - _GLOBAL_TOL

    def row_lats(self) -> np.ndarray:
        return self.lat0 + np.arange(self.nrows) * self.dlat

    def col_lons(self) -> np.ndarray:
        return self.lon0 + np.arange(self.ncols) * self.dlon

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-center (lat, lon) arrays of shape (nrows, ncols)."""
        lon, lat = np.meshgrid(self.col_lons(), self.row_lats())
        return lat, lon

    def bounds(self) -> tuple[float, float, float, float]:
        """Cell-edge extent as (south, north, west, east)."""
        lats = (self.lat0, self.lat0 + (self.nrows - 1) * self.dlat)
        half_lat = abs(self.dlat) / 2
        west = self.lon0 - self.dlon / 2
        return (min(lats) - half_lat, max(lats) + half_lat,
                west, west + self.ncols * self.dlon)

    def same_as(self, other: "GridGeometry") -> bool:
        return (self.lat0, self.lon0, self.dlat, self.dlon, self.nrows, self.ncols) == (
            other.lat0, other.lon0, other.dlat, other.dlon, other.nrows, other.ncols)

    # -- locating ---------------------------------------------------------

    def _row_offsets(self, lat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fy = (lat - self.lat0) / self.dlat
        fy = _snap(fy, lat, self.lat0, self.dlat)
        last = self.nrows - 1
        if self.is_global:
            bad = (lat < -90.0) | (lat > 90.0)
        else:
            bad = (fy < -0.5) | (fy > last + 0.5)
        bad |= ~np.isfinite(fy)
        if np.any(bad):
            raise OutOfExtent(f"latitude {_first(lat, bad)} outside grid extent")
        fy = np.clip(fy, 0.0, last)
        i0 = np.minimum(np.floor(fy).astype(np.int64), last - 1)
        return i0, fy - i0

    def _col_offsets(self, lon: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not np.all(np.isfinite(lon)):
            raise OutOfExtent("non-finite longitude")
        half = self.dlon / 2
        # wrap into [lon0 - half, lon0 - half + 360); in-range offsets skip the
        # mod, which would round at the 360 degree scale
        rel = lon - self.lon0
        out = (rel < -half) | (rel >= 360.0 - half)
        if np.any(out):
            rel = np.where(out, np.mod(rel + half, 360.0) - half, rel)
        turns = np.round((lon - self.lon0 - rel) / 360.0) * 360.0
        fx = _snap(rel / self.dlon, lon - turns, self.lon0, self.dlon)
        last = self.ncols - 1
        if self.wraps:
            fx = np.where(fx >= self.ncols, fx - self.ncols, fx)
            fx = np.where(fx < 0, fx + self.ncols, fx)
            j0 = np.minimum(np.floor(fx).astype(np.int64), last)
            j1 = (j0 + 1) % self.ncols
            return j0, j1, fx - j0
        bad = fx > last + 0.5
        if np.any(bad):
            raise OutOfExtent(f"longitude {_first(lon, bad)} outside grid extent")
        fx = np.clip(fx, 0.0, last)
        j0 = np.minimum(np.floor(fx).astype(np.int64), last - 1)
        return j0, j0 + 1, fx - j0

    def locate(self, lat, lon):
        """Return (i0, j0, j1, ty, tx) bilinear stencil indices and weights."""
        lat = np.asarray(lat, dtype=np.float64)
        lon = np.asarray(lon, dtype=np.float64)
        i0, ty = self._row_offsets(lat)
        j0, j1, tx = self._col_offsets(lon)
        return np.broadcast_arrays(i0, j0, j1, ty, tx)


def _snap(f: np.ndarray, coord: np.ndarray, origin: float, step: float) -> np.ndarray:
    r = np.round(f)
    center = origin + r * step
    tol = CENTER_ULPS * np.spacing(np.maximum(np.abs(center), np.abs(coord)))
    return np.where(np.abs(center - coord) <= tol, r, f)


def _first(a: np.ndarray, mask: np.ndarray) -> float:
    return float(np.broadcast_to(a, mask.shape)[mask].flat[0])


def bilinear(values: np.ndarray, geom: GridGeometry, lat, lon) -> np.ndarray:
    """Bilinear interpolation of ``values`` (nrows x ncols) at the given points."""
    i0, j0, j1, ty, tx = geom.locate(lat, lon)
    i1 = i0 + 1
    v00 = values[i0, j0]
    v01 = values[i0, j1]
    v10 = values[i1, j0]
    v11 = values[i1, j1]
    return (v00 * (1 - tx) * (1 - ty) + v01 * tx * (1 - ty)
            + v10 * (1 - tx) * ty + v11 * tx * ty)


def stencil_values(values: np.ndarray, geom: GridGeometry, lat, lon):
    """The four neighbour values and weights used by :func:`bilinear`."""
    i0, j0, j1, ty, tx = geom.locate(lat, lon)
    i1 = i0 + 1
    vals = np.stack([values[i0, j0], values[i0, j1], values[i1, j0], values[i1, j1]])
    weights = np.stack([(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty])
    return vals, weights
