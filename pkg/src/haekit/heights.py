"""Height-system conversions routed through HAE.

Every reference converts to HAE and back:

* MSL  <-> HAE : ``h = H + N`` with N from a geoid grid
* AGL  <-> HAE : ``h = agl + ground_hae`` with the ground sampled from a terrain raster
* Baro <-> HAE : calibrated against a point of known HAE and pressure

A ``Baro`` height is the reading, in meters, of an altimeter set to the
reference's pressure.  The reading is modelled hypsometrically with the
calibration point's layer-mean temperature, so for any Q-code::

    h = calib.hae_m + reading - thickness(ref_pressure, calib.pressure)

For QFE set to the calibration pressure the last term vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MissingContext, NonPositivePressure, OutOfDomain, UnsupportedPath
from .geoid import GeoidGrid
from .references import AGL, HAE, MSL, Baro, Height, HeightReference
from .terrain import TerrainRaster, sample_elevation

R_DRY = 287.05287      # J/(kg K)
G0 = 9.80665           # m/s^2
KELVIN = 273.15
HPA_TO_M_EMPIRICAL = 8.3


@dataclass(frozen=True)
class CalibrationPoint:
    lat: float
    lon: float
    hae_m: float
    pressure_hPa: float
    mean_temp_C: float

    def __post_init__(self):
        if not 300.0 < self.pressure_hPa < 1100.0:
            raise OutOfDomain(f"calibration pressure {self.pressure_hPa} hPa outside (300, 1100)")
        if not -90.0 < self.mean_temp_C < 60.0:
            raise OutOfDomain(f"mean temperature {self.mean_temp_C} C outside (-90, 60)")
        if not math.isfinite(self.hae_m):
            raise OutOfDomain("calibration HAE must be finite")

    @classmethod
    def from_json(cls, d: dict) -> "CalibrationPoint":
        return cls(float(d["lat"]), float(d["lon"]), float(d["hae_m"]),
                   float(d["pressure_hPa"]), float(d["mean_temp_C"]))

    def to_json(self) -> dict:
        return {"lat": self.lat, "lon": self.lon, "hae_m": self.hae_m,
                "pressure_hPa": self.pressure_hPa, "mean_temp_C": self.mean_temp_C}


@dataclass(frozen=True)
class ConversionContext:
    geoid: GeoidGrid | None = None
    terrain: TerrainRaster | None = None
    calibration: CalibrationPoint | None = None

    def require(self, which: str):
        value = getattr(self, which)
        if value is None:
            raise MissingContext(which)
        return value


# -- elementary models --------------------------------------------------------

def msl_to_hae(H: float, N: float) -> float:
    return H + N


def hae_to_msl(h: float, N: float) -> float:
    return h - N


def agl_to_hae(agl: float, ground_hae: float) -> float:
    return agl + ground_hae


def hae_to_agl(h: float, ground_hae: float) -> float:
    return h - ground_hae


def hypsometric_thickness(p_ref: float, p: float, mean_temp_C: float) -> float:
    """Dry-air layer depth (m) from pressure level ``p_ref`` up to ``p``.

    Negative when ``p > p_ref`` (the point lies below the reference level).
    """
    if not (p_ref > 0 and p > 0):
        raise NonPositivePressure(f"pressures must be positive, got {p_ref}, {p}")
    scale = R_DRY * (mean_temp_C + KELVIN) / G0
    # ordered ratio keeps thickness(a, b) == -thickness(b, a) bit-exact
    if p_ref >= p:
        return scale * math.log(p_ref / p)
    return -(scale * math.log(p / p_ref))


def baro_to_hae_calibrated(aircraft_pressure_hPa: float, calib: CalibrationPoint) -> float:
    return calib.hae_m + hypsometric_thickness(calib.pressure_hPa, aircraft_pressure_hPa,
                                               calib.mean_temp_C)


def qnh_offset_to_hae(aircraft_qnh_alt: float, calib_qnh_alt: float, calib_hae: float) -> float:
    return aircraft_qnh_alt - calib_qnh_alt + calib_hae


def empirical_pressure_to_msl(pressure_hPa: float, qnh_hPa: float) -> float:
    """Rule-of-thumb MSL height: 8.3 m per hPa below the QNH setting."""
    if not (pressure_hPa > 0 and qnh_hPa > 0):
        raise NonPositivePressure("pressures must be positive")
    return (qnh_hPa - pressure_hPa) * HPA_TO_M_EMPIRICAL


def baro_reading(pressure_hPa: float, reference: Baro, mean_temp_C: float) -> float:
    """Altimeter reading (m) at ``pressure_hPa`` for an altimeter set to ``reference``."""
    return hypsometric_thickness(reference.ref_pressure_hPa, pressure_hPa, mean_temp_C)


def calibration_from_terrain(lat: float, lon: float, pressure_hPa: float, mean_temp_C: float,
                             terrain: TerrainRaster, geoid: GeoidGrid | None = None) -> CalibrationPoint:
    """Calibration point whose HAE is the terrain height at (lat, lon) lifted to HAE."""
    ground = ground_hae(ConversionContext(geoid=geoid, terrain=terrain), lat, lon)
    return CalibrationPoint(lat, lon, ground, pressure_hPa, mean_temp_C)


def ground_hae(ctx: ConversionContext, lat: float, lon: float, surface: str | None = None) -> float:
    terrain = ctx.require("terrain")
    if surface is not None and terrain.surface_kind != surface:
        raise UnsupportedPath(
            f"AGL over {surface} needs a {surface} raster, context holds {terrain.surface_kind}")
    elev = sample_elevation(terrain, lat, lon)
    if isinstance(terrain.vertical_ref, HAE):
        return elev
    geoid = ctx.require("geoid")
    return msl_to_hae(elev, geoid.undulation(lat, lon))


# -- dispatcher ---------------------------------------------------------------

def to_hae(height: Height, ctx: ConversionContext, lat: float, lon: float) -> float:
    ref = height.reference
    v = height.value_m
    if isinstance(ref, HAE):
        return v
    if isinstance(ref, MSL):
        return msl_to_hae(v, ctx.require("geoid").undulation(lat, lon))
    if isinstance(ref, AGL):
        return agl_to_hae(v, ground_hae(ctx, lat, lon, ref.surface))
    if isinstance(ref, Baro):
        calib = ctx.require("calibration")
        calib_reading = baro_reading(calib.pressure_hPa, ref, calib.mean_temp_C)
        return qnh_offset_to_hae(v, calib_reading, calib.hae_m)
    raise UnsupportedPath(f"unknown reference {ref!r}")


def from_hae(h: float, target: HeightReference, ctx: ConversionContext,
             lat: float, lon: float) -> float:
    if isinstance(target, HAE):
        return h
    if isinstance(target, MSL):
        return hae_to_msl(h, ctx.require("geoid").undulation(lat, lon))
    if isinstance(target, AGL):
        return hae_to_agl(h, ground_hae(ctx, lat, lon, target.surface))
    if isinstance(target, Baro):
        calib = ctx.calibration
        if calib is None:
            raise UnsupportedPath("barometric target requires a calibration point")
        calib_reading = baro_reading(calib.pressure_hPa, target, calib.mean_temp_C)
        return h - calib.hae_m + calib_reading
    raise UnsupportedPath(f"unknown reference {target!r}")


def convert(height: Height, target: HeightReference, ctx: ConversionContext,
            lat: float, lon: float) -> Height:
    if height.reference == target:
        return height
    h = to_hae(height, ctx, lat, lon)
    return Height(from_hae(h, target, ctx, lat, lon), target)
