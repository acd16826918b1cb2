"""Deterministic fixtures: an airport calibration scene, a four-mode terrain
raster and noisy flight logs.  Nothing here reads real-world data."""

from __future__ import annotations

import numpy as np

from .geoid import GeoidGrid
from .grid import GridGeometry
from .heights import CalibrationPoint, calibration_from_terrain
from .logstats import FlightLogRecord
from .references import HAE, MSL
from .terrain import TerrainRaster

# -- airport calibration scene -----------------------------------------------

AIRPORT_LAT = 22.308
AIRPORT_LON = 113.918
AIRPORT_N_M = -3.1
AIRPORT_ELEV_MSL_M = 4.0
AIRPORT_PRESSURE_HPA = 1005.4
AIRPORT_TEMP_C = 24.3
AIRCRAFT_PRESSURE_HPA = 998.0


def airport_geoid(n: int = 5, step: float = 0.05) -> GeoidGrid:
    """Constant-undulation grid centred on the airport cell."""
    half = (n - 1) / 2 * step
    return GeoidGrid.from_arrays("airport-fixture", AIRPORT_LAT - half, AIRPORT_LON - half,
                                 step, step, np.full((n, n), AIRPORT_N_M))


def airport_dem(n: int = 5, step: float = 0.01) -> TerrainRaster:
    half = (n - 1) / 2 * step
    geom = GridGeometry(AIRPORT_LAT + half, AIRPORT_LON - half, -step, step, n, n)
    return TerrainRaster("DTM", MSL("EGM96"), geom, np.full((n, n), AIRPORT_ELEV_MSL_M))


def airport_calibration(geoid: GeoidGrid | None = None,
                        dem: TerrainRaster | None = None) -> CalibrationPoint:
    return calibration_from_terrain(AIRPORT_LAT, AIRPORT_LON, AIRPORT_PRESSURE_HPA, AIRPORT_TEMP_C,
                                    dem or airport_dem(), geoid or airport_geoid())


# -- four-mode terrain ----------------------------------------------------------

# (center m, half-width m, area fraction); the last mode absorbs any rounding
FOUR_MODES = ((25.79, 10.0, 0.33), (87.85, 10.0, 0.60), (210.0, 30.0, 0.067), (870.0, 40.0, 0.003))


def mode_counts(n: int, modes=FOUR_MODES) -> list[int]:
    """Odd pixel counts per mode (so each mode's median is its center)."""
    counts = [int(round(frac * n)) | 1 for _, _, frac in modes[:-1]]
    counts.append(n - sum(counts))
    if counts[-1] < 1:
        raise ValueError(f"{n} values are too few to populate every mode")
    return counts


def mode_values(n: int, modes=FOUR_MODES) -> np.ndarray:
    """Ascending heights: each mode spread evenly over center +- half-width."""
    parts = [c + hw * np.linspace(-1.0, 1.0, k)
             for (c, hw, _), k in zip(modes, mode_counts(n, modes))]
    return np.sort(np.concatenate(parts))


def _relief(nrows: int, ncols: int) -> np.ndarray:
    # smooth field whose rank order lays the modes out as coherent patches
    y, x = np.mgrid[0:nrows, 0:ncols]
    u, v = x / ncols, y / nrows
    f = 0.6 * u + 0.3 * v + 0.08 * np.sin(5.0 * u) * np.cos(4.0 * v)
    f += 1.5 * np.exp(-((u - 0.85) ** 2 + (v - 0.2) ** 2) / 0.02)
    return f + 1e-9 * (y * ncols + x)      # unique ranks


def four_mode_raster(nrows: int = 512, ncols: int = 512, lat0: float = 22.70, lon0: float = 113.80,
                     step: float = 0.0005, reference=None) -> TerrainRaster:
    """HAE raster whose height distribution is the four modes above."""
    vals = mode_values(nrows * ncols)
    out = np.empty(nrows * ncols)
    out[np.argsort(_relief(nrows, ncols).ravel(), kind="stable")] = vals
    geom = GridGeometry(lat0, lon0, -step, step, nrows, ncols)
    return TerrainRaster("DSM", reference or HAE(), geom, out.reshape(nrows, ncols))


def constant_geoid_over(geom: GridGeometry, n_m: float, name: str = "constant") -> GeoidGrid:
    """Coarse constant grid covering ``geom`` with a one-cell margin."""
    south, north, west, east = geom.bounds()
    step = max(north - south, east - west) / 4
    return GeoidGrid.from_arrays(name, south - step, west - step, step, step,
                                 np.full((7, 7), float(n_m)))


# -- flight logs ----------------------------------------------------------------

def synthetic_logs(n_records: int = 10_000, n_segments: int = 10, sigma_baro: float = 4.0,
                   epv_mean: float = 0.5, epv_jitter: float = 0.05, seed: int = 42,
                   bias_range: float = 20.0, rate_hz: float = 5.0, ground_n: int = 10,
                   ground_sigma: float = 0.1) -> list[FlightLogRecord]:
    """Logs with Gaussian baro noise around RTK truth plus a constant bias per segment.

    Each segment opens with ``ground_n`` pre-flight samples whose noise is only
    ``ground_sigma``, so the initial-bias estimate is sharp and the extracted
    sigma reflects the in-flight noise.
    """
    rng = np.random.default_rng(seed)
    sizes = np.full(n_segments, n_records // n_segments)
    sizes[: n_records % n_segments] += 1
    out: list[FlightLogRecord] = []
    for s, m in enumerate(sizes):
        t = np.arange(m) / rate_hz
        rtk = 60.0 + 40.0 * np.sin(t / 30.0) + 0.05 * t
        bias = rng.uniform(-bias_range, bias_range)
        noise = rng.normal(0.0, sigma_baro, m)
        g = min(ground_n, m)
        noise[:g] = rng.normal(0.0, ground_sigma, g)
        baro = rtk + bias + noise
        epv = np.abs(epv_mean + rng.normal(0.0, epv_jitter, m))
        seg = f"seg{s:03d}"
        out.extend(FlightLogRecord(float(a), seg, float(b), float(c), float(d))
                   for a, b, c, d in zip(t, baro, rtk, epv))
    return out
