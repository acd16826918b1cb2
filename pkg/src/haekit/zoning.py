"""HAE-thresholded airspace zoning.

Pipeline: HAE raster -> 1-D K-means (elbow-selected k) -> cluster maxima
rounded to tens as thresholds -> simple regions (low, flat, most of the area)
and one complex region split into fixed-height bands -> baselines and
Class-W ceilings -> zones whose masks partition the valid pixels.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyInput, UnsupportedPath
from .kmeans import ClusterModel, elbow_k, kmeans_1d
from .references import HAE
from .terrain import TerrainRaster

CLASS_W_HEIGHT_M = 120.0
CLASS_G_HEIGHT_M = 300.0


@dataclass
class ZoningConfig:
    k: int | None = None
    k_max: int = 8
    seed: int = 42
    area_fraction_threshold: float = 0.85
    interval: float = 100.0
    n_init: int = 10


@dataclass(frozen=True)
class RegionStats:
    pixel_count: int
    mean_m: float
    std_m: float
    q1_m: float
    median_m: float
    q3_m: float
    min_m: float
    max_m: float
    skew: float
    kurtosis: float

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Band:
    lower: float
    upper: float

    @property
    def baseline(self) -> float:
        return self.upper


@dataclass(frozen=True, eq=False)
class Zone:
    id: str
    category: str            # "simple" | "complex-band"
    mask: np.ndarray = field(repr=False)
    baseline_hae_m: float
    classW_ceiling_hae_m: float
    stats: RegionStats
    hae_lower_m: float | None = None
    hae_upper_m: float | None = None

    @property
    def classG_ceiling_hae_m(self) -> float:
        return self.baseline_hae_m + CLASS_G_HEIGHT_M


# -- small rules --------------------------------------------------------------

def round_half_up(x: float, step: float) -> float:
    return math.floor(x / step + 0.5) * step


def round_to_tens(x: float) -> float:
    return round_half_up(x, 10.0)


def classW_ceiling(baseline: float) -> float:
    return baseline + CLASS_W_HEIGHT_M


def baseline_simple(values) -> float:
    """Median of the region rounded to the nearest multiple of 5 m."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInput("empty region")
    return round_half_up(float(np.median(v)), 5.0)


def classify_fractions(fractions, area_fraction_threshold: float = 0.85) -> tuple[list[int], list[int]]:
    """Split ascending clusters into a simple prefix and a complex remainder.

    Clusters join the simple set in ascending order until their cumulative
    area fraction reaches the threshold.
    """
    simple: list[int] = []
    cum = 0.0
    for j, f in enumerate(fractions):
        simple.append(j)
        cum += f
        if cum >= area_fraction_threshold:
            break
    return simple, list(range(len(simple), len(fractions)))


def classify_regions(model: ClusterModel, area_fraction_threshold: float = 0.85):
    return classify_fractions(model.fractions, area_fraction_threshold)


def complex_bands(values, interval: float = 100.0) -> list[Band]:
    """Non-empty ``interval``-high bands covering the values; topmost band is closed."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInput("empty complex region")
    if not interval > 0:
        raise ValueError("interval must be positive")
    first, idx = _band_indices(v, interval)
    return [Band((first + i) * interval, (first + i + 1) * interval)
            for i in np.unique(idx)]


def _band_indices(v: np.ndarray, interval: float) -> tuple[int, np.ndarray]:
    lo, hi = float(v.min()), float(v.max())
    first = math.floor(lo / interval)
    first -= lo < first * interval           # quotient rounded up onto a boundary
    last = math.ceil(hi / interval)
    last += hi > last * interval
    last = max(last, first + 1)
    top = last - first - 1
    idx = np.clip(np.floor(v / interval).astype(np.int64) - first, 0, top)
    # the division can land one band off right at a boundary; settle it by comparison
    idx = idx - ((v < (first + idx) * interval) & (idx > 0))
    idx = idx + ((v >= (first + idx + 1) * interval) & (idx < top))
    return first, idx


def region_stats(values) -> RegionStats:
    """Mean, sample std, linear quartiles, adjusted skewness and excess kurtosis."""
    v = np.asarray(values, dtype=np.float64).ravel()
    n = v.size
    if n == 0:
        raise EmptyInput("empty region")
    mean = float(v.mean())
    d = v - mean
    sd = math.sqrt(float(np.mean(d ** 2)))
    skew = kurt = 0.0
    if sd > 0:
        z = d / sd                  # standardize first; raw moments underflow for tiny spreads
        if n >= 3:
            skew = math.sqrt(n * (n - 1)) / (n - 2) * float(np.mean(z ** 3))
        if n >= 4:
            g2 = float(np.mean(z ** 4)) - 3.0
            kurt = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6.0)
    std = float(np.std(v, ddof=1)) if n > 1 else 0.0
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return RegionStats(n, mean, std, float(q1), float(med), float(q3),
                       float(v.min()), float(v.max()), float(skew), float(kurt))


# -- pipeline -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZoningResult:
    zones: list[Zone]
    model: ClusterModel
    simple_clusters: list[int]
    complex_clusters: list[int]
    thresholds_m: list[float]


def run_zoning_pipeline(raster_hae: TerrainRaster, config: ZoningConfig | None = None) -> list[Zone]:
    return zone_raster(raster_hae, config).zones


def zone_raster(raster_hae: TerrainRaster, config: ZoningConfig | None = None) -> ZoningResult:
    config = config or ZoningConfig()
    if not isinstance(raster_hae.vertical_ref, HAE):
        raise UnsupportedPath("zoning needs an HAE raster; convert it with raster_to_hae first")
    valid = raster_hae.valid
    heights = raster_hae.values
    v = heights[valid]
    if v.size == 0:
        raise EmptyInput("raster has no valid pixels")

    k = config.k or elbow_k(v, config.k_max, config.seed, config.n_init)
    model = kmeans_1d(v, k, config.seed, config.n_init)
    simple_ids, complex_ids = classify_regions(model, config.area_fraction_threshold)

    thresholds = [round_to_tens(model.maxima[j]) for j in simple_ids]
    if not complex_ids:
        thresholds[-1] = math.inf

    zones: list[Zone] = []
    lower = -math.inf
    for t in thresholds:
        if t <= lower:
            continue
        mask = valid & (heights > lower) & (heights <= t)
        lower = t
        if not mask.any():
            continue
        region = heights[mask]
        base = baseline_simple(region)
        zones.append(Zone(f"simple-{len(zones) + 1}", "simple", mask, base,
                          classW_ceiling(base), region_stats(region)))

    cmask = valid & (heights > lower)
    if cmask.any():
        cvals = heights[cmask]
        first, idx = _band_indices(cvals, config.interval)
        for i in np.unique(idx):
            band = Band((first + i) * config.interval, (first + i + 1) * config.interval)
            mask = np.zeros_like(cmask)
            mask[cmask] = idx == i
            region = heights[mask]
            zones.append(Zone(f"complex-band-{band.lower:g}-{band.upper:g}", "complex-band", mask,
                              band.baseline, classW_ceiling(band.baseline), region_stats(region),
                              band.lower, band.upper))
    return ZoningResult(zones, model, simple_ids, complex_ids,
                        [t for t in thresholds if math.isfinite(t)])

