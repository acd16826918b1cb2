from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from haekit import synthetic
from haekit.errors import EmptyInput, UnsupportedPath
from haekit.grid import GridGeometry
from haekit.references import HAE, MSL
from haekit.terrain import TerrainRaster
from haekit.zonedoc import (load_zone_document, mask_polygons, mask_to_rle, publish_zones,
                            rle_to_mask, trace_rings)
from haekit.zoning import (Band, ZoningConfig, baseline_simple, classify_fractions, classW_ceiling,
                           complex_bands, region_stats, round_to_tens, zone_raster)


def _hae_raster(vals, step=0.001, nodata=-9999.0):
    vals = np.asarray(vals, float)
    geom = GridGeometry(22.6, 113.9, -step, step, *vals.shape)
    return TerrainRaster("DSM", HAE(), geom, vals, nodata)


def test_round_to_tens():
    assert round_to_tens(63.96) == 60
    assert round_to_tens(178.90) == 180
    assert round_to_tens(25.79) == 30
    assert round_to_tens(25.0) == 30
    assert round_to_tens(-25.0) == -20


def test_class_w_ceilings():
    assert [classW_ceiling(b) for b in (25, 90, 300)] == [145, 210, 420]
    assert Band(200.0, 300.0).baseline == 300.0


def test_baseline_simple():
    assert baseline_simple([25.79]) == 25
    assert baseline_simple([87.85]) == 90
    assert baseline_simple([20.0, 25.79, 40.0]) == 25
    assert baseline_simple(np.full(9, 40.0)) == 40
    with pytest.raises(EmptyInput):
        baseline_simple([])


def test_classify_fractions():
    assert classify_fractions([0.6128, 0.272, 0.0857, 0.0295]) == ([0, 1], [2, 3])
    assert classify_fractions([1.0]) == ([0], [])
    assert classify_fractions([0.5, 0.5]) == ([0, 1], [])


def test_complex_bands():
    bands = complex_bands([210.0, 250.0, 299.0])
    assert bands == [Band(200.0, 300.0)]
    assert classW_ceiling(bands[0].baseline) == 420
    assert complex_bands([150.0, 420.0]) == [Band(100.0, 200.0), Band(400.0, 500.0)]
    # topmost band closed above: a value on the top edge stays in it
    assert complex_bands([250.0, 300.0]) == [Band(200.0, 300.0)]
    with pytest.raises(EmptyInput):
        complex_bands([])


def test_region_stats_examples():
    s = region_stats([1, 2, 3, 4, 5])
    assert (s.mean_m, s.median_m, s.q1_m, s.q3_m) == (3, 3, 2, 4)
    assert s.skew == pytest.approx(0.0, abs=1e-12)
    c = region_stats(np.full(10, 40.0))
    assert (c.std_m, c.skew, c.kurtosis) == (0.0, 0.0, 0.0)


def test_region_stats_vs_scipy():
    rng = np.random.default_rng(12)
    v = rng.gamma(2.0, 10.0, 500)
    s = region_stats(v)
    assert s.std_m == pytest.approx(np.std(v, ddof=1), rel=1e-12)
    assert s.skew == pytest.approx(sps.skew(v, bias=False), rel=1e-10)
    assert s.kurtosis == pytest.approx(sps.kurtosis(v, bias=False), rel=1e-10)


def test_requires_hae():
    r = TerrainRaster("DSM", MSL(), GridGeometry(0, 0, -1, 1, 2, 2), np.zeros((2, 2)))
    with pytest.raises(UnsupportedPath):
        zone_raster(r)


def test_flat_raster_single_zone():
    res = zone_raster(_hae_raster(np.full((6, 6), 43.0)))
    assert len(res.zones) == 1
    z = res.zones[0]
    assert z.category == "simple" and z.baseline_hae_m == 45.0 and z.mask.all()


def test_four_mode_end_to_end():
    r = synthetic.four_mode_raster(96, 96)
    res = zone_raster(r, ZoningConfig(k=4))
    simple = [z for z in res.zones if z.category == "simple"]
    assert len(simple) == 2
    assert [z.baseline_hae_m for z in simple] == [25.0, 90.0]
    for z in res.zones:
        assert z.classW_ceiling_hae_m - z.baseline_hae_m == 120
        assert z.classG_ceiling_hae_m - z.baseline_hae_m == 300


def test_document_round_trip_and_determinism():
    r = synthetic.four_mode_raster(48, 48)
    a = publish_zones(zone_raster(r, ZoningConfig(k=4)).zones, r.geometry)
    b = publish_zones(zone_raster(r, ZoningConfig(k=4)).zones, r.geometry)
    assert a == b
    doc = load_zone_document(a)
    zones = zone_raster(r, ZoningConfig(k=4)).zones
    assert [z.id for z in doc.zones] == [z.id for z in zones]
    for got, want in zip(doc.zones, zones):
        assert np.array_equal(got.mask, want.mask)
    d = json.loads(a)
    assert d["meta"]["classG_msl_limit_m"] == 6000 and d["meta"]["classG_msl_limit_enforced"] is False
    assert all(len(z["polygons"]) > 0 for z in d["zones"])


def test_empty_document():
    d = json.loads(publish_zones([], GridGeometry(0, 0, -1, 1, 2, 2), {"note": "x"}))
    assert d["zones"] == [] and d["meta"]["raster"]["nrows"] == 2 and d["meta"]["note"] == "x"


def test_polygon_square():
    mask = np.zeros((4, 4), bool)
    mask[1:3, 1:3] = True
    rings = trace_rings(mask)
    assert len(rings) == 1 and sorted(rings[0]) == [(1, 1), (1, 3), (3, 1), (3, 3)]
    poly = mask_polygons(mask, GridGeometry(10.0, 20.0, -1.0, 1.0, 4, 4))[0]
    assert poly[0] == poly[-1]
    assert sorted(map(tuple, poly[:-1])) == [(7.5, 20.5), (7.5, 22.5), (9.5, 20.5), (9.5, 22.5)]


# -- properties ---------------------------------------------------------------

def _signed_area(ring):
    r = np.array([p[0] for p in ring], float)
    c = np.array([p[1] for p in ring], float)
    return 0.5 * np.sum(c * np.roll(r, -1) - np.roll(c, -1) * r)


@st.composite
def masks(draw):
    nrows, ncols = draw(st.integers(1, 9)), draw(st.integers(1, 9))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.floats(0.0, 1.0))
    return np.random.default_rng(seed).random((nrows, ncols)) < p


@given(masks())
def test_rle_round_trip(mask):
    assert np.array_equal(rle_to_mask(mask_to_rle(mask), *mask.shape), mask)


@given(masks())
def test_ring_area_equals_cell_count(mask):
    rings = trace_rings(mask)
    # outer rings run clockwise in (row, col) and holes the other way, so areas sum to the cell count
    assert sum(_signed_area(r) for r in rings) == pytest.approx(mask.sum())
    assert (len(rings) > 0) == bool(mask.any())
    for r in rings:
        assert len(r) >= 4


@st.composite
def hae_rasters(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    nrows, ncols = draw(st.integers(2, 12)), draw(st.integers(2, 12))
    modes = rng.uniform(-50, 900, draw(st.integers(1, 4)))
    vals = rng.choice(modes, (nrows, ncols)) + rng.normal(0, draw(st.sampled_from([0.0, 1.0, 20.0])), (nrows, ncols))
    vals = np.clip(vals, -500, 9000)
    if draw(st.booleans()):
        vals[rng.random((nrows, ncols)) < 0.15] = -9999.0
    if not (vals != -9999.0).any():
        vals[0, 0] = 10.0
    k = draw(st.one_of(st.none(), st.integers(1, 4)))
    distinct = len(np.unique(vals[vals != -9999.0]))
    if k is not None:
        k = min(k, distinct)
    return _hae_raster(vals), ZoningConfig(k=k, k_max=4, n_init=2,
                                           interval=draw(st.sampled_from([50.0, 100.0])))


@given(hae_rasters())
def test_zone_partition_and_band_membership(case):
    r, cfg = case
    res = zone_raster(r, cfg)
    total = np.zeros(r.geometry.shape, int)
    for z in res.zones:
        total += z.mask
        assert z.classW_ceiling_hae_m - z.baseline_hae_m == 120
    assert np.array_equal(total, r.valid.astype(int))
    bands = [z for z in res.zones if z.category == "complex-band"]
    for i, z in enumerate(bands):
        v = r.values[z.mask]
        assert np.all(v >= z.hae_lower_m)
        if i == len(bands) - 1:
            assert np.all(v <= z.hae_upper_m)
        else:
            assert np.all(v < z.hae_upper_m)
        assert z.baseline_hae_m == z.hae_upper_m


@given(st.lists(st.floats(-500, 9000, allow_nan=False), min_size=1, max_size=60),
       st.sampled_from([10.0, 50.0, 100.0]))
def test_bands_cover_values(values, interval):
    bands = complex_bands(values, interval)
    v = np.asarray(values)
    assert bands == sorted(bands, key=lambda b: b.lower)
    for x in v:
        hits = [b for b in bands if b.lower <= x < b.upper or (b is bands[-1] and x == b.upper)]
        assert len(hits) == 1


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=40))
def test_symmetric_skew_zero(values):
    v = np.asarray(values)
    s = region_stats(np.concatenate([v, -v]))
    assert abs(s.skew) <= 1e-9 * max(1.0, np.abs(v).max())
