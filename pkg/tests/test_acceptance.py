"""Acceptance criteria, each checked at its stated tolerance and time limit.

Every test records one PASS/FAIL line, listed again in the terminal summary.
"""

from __future__ import annotations

import io
import json
import math
import re
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate

from haekit import synthetic
from haekit.capacity import erlang_b, max_offered_load, max_throughput
from haekit.cli import main
from haekit.geoid import GeoidGrid, load_geoid_grid, write_geoid_grid
from haekit.kmeans import elbow_k
from haekit.logstats import debias_segments, extract_error_models, parse_log_csv, write_log_csv
from haekit.references import MSL
from haekit.risk import (Gaussian, _overlap_quadrature, flight_levels, overlap_density,
                         required_vsm, safety_factor, tail_probability)
from haekit.terrain import TerrainRaster, load_esri_ascii, load_terrain_ugg, write_esri_ascii, write_terrain_ugg
from haekit.zonedoc import load_zone_document, publish_zones
from haekit.zoning import ZoningConfig, baseline_simple, classify_fractions, zone_raster

ROOT = Path(__file__).resolve().parents[1]


class Checks:
    """Collects named boolean checks so a criterion can report every failure at once."""

    def __init__(self):
        self.failed: list[str] = []

    def __call__(self, name: str, ok) -> None:
        if not bool(ok):
            self.failed.append(name)


def _finish(report, number, title, checks, elapsed, limit=None, extra=""):
    if limit is not None:
        checks(f"runtime {elapsed:.2f}s < {limit}s", elapsed < limit)
    detail = f"{elapsed:.2f}s" + (f"; {extra}" if extra else "")
    if checks.failed:
        detail += "; failed: " + ", ".join(checks.failed)
    report(number, title, not checks.failed, detail)
    assert not checks.failed, checks.failed


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_airport_conversion(report, tmp_path):
    sys.path.insert(0, str(ROOT / "scripts"))
    from make_fixtures import make_fixtures

    fx = make_fixtures(tmp_path, size=64)
    c = Checks()
    t0 = time.perf_counter()
    out = io.StringIO()
    code = main(["convert", "--from", "baro", "--pressure", "998",
                 "--calib", str(fx["airport_calib_partial"]), "--to", "hae",
                 "--geoid", str(fx["airport_geoid"]), "--dem", str(fx["airport_dem"]),
                 "--lat", "22.308", "--lon", "113.918"], out=out)
    elapsed = time.perf_counter() - t0
    c("exit 0", code == 0)
    hae = json.loads(out.getvalue())["value_m"] if code == 0 else math.nan
    c("HAE 65.74 +- 1.0", abs(hae - 65.74) <= 1.0)
    calib = synthetic.airport_calibration()
    c("h_b = 0.9 to 1e-9", abs(calib.hae_m - 0.9) <= 1e-9)
    _finish(report, 1, "airport worked example", c, elapsed, 1.0,
            f"HAE {hae:.4f} m, h_b {calib.hae_m:.12f} m")


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_zoning_pipeline(report):
    c = Checks()
    t0 = time.perf_counter()
    raster = synthetic.four_mode_raster(512, 512)
    k = elbow_k(raster.values.ravel(), k_max=8, seed=42)
    res = zone_raster(raster, ZoningConfig(k=k))
    elapsed = time.perf_counter() - t0

    c("elbow k = 4", k == 4)
    simple_ids, complex_ids = classify_fractions([0.6128, 0.272, 0.0857, 0.0295])
    c("2 simple + 1 complex region", simple_ids == [0, 1] and complex_ids == [2, 3])
    c("pipeline split matches", (res.simple_clusters, res.complex_clusters) == ([0, 1], [2, 3]))

    c("medians 25.79/87.85 publish as 25/90",
      [baseline_simple(v) for v in (np.array([25.79]), np.array([87.85]))] == [25.0, 90.0])
    simple = [z for z in res.zones if z.category == "simple"]
    c("simple medians", [round(z.stats.median_m, 2) for z in simple] == [25.79, 87.85])
    c("simple baselines 25/90", [z.baseline_hae_m for z in simple] == [25.0, 90.0])
    c("ceilings 145/210", [z.classW_ceiling_hae_m for z in simple] == [145.0, 210.0])
    band300 = [z for z in res.zones if z.category == "complex-band" and z.hae_upper_m == 300.0]
    c("band to 300 present", len(band300) == 1)
    c("band-300 ceiling 420", all(z.classW_ceiling_hae_m == 420.0 for z in band300))
    _finish(report, 2, "zoning pipeline", c, elapsed, 10.0,
            f"k={k}, thresholds {res.thresholds_m}, {len(res.zones)} zones")


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_reich_model(report):
    c = Checks()
    t0 = time.perf_counter()
    lam = safety_factor(1e-7)
    c("lambda in [5.25, 5.40]", 5.25 <= lam <= 5.40)
    c("unit overlap at 0", abs(overlap_density(Gaussian(), Gaussian(), 0.0) - 1 / (2 * math.sqrt(math.pi))) <= 1e-9)

    g1, g2 = Gaussian(0.0, 1.0), Gaussian(0.0, 1.0)
    sd = math.sqrt(2.0)
    worst = 0.0
    for S in np.linspace(0.0, 10 * sd, 101):
        exact = overlap_density(g1, g2, float(S))
        worst = max(worst, abs(_overlap_quadrature(g1, g2, float(S)) - exact) / exact)
    c("quadrature vs closed form 1e-3", worst <= 1e-3)

    tail_err = 0.0
    for s1, s2 in ((3.98, 3.98), (0.53, 0.53), (3.98, 0.53)):
        S = required_vsm(s1, s2, 1e-7)
        sdd = math.hypot(s1, s2)
        upper, _ = integrate.quad(lambda z: math.exp(-0.5 * (z / sdd) ** 2) / (sdd * math.sqrt(2 * math.pi)),
                                  S, np.inf, epsabs=0, epsrel=1e-12)
        tail_err = max(tail_err, abs(2 * upper - 1e-7) / 1e-7,
                       abs(tail_probability(Gaussian(0, s1), Gaussian(0, s2), S) - 1e-7) / 1e-7)
    c("tail probability = TLS to 1%", tail_err <= 0.01)
    c("flight_levels(1000, 32) = 31", flight_levels(1000, 32) == 31)
    c("flight_levels(1000, 6) = 166", flight_levels(1000, 6) == 166)
    elapsed = time.perf_counter() - t0
    vsm = required_vsm(3.98, 3.98, 1e-7)
    _finish(report, 3, "collision risk model", c, elapsed, 5.0,
            f"lambda {lam:.4f}, quad rel err {worst:.1e}, tail rel err {tail_err:.1e}, "
            f"formula VSM {vsm:.2f} m (published 32 m not reproduced)")


# -- 4 ------------------------------------------------------------------------

def _erlang_direct(A: Fraction, N: int) -> Fraction:
    terms = [A ** k / math.factorial(k) for k in range(N + 1)]
    return terms[-1] / sum(terms)


def test_criterion_4_erlang_b(report):
    c = Checks()
    t0 = time.perf_counter()
    worst = 0.0
    for N in range(0, 21):
        for A in np.linspace(0.0, 50.0, 101):
            want = float(_erlang_direct(Fraction(float(A)), N))
            got = erlang_b(float(A), N)
            if want:
                worst = max(worst, abs(got - want) / want)
            else:
                c(f"E_B({A},{N}) = 0", got == 0)
    c("recursion vs direct sum 1e-12", worst <= 1e-12)
    c("E_B(1,1) = 0.5", erlang_b(1, 1) == 0.5)
    c("E_B(1,2) = 0.2", erlang_b(1, 2) == 0.2)
    c("max_offered_load(1, 0.5) = 1", abs(max_offered_load(1, 0.5) - 1.0) <= 1e-5)
    ratio = max_throughput(166, 0.05) / max_throughput(31, 0.05)
    elapsed = time.perf_counter() - t0
    _finish(report, 4, "Erlang-B capacity", c, elapsed, 5.0,
            f"max rel err {worst:.1e}; 166 vs 31 level throughput ratio {ratio:.3f} "
            "(published 8-fold recorded, not asserted)")


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_error_extraction(report):
    c = Checks()
    t0 = time.perf_counter()
    records = synthetic.synthetic_logs(10_000, sigma_baro=4.0)
    once = debias_segments(records)
    ext = extract_error_models(once)
    elapsed = time.perf_counter() - t0
    c("sigma_baro within 5% of 4.0", abs(ext.sigma_baro_m - 4.0) <= 0.2)
    c("debias idempotent", debias_segments(once) == once)
    mass = ext.residual_histogram.mass()
    c("histogram integrates to 1", abs(mass - 1.0) <= 1e-6)
    _finish(report, 5, "flight-log error extraction", c, elapsed, 5.0,
            f"sigma_baro {ext.sigma_baro_m:.4f} m, mass {mass:.12f}")


# -- 6 ------------------------------------------------------------------------

def _geoid():
    rng = np.random.default_rng(6)
    return GeoidGrid.from_arrays("rt", -10.0, 100.0, 0.25, 0.5, rng.normal(0, 30, (9, 11)))


def test_criterion_6_round_trips(report):
    c = Checks()
    t0 = time.perf_counter()
    g = _geoid()

    text = write_geoid_grid(g, format="ugg-text")
    gt = load_geoid_grid(text)
    c("UGG text geometry", gt.geometry.same_as(g.geometry) and gt.name == g.name)
    c("UGG text values 1e-9", np.max(np.abs(gt.values - g.values)) <= 1e-9)

    blob = write_geoid_grid(g, format="ugg-binary")
    gb = load_geoid_grid(blob, name="rt")
    c("UGG binary geometry", gb.geometry.same_as(g.geometry))
    c("UGG binary bit-exact", np.array_equal(gb.values, g.values.astype(np.float32).astype(np.float64))
      and write_geoid_grid(gb, format="ugg-binary") == blob)

    dem = synthetic.four_mode_raster(40, 30, reference=MSL("EGM2008"))
    dem = TerrainRaster("DTM", dem.vertical_ref, dem.geometry, dem.values, -9999.0)
    ext = write_terrain_ugg(dem)
    de = load_terrain_ugg(ext)
    c("extended UGG fields", (de.surface_kind, de.vertical_ref, de.nodata) == ("DTM", MSL("EGM2008"), -9999.0)
      and de.geometry.same_as(dem.geometry))
    c("extended UGG bit-exact", write_terrain_ugg(de) == ext
      and np.array_equal(de.values, dem.values.astype(np.float32).astype(np.float64)))

    asc = load_esri_ascii(write_esri_ascii(dem), MSL("EGM2008"), "DTM")
    c("ESRI ASCII geometry", all(math.isclose(a, b, abs_tol=1e-9) for a, b in zip(
        (asc.geometry.lat0, asc.geometry.lon0, asc.geometry.dlat, asc.geometry.dlon),
        (dem.geometry.lat0, dem.geometry.lon0, dem.geometry.dlat, dem.geometry.dlon)))
      and asc.geometry.shape == dem.geometry.shape)
    c("ESRI ASCII values 1e-9", np.max(np.abs(asc.values - dem.values)) <= 1e-9)

    hae = synthetic.four_mode_raster(48, 48)
    zones = zone_raster(hae, ZoningConfig(k=4)).zones
    doc_text = publish_zones(zones, hae.geometry, {"seed": 42})
    doc = load_zone_document(doc_text)
    c("zone JSON masks", all(np.array_equal(a.mask, b.mask) for a, b in zip(doc.zones, zones)))
    c("zone JSON fields", all(
        (a.id, a.category, a.baseline_hae_m, a.classW_ceiling_hae_m, a.hae_lower_m, a.hae_upper_m)
        == (b.id, b.category, b.baseline_hae_m, b.classW_ceiling_hae_m, b.hae_lower_m, b.hae_upper_m)
        for a, b in zip(doc.zones, zones)) and len(doc.zones) == len(zones))
    c("zone JSON re-publish identical", publish_zones(doc.zones, doc.geometry, doc.meta) == doc_text)

    logs = synthetic.synthetic_logs(500, n_segments=5)
    c("log CSV field equality", parse_log_csv(write_log_csv(logs).encode()) == logs)
    elapsed = time.perf_counter() - t0
    _finish(report, 6, "format round trips", c, elapsed)


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_property_suites(report):
    c = Checks()
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", str(ROOT / "tests"), "-q", "-p", "no:cacheprovider",
         "--properties-only", "--hypothesis-show-statistics"],
        capture_output=True, text=True, cwd=ROOT)
    elapsed = time.perf_counter() - t0
    c("property suites pass", proc.returncode == 0)
    counts = [int(n) for n in re.findall(r"- (\d+) passing examples", proc.stdout)]
    n_suites = len(re.findall(r"^tests/\S+::\S+:$", proc.stdout, flags=re.M))
    c("statistics found for every suite", counts and len(counts) == n_suites)
    c(">= 1000 cases each", counts and min(counts) >= 1000)
    _finish(report, 7, "property suites", c, elapsed, 120.0,
            f"{n_suites} suites, min cases {min(counts) if counts else 0}")
