from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats as sps

from haekit.errors import DegenerateModel, NonPositiveInput, OutOfDomain
from haekit.risk import (Empirical, Gaussian, analyze_separation, flight_levels, normal_cdf,
                         normal_quantile, overlap_density, required_vsm, safety_factor,
                         tail_probability)


def _binned(g: Gaussian, width_sigmas=0.01, span=8.0):
    # histogram from exact bin probabilities of the Gaussian
    edges = g.mu_m + g.sigma_m * np.arange(-span, span + width_sigmas / 2, width_sigmas)
    cdf = sps.norm.cdf(edges, g.mu_m, g.sigma_m)
    mass = np.diff(cdf)
    return Empirical(edges, mass / mass.sum() / np.diff(edges))


def test_unit_gaussians_at_zero():
    assert overlap_density(Gaussian(), Gaussian(), 0.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), abs=1e-9)


def test_far_tail_vanishes():
    assert overlap_density(Gaussian(), Gaussian(), 20 * math.sqrt(2)) < 1e-60


@pytest.mark.parametrize("pair", ["EE", "EG", "GE"])
def test_quadrature_vs_closed_form(pair):
    g1, g2 = Gaussian(0.0, 1.0), Gaussian(0.3, 1.5)
    e1 = _binned(g1) if pair[0] == "E" else g1
    e2 = _binned(g2) if pair[1] == "E" else g2
    sd = math.hypot(1.0, 1.5)
    for S in np.linspace(0, 10 * sd, 41):
        exact = overlap_density(g1, g2, S)
        got = overlap_density(e1, e2, S)
        if exact > 1e-12:
            assert got == pytest.approx(exact, rel=1e-3)


def test_empirical_validation():
    with pytest.raises(DegenerateModel):
        Empirical([0.0, 1.0], [0.5])
    with pytest.raises(DegenerateModel):
        Empirical([0.0, 1.0, 0.5], [1.0, 1.0])
    with pytest.raises(DegenerateModel):
        Gaussian(0.0, 0.0)
    e = Empirical.from_samples(np.random.default_rng(1).normal(0, 2, 20000), 0.2, -12, 12)
    assert e.mass() == pytest.approx(1.0, abs=1e-12)
    assert e.std == pytest.approx(2.0, rel=0.03)


def test_quantile_examples():
    assert normal_quantile(0.5) == 0.0
    assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)
    for p in (0.0, 1.0, -0.1, float("nan")):
        with pytest.raises(OutOfDomain):
            normal_quantile(p)


def test_quantile_vs_mpmath():
    mpmath.mp.dps = 40
    ps = np.concatenate([np.logspace(-12, -1, 60), np.linspace(0.05, 0.95, 40), 1 - np.logspace(-12, -1, 60)])
    for p in ps:
        exact = float(mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(p) - 1))
        assert abs(normal_quantile(float(p)) - exact) < 1e-9


def test_safety_factor():
    lam = safety_factor(1e-7)
    assert 5.25 <= lam <= 5.40
    assert abs(lam - 5.33) <= 0.05
    assert safety_factor(0.3173) == pytest.approx(1.0, abs=1e-3)
    vals = [safety_factor(t) for t in np.logspace(-12, math.log10(0.49), 100)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(OutOfDomain):
        safety_factor(0.5)


def test_required_vsm():
    lam = safety_factor(1e-7)
    assert required_vsm(2.0, 2.0, 1e-7) == pytest.approx(lam * math.sqrt(2) * 2.0, rel=1e-12)
    assert required_vsm(0.53, 0.53, 1e-7) == pytest.approx(4.0, abs=0.05)
    with pytest.raises(OutOfDomain):
        required_vsm(0.0, 1.0, 1e-7)


@pytest.mark.parametrize("s1,s2,tls", [(3.98, 3.98, 1e-7), (0.53, 0.53, 1e-7), (1.0, 2.5, 1e-4)])
def test_tail_oracle(s1, s2, tls):
    S = required_vsm(s1, s2, tls)
    sd = math.hypot(s1, s2)
    # integrate the difference density directly, independent of the closed form
    upper, _ = integrate.quad(lambda z: math.exp(-0.5 * (z / sd) ** 2) / (sd * math.sqrt(2 * math.pi)),
                              S, np.inf, epsabs=0, epsrel=1e-12)
    assert 2 * upper == pytest.approx(tls, rel=0.01)
    assert tail_probability(Gaussian(0, s1), Gaussian(0, s2), S) == pytest.approx(tls, rel=0.01)


def test_flight_levels():
    assert flight_levels(1000, 32) == 31
    assert flight_levels(1000, 6) == 166
    assert flight_levels(1000, 1000) == 1
    with pytest.raises(NonPositiveInput):
        flight_levels(1000, 0)


def test_analysis_invariants():
    a = analyze_separation(3.98, 0.53, 1e-7, 1000.0)
    assert a.vsm_m == pytest.approx(a.lambda_ * math.hypot(3.98, 0.53), abs=1e-9)
    assert a.flight_levels == math.floor(a.ceiling_m / a.vsm_m)
    o = analyze_separation(3.98, 3.98, 1e-7, 1000.0, vsm_override=32)
    assert o.flight_levels == 31 and o.vsm_overridden
    assert o.to_json()["lambda"] == o.lambda_


# -- properties ---------------------------------------------------------------

sigmas = st.floats(0.05, 50.0)
means = st.floats(-20.0, 20.0)


@given(means, sigmas, means, sigmas, st.floats(-100, 100))
def test_swap_symmetry_gaussian(m1, s1, m2, s2, S):
    a, b = Gaussian(m1, s1), Gaussian(m2, s2)
    assert overlap_density(a, b, S) == overlap_density(b, a, -S)


@given(st.integers(0, 2**32 - 1), st.floats(-5, 5))
def test_swap_symmetry_empirical(seed, S):
    rng = np.random.default_rng(seed)
    edges = np.cumsum(np.r_[-3.0, rng.uniform(0.5, 1.5, 6)])
    d1 = rng.uniform(0.1, 1.0, 6)
    e1 = Empirical(edges, d1 / np.sum(d1 * np.diff(edges)))
    e2 = Gaussian(rng.uniform(-1, 1), rng.uniform(0.5, 2))
    assert abs(overlap_density(e1, e2, S) - overlap_density(e2, e1, -S)) <= 1e-6


@given(sigmas, st.floats(0.0, 40.0), st.floats(0.0, 40.0))
def test_peak_at_zero_and_decreasing(s, a, b):
    g = Gaussian(0.0, s)
    lo, hi = sorted((a, b))
    assert overlap_density(g, g, 0.0) >= overlap_density(g, g, lo) >= overlap_density(g, g, hi)
    assert overlap_density(g, g, -lo) == overlap_density(g, g, lo)
    if hi - lo > 1e-6 * s and overlap_density(g, g, hi) > 0:
        assert overlap_density(g, g, lo) > overlap_density(g, g, hi)


@given(sigmas, sigmas, st.floats(1e-12, 0.49), st.floats(0.01, 100.0))
def test_vsm_linear_scaling(s1, s2, tls, c):
    assert required_vsm(c * s1, c * s2, tls) == pytest.approx(c * required_vsm(s1, s2, tls), rel=1e-12)


@given(st.floats(-6.0, 6.0))
def test_quantile_round_trip(z):
    assert normal_quantile(normal_cdf(z)) == pytest.approx(z, abs=1e-8)
