"""Vertical collision risk (Reich model, vertical dimension only).

For two aircraft with independent vertical errors ``z1 ~ f1`` and
``z2 ~ f2`` at levels ``S`` apart, the overlap integral

    P_z(S) = integral f1(z) f2(z - S) dz

is the density of ``dz = z1 - z2`` at ``S`` (units 1/m).  Separation minima
are sized on the tail probability ``P(|dz| >= S)``, which for Gaussian
errors gives ``S = lambda * sqrt(s1^2 + s2^2)`` with lambda the two-sided
normal quantile of the target level of safety.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateModel, NonPositiveInput, OutOfDomain

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
# wide enough that the overlap integrand is untruncated out to S = 10 combined sigma
SUPPORT_SIGMAS = 16.0
STEPS_PER_SIGMA = 100


@dataclass(frozen=True)
class Gaussian:
    mu_m: float = 0.0
    sigma_m: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mu_m) and math.isfinite(self.sigma_m) and self.sigma_m > 0):
            raise DegenerateModel(f"Gaussian needs finite mu and sigma > 0, got {self}")

    @property
    def mean(self) -> float:
        return self.mu_m

    @property
    def std(self) -> float:
        return self.sigma_m

    def support(self) -> tuple[float, float]:
        half = SUPPORT_SIGMAS * self.sigma_m
        return self.mu_m - half, self.mu_m + half

    def pdf(self, z):
        u = (np.asarray(z, dtype=np.float64) - self.mu_m) / self.sigma_m
        return np.exp(-0.5 * u * u) / (SQRT2PI * self.sigma_m)


@dataclass(frozen=True, eq=False)
class Empirical:
    """Histogram density: ``densities[i]`` (1/m) on ``[bin_edges[i], bin_edges[i+1])``."""
    bin_edges_m: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges_m, dtype=np.float64)
        dens = np.asarray(self.densities, dtype=np.float64)
        if edges.ndim != 1 or dens.shape != (edges.size - 1,) or dens.size == 0:
            raise DegenerateModel("need n+1 ascending edges for n densities")
        if not np.all(np.diff(edges) > 0):
            raise DegenerateModel("bin edges must be strictly ascending")
        if not (np.all(np.isfinite(dens)) and np.all(dens >= 0)):
            raise DegenerateModel("densities must be finite and non-negative")
        mass = float(np.sum(dens * np.diff(edges)))
        if abs(mass - 1.0) > 1e-6:
            raise DegenerateModel(f"histogram integrates to {mass}, not 1")
        object.__setattr__(self, "bin_edges_m", edges)
        object.__setattr__(self, "densities", dens)

    @classmethod
    def from_samples(cls, samples, bin_width: float, lo: float, hi: float) -> "Empirical":
        """Normalized histogram of the samples falling in ``[lo, hi]``."""
        x = np.asarray(samples, dtype=np.float64)
        nbins = max(1, int(round((hi - lo) / bin_width)))
        edges = np.linspace(lo, hi, nbins + 1)
        counts, _ = np.histogram(x, bins=edges)
        total = counts.sum()
        if total == 0:
            raise DegenerateModel("no samples inside the histogram range")
        return cls(edges, counts / (total * np.diff(edges)))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges_m)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges_m[:-1] + self.bin_edges_m[1:])

    def mass(self) -> float:
        return float(np.sum(self.densities * self.widths))

    @property
    def mean(self) -> float:
        e = self.bin_edges_m
        return float(np.sum(self.densities * (e[1:] ** 2 - e[:-1] ** 2) / 2))

    @property
    def std(self) -> float:
        """Standard deviation of the piecewise-uniform density."""
        e = self.bin_edges_m
        m2 = float(np.sum(self.densities * (e[1:] ** 3 - e[:-1] ** 3) / 3))
        return math.sqrt(max(m2 - self.mean ** 2, 0.0))

    def support(self) -> tuple[float, float]:
        return float(self.bin_edges_m[0]), float(self.bin_edges_m[-1])

    def pdf(self, z):
        z = np.asarray(z, dtype=np.float64)
        idx = np.searchsorted(self.bin_edges_m, z, side="right") - 1
        inside = (idx >= 0) & (idx < self.densities.size)
        return np.where(inside, self.densities[np.clip(idx, 0, self.densities.size - 1)], 0.0)


ErrorModel = Union[Gaussian, Empirical]


# -- overlap ------------------------------------------------------------------

def overlap_density(e1: ErrorModel, e2: ErrorModel, S: float) -> float:
    """Density of ``z1 - z2`` at ``S`` (per meter)."""
    if isinstance(e1, Gaussian) and isinstance(e2, Gaussian):
        sd = math.hypot(e1.sigma_m, e2.sigma_m)
        u = (S - (e1.mu_m - e2.mu_m)) / sd
        return math.exp(-0.5 * u * u) / (SQRT2PI * sd)
    return _overlap_quadrature(e1, e2, S)


def _overlap_quadrature(e1: ErrorModel, e2: ErrorModel, S: float) -> float:
    """Trapezoid rule over the common support, step min(sigma)/100.

    Histogram breakpoints join the grid; on each sub-interval a histogram
    factor is constant, so it enters both trapezoid ends with its interior
    value.
    """
    s1, s2 = e1.std, e2.std
    if not (s1 > 0 and s2 > 0):
        raise DegenerateModel("error model with zero spread")
    a1, b1 = e1.support()
    a2, b2 = e2.support()
    lo, hi = max(a1, a2 + S), min(b1, b2 + S)
    if hi <= lo:
        return 0.0
    h = min(s1, s2) / STEPS_PER_SIGMA
    n = max(1, math.ceil((hi - lo) / h))
    pts = [np.linspace(lo, hi, n + 1)]
    if isinstance(e1, Empirical):
        pts.append(e1.bin_edges_m)
    if isinstance(e2, Empirical):
        pts.append(e2.bin_edges_m + S)
    t = np.unique(np.concatenate(pts))
    t = t[(t >= lo) & (t <= hi)]
    mid = 0.5 * (t[:-1] + t[1:])

    def ends(model, shift):
        if isinstance(model, Empirical):
            v = model.pdf(mid - shift)
            return v, v
        v = model.pdf(t - shift)
        return v[:-1], v[1:]

    l1, r1 = ends(e1, 0.0)
    l2, r2 = ends(e2, S)
    return float(np.sum(np.diff(t) * (l1 * l2 + r1 * r2)) / 2)


def tail_probability(e1: ErrorModel, e2: ErrorModel, S: float) -> float:
    """``P(|z1 - z2| >= S)`` for ``S >= 0``."""
    if S < 0:
        raise OutOfDomain("separation must be non-negative")
    if isinstance(e1, Gaussian) and isinstance(e2, Gaussian):
        sd = math.hypot(e1.sigma_m, e2.sigma_m)
        mu = e1.mu_m - e2.mu_m
        return 0.5 * (math.erfc((S - mu) / (sd * SQRT2)) + math.erfc((S + mu) / (sd * SQRT2)))
    step = min(e1.std, e2.std) / 10
    n = max(2, math.ceil(2 * S / step))
    s = np.linspace(-S, S, n + 1)
    g = np.array([overlap_density(e1, e2, x) for x in s])
    inner = float(np.sum(np.diff(s) * (g[:-1] + g[1:])) / 2)
    return max(0.0, 1.0 - inner)


# -- quantiles and separation -------------------------------------------------

# rational approximation of the inverse normal CDF (P. J. Acklam)
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / SQRT2)


def _lower_quantile(p: float) -> float:
    # p <= 0.5, so the answer is <= 0 and the CDF residual is computed without cancellation
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    else:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    # one Newton step against the erfc-based CDF
    e = normal_cdf(x) - p
    return x - e * SQRT2PI * math.exp(0.5 * x * x)


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF."""
    if not 0.0 < p < 1.0:
        raise OutOfDomain(f"probability {p} outside (0, 1)")
    if p > 0.5:
        return -_lower_quantile(1.0 - p)
    return _lower_quantile(p)


def safety_factor(tls: float) -> float:
    """lambda with ``P(|Z| >= lambda) = tls`` for standard normal Z."""
    if not 0.0 < tls < 0.5:
        raise OutOfDomain(f"target level of safety {tls} outside (0, 0.5)")
    return -normal_quantile(tls / 2.0)


def required_vsm(sigma1: float, sigma2: float, tls: float) -> float:
    if not (sigma1 > 0 and sigma2 > 0):
        raise OutOfDomain("sigmas must be positive")
    return safety_factor(tls) * math.sqrt(sigma1 * sigma1 + sigma2 * sigma2)


def flight_levels(ceiling: float, vsm: float) -> int:
    if not (ceiling > 0 and vsm > 0):
        raise NonPositiveInput("ceiling and VSM must be positive")
    return math.floor(ceiling / vsm)


@dataclass(frozen=True)
class SeparationAnalysis:
    sigma1_m: float
    sigma2_m: float
    tls: float
    lambda_: float
    vsm_m: float
    ceiling_m: float
    flight_levels: int
    vsm_formula_m: float
    vsm_overridden: bool = False

    def to_json(self) -> dict:
        return {
            "sigma1_m": self.sigma1_m, "sigma2_m": self.sigma2_m, "tls": self.tls,
            "lambda": self.lambda_, "vsm_m": self.vsm_m, "vsm_formula_m": self.vsm_formula_m,
            "vsm_overridden": self.vsm_overridden, "ceiling_m": self.ceiling_m,
            "flight_levels": self.flight_levels,
        }


def analyze_separation(sigma1: float, sigma2: float, tls: float, ceiling: float,
                       vsm_override: float | None = None) -> SeparationAnalysis:
    """VSM from the error sigmas (or an imposed value) and the resulting level count."""
    lam = safety_factor(tls)
    formula = required_vsm(sigma1, sigma2, tls)
    vsm = formula if vsm_override is None else float(vsm_override)
    return SeparationAnalysis(sigma1, sigma2, tls, lam, vsm, ceiling,
                              flight_levels(ceiling, vsm), formula, vsm_override is not None)


def separation_sweep(e1: ErrorModel, e2: ErrorModel, s_max: float, n: int = 200):
    """Rows of (S, overlap density, tail probability) for S in [0, s_max]."""
    return [(float(s), overlap_density(e1, e2, float(s)), tail_probability(e1, e2, float(s)))
            for s in np.linspace(0.0, s_max, n + 1)]
