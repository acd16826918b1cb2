"""Erlang-B loss model for flight-level capacity.

Each usable flight level is a server; a mission holding a level for
``holding_time_hr`` hours is one call.  Offered load is in Erlangs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NegativeLoad, NonPositiveHoldingTime, OutOfDomain

BISECT_ABS_TOL = 1e-6
DEFAULT_HOLDING_HR = 0.1


def erlang_b(A: float, N: int) -> float:
    """Blocking probability via E_n = A E_{n-1} / (n + A E_{n-1})."""
    A = float(A)
    if not math.isfinite(A):
        raise NegativeLoad("offered load must be finite")
    if A < 0:
        raise NegativeLoad(f"offered load must be >= 0, got {A}")
    if N < 0 or int(N) != N:
        raise OutOfDomain(f"server count must be a non-negative integer, got {N}")
    e = 1.0
    for n in range(1, int(N) + 1):
        e = A * e / (n + A * e)
    return e


def max_offered_load(N: int, qos: float) -> float:
    """Largest load ``A`` with ``erlang_b(A, N) <= qos``, to 1e-6 Erlangs."""
    if N < 1 or int(N) != N:
        raise OutOfDomain("need at least one server")
    if not 0 < qos < 1:
        raise OutOfDomain("qos must lie in (0, 1)")
    lo, hi = 0.0, N / 2.0
    while erlang_b(hi, N) <= qos:
        lo, hi = hi, hi * 2.0
    # also tight relative to the load, so tiny and huge roots are both pinned
    while hi - lo > min(BISECT_ABS_TOL, 1e-7 * hi):
        mid = 0.5 * (lo + hi)
        if erlang_b(mid, N) <= qos:
            lo = mid
        else:
            hi = mid
    return lo


def max_throughput(N: int, qos: float, holding_time_hr: float = DEFAULT_HOLDING_HR) -> float:
    """Flights per hour sustainable at the QoS bound."""
    if not holding_time_hr > 0:
        raise NonPositiveHoldingTime(f"holding time must be > 0 h, got {holding_time_hr}")
    return max_offered_load(N, qos) / holding_time_hr


@dataclass(frozen=True)
class CapacityAnalysis:
    levels: int
    qos: float
    max_offered_erlangs: float
    holding_time_hr: float
    max_throughput_per_hr: float

    def to_json(self) -> dict:
        return asdict(self)


def analyze_capacity(levels: int, qos: float = 0.05,
                     holding_time_hr: float = DEFAULT_HOLDING_HR) -> CapacityAnalysis:
    if not holding_time_hr > 0:
        raise NonPositiveHoldingTime(f"holding time must be > 0 h, got {holding_time_hr}")
    a = max_offered_load(levels, qos)
    return CapacityAnalysis(int(levels), float(qos), a, float(holding_time_hr), a / holding_time_hr)


def demand_sweep(levels: int, holding_time_hr: float = DEFAULT_HOLDING_HR,
                 max_demand_per_hr: float | None = None, n: int = 200):
    """Rows of (demand flights/h, blocking probability)."""
    if not holding_time_hr > 0:
        raise NonPositiveHoldingTime(f"holding time must be > 0 h, got {holding_time_hr}")
    if max_demand_per_hr is None:
        max_demand_per_hr = 2.0 * max(levels, 1) / holding_time_hr
    return [(float(d), erlang_b(d * holding_time_hr, levels))
            for d in np.linspace(0.0, max_demand_per_hr, n + 1)]
