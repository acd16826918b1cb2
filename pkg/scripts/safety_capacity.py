"""Separation minima and flight-level capacity from extracted error sigmas.

Extracts sigmas from synthetic flight logs, sizes the separation for a
target level of safety and compares Erlang-B throughput across level counts.

    python3 scripts/safety_capacity.py [--tls 1e-7] [--ceiling 1000] [--qos 0.05]
"""

from __future__ import annotations

import argparse
import math

from haekit import synthetic
from haekit.capacity import analyze_capacity
from haekit.logstats import debias_segments, extract_error_models
from haekit.risk import analyze_separation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tls", type=float, default=1e-7)
    ap.add_argument("--ceiling", type=float, default=1000.0)
    ap.add_argument("--qos", type=float, default=0.05)
    ap.add_argument("--holding-hr", type=float, default=0.1)
    ap.add_argument("--records", type=int, default=10_000)
    args = ap.parse_args()

    logs = synthetic.synthetic_logs(args.records)
    ext = extract_error_models(debias_segments(logs))
    epv_rms = math.sqrt(math.fsum(r.epv_m ** 2 for r in logs) / len(logs))
    print(f"sigma_baro {ext.sigma_baro_m:.3f} m   sigma_hae (EPV series std) {ext.sigma_hae_m:.3f} m")
    print(f"EPV RMS, the per-sample 1-sigma reading, would be {epv_rms:.3f} m")

    rows = []
    for label, s, override in (("baro, formula", ext.sigma_baro_m, None),
                               ("baro, 32 m imposed", ext.sigma_baro_m, 32.0),
                               ("hae, formula", ext.sigma_hae_m, None),
                               ("hae, 6 m imposed", ext.sigma_hae_m, 6.0)):
        a = analyze_separation(s, s, args.tls, args.ceiling, override)
        cap = analyze_capacity(a.flight_levels, args.qos, args.holding_hr)
        rows.append((label, a, cap))
    print(f"lambda = {rows[0][1].lambda_:.4f}")
    print(f"{'case':<20s}{'VSM m':>8s}{'levels':>8s}{'Erlangs':>10s}{'flights/h':>11s}")
    for label, a, cap in rows:
        print(f"{label:<20s}{a.vsm_m:>8.2f}{a.flight_levels:>8d}"
              f"{cap.max_offered_erlangs:>10.2f}{cap.max_throughput_per_hr:>11.1f}")
    base, best = rows[1][2], rows[3][2]
    print(f"throughput ratio {best.levels} vs {base.levels} levels: "
          f"{best.max_throughput_per_hr / base.max_throughput_per_hr:.3f}")


if __name__ == "__main__":
    main()
