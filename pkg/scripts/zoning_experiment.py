"""Zone a synthetic four-mode terrain raster and print the elbow curve,
cluster split and published heights.

    python3 scripts/zoning_experiment.py [--size 512] [--out zones.json]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

import numpy as np

from haekit import synthetic
from haekit.kmeans import elbow_k, wcss_curve
from haekit.zonedoc import publish_zones
from haekit.zoning import ZoningConfig, zone_raster


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--k-max", type=int, default=8)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    t0 = time.perf_counter()
    raster = synthetic.four_mode_raster(args.size, args.size)
    values = raster.values.ravel()
    curve = wcss_curve(values, args.k_max, args.seed)
    k = elbow_k(values, args.k_max, args.seed)
    print("k   wcss")
    for i, w in enumerate(curve, start=1):
        print(f"{i:<3d} {w:.4g}")
    print(f"elbow k = {k}")

    res = zone_raster(raster, ZoningConfig(k=k, seed=args.seed))
    m = res.model
    print("cluster  centroid   fraction")
    for c, f in zip(m.centroids, m.fractions):
        print(f"         {c:8.2f}   {f:.4f}")
    print(f"thresholds {res.thresholds_m}; simple {res.simple_clusters}, complex {res.complex_clusters}")
    print(f"{'zone':<22s}{'pixels':>8s}{'median':>9s}{'baseline':>10s}{'class W':>9s}{'class G':>9s}")
    for z in res.zones:
        print(f"{z.id:<22s}{z.stats.pixel_count:>8d}{z.stats.median_m:>9.2f}"
              f"{z.baseline_hae_m:>10.0f}{z.classW_ceiling_hae_m:>9.0f}{z.classG_ceiling_hae_m:>9.0f}")
    print(f"elapsed {time.perf_counter() - t0:.2f} s over {np.count_nonzero(raster.valid)} pixels")
    if args.out:
        args.out.write_text(publish_zones(res.zones, raster.geometry, {"seed": args.seed}))
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
