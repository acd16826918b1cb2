"""Write the synthetic fixture files used by the examples and CLI tests.

    python3 scripts/make_fixtures.py [outdir]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from haekit import synthetic
from haekit.geoid import write_geoid_grid
from haekit.logstats import write_log_csv
from haekit.references import MSL
from haekit.terrain import TerrainRaster, write_esri_ascii, write_terrain_ugg


def make_fixtures(outdir, size: int = 512) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "airport_geoid": outdir / "airport_geoid.ugg",
        "airport_dem": outdir / "airport_dem.asc",
        "airport_calib": outdir / "airport_calib.json",
        "airport_calib_partial": outdir / "airport_calib_partial.json",
        "zoning_dem": outdir / "zoning_dem.uggx",
        "zoning_geoid": outdir / "zoning_geoid.ugg",
        "logs": outdir / "flight_logs.csv",
    }
    geoid = synthetic.airport_geoid()
    dem = synthetic.airport_dem()
    write_geoid_grid(geoid, paths["airport_geoid"], format="ugg-text")
    write_esri_ascii(dem, paths["airport_dem"])
    calib = synthetic.airport_calibration(geoid, dem)
    paths["airport_calib"].write_text(json.dumps(calib.to_json(), indent=2) + "\n")
    partial = {k: v for k, v in calib.to_json().items() if k != "hae_m"}
    paths["airport_calib_partial"].write_text(json.dumps(partial, indent=2) + "\n")

    # zoning scene stored as MSL; a constant geoid lifts it back to the four-mode HAE field
    hae = synthetic.four_mode_raster(size, size)
    n = -3.0
    msl = TerrainRaster(hae.surface_kind, MSL("EGM96"), hae.geometry, hae.values - n)
    write_terrain_ugg(msl, paths["zoning_dem"])
    write_geoid_grid(synthetic.constant_geoid_over(hae.geometry, n, "zoning"), paths["zoning_geoid"])

    write_log_csv(synthetic.synthetic_logs(), paths["logs"])
    return paths


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="fixtures")
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()
    for name, path in make_fixtures(Path(args.outdir), args.size).items():
        print(f"{name:22s} {path}")


if __name__ == "__main__":
    main()
