"""Barometric reading to HAE at the synthetic airport scene.

    python3 scripts/airport_example.py [--pressure 998]
"""

from __future__ import annotations

import argparse

from haekit import synthetic
from haekit.heights import ConversionContext, baro_to_hae_calibrated, convert, hypsometric_thickness
from haekit.references import AGL, HAE, MSL, Height


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pressure", type=float, default=synthetic.AIRCRAFT_PRESSURE_HPA)
    args = ap.parse_args()

    geoid, dem = synthetic.airport_geoid(), synthetic.airport_dem()
    calib = synthetic.airport_calibration(geoid, dem)
    ctx = ConversionContext(geoid, dem, calib)
    lat, lon = synthetic.AIRPORT_LAT, synthetic.AIRPORT_LON

    dz = hypsometric_thickness(calib.pressure_hPa, args.pressure, calib.mean_temp_C)
    h = baro_to_hae_calibrated(args.pressure, calib)
    print(f"airport elevation (MSL)   {synthetic.AIRPORT_ELEV_MSL_M:9.3f} m")
    print(f"geoid undulation N        {synthetic.AIRPORT_N_M:9.3f} m")
    print(f"airport HAE h_b           {calib.hae_m:9.3f} m")
    print(f"layer thickness           {dz:9.3f} m  ({calib.pressure_hPa} -> {args.pressure} hPa)")
    print(f"aircraft HAE              {h:9.3f} m")
    for target in (MSL("EGM96"), AGL("DTM")):
        out = convert(Height(h, HAE()), target, ctx, lat, lon)
        print(f"aircraft {type(target).__name__:<17s}{out.value_m:9.3f} m")


if __name__ == "__main__":
    main()
