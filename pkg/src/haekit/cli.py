"""``haekit`` command line.

stdout carries only the requested document; diagnostics go to stderr.
Exit codes: 0 ok, 2 usage or domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .capacity import analyze_capacity, demand_sweep
from .errors import HaeKitError, MissingContext
from .geoid import describe as describe_geoid
from .geoid import load_geoid_grid
from .heights import (CalibrationPoint, ConversionContext, baro_reading, calibration_from_terrain,
                      convert)
from .logstats import debias_segments, extract_error_models, parse_log_csv
from .references import AGL, HAE, MSL, STANDARD_PRESSURE_HPA, Baro, Height
from .risk import Gaussian, analyze_separation, separation_sweep
from .terrain import describe as describe_terrain
from .terrain import load_terrain, raster_to_hae
from .zonedoc import publish_zones
from .zoning import ZoningConfig, zone_raster

log = logging.getLogger("haekit")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# -- output helpers -----------------------------------------------------------

def _emit(doc: dict, fmt: str, out) -> None:
    if fmt == "csv":
        flat = _flatten(doc)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow(flat.values())
    else:
        out.write(json.dumps(doc, indent=2) + "\n")


def _flatten(d: dict, prefix: str = "") -> dict:
    flat = {}
    for k, v in d.items():
        if isinstance(v, dict):
            flat.update(_flatten(v, f"{prefix}{k}."))
        else:
            flat[f"{prefix}{k}"] = v
    return flat


def _write_rows(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows((repr(a) if isinstance(a, float) else a for a in row) for row in rows)


# -- context loading ----------------------------------------------------------

def _load_geoid(path):
    return load_geoid_grid(path, name=Path(path).stem) if path else None


def _load_dem(path, datum, surface):
    return load_terrain(path, MSL(datum), surface) if path else None


def _calibration(path, geoid, dem) -> CalibrationPoint | None:
    if not path:
        return None
    with open(path, encoding="utf-8") as f:
        d = json.load(f)
    if "hae_m" in d:
        return CalibrationPoint.from_json(d)
    if dem is None:
        raise MissingContext("terrain", "calibration file has no hae_m; pass --dem to derive it")
    return calibration_from_terrain(float(d["lat"]), float(d["lon"]), float(d["pressure_hPa"]),
                                    float(d["mean_temp_C"]), dem, geoid)


def _reference(kind: str, args):
    if kind == "hae":
        return HAE()
    if kind == "msl":
        return MSL(args.datum)
    if kind == "agl":
        return AGL(args.surface)
    ref_p = args.qnh if args.qnh is not None else args.ref_pressure
    if args.code == "QNE":
        ref_p = STANDARD_PRESSURE_HPA
    return Baro(args.code, ref_p)


# -- subcommands --------------------------------------------------------------

def cmd_convert(args, out) -> int:
    geoid = _load_geoid(args.geoid)
    dem = _load_dem(args.dem, args.datum, args.surface)
    calib = _calibration(args.calib, geoid, dem)
    ctx = ConversionContext(geoid, dem, calib)
    source = _reference(args.src, args)
    target = _reference(args.dst, args)

    if args.value is not None:
        value = args.value
    elif args.pressure is not None and isinstance(source, Baro):
        if calib is None:
            raise MissingContext("calibration", "a pressure reading needs --calib for the mean temperature")
        value = baro_reading(args.pressure, source, calib.mean_temp_C)
    else:
        raise _UsageError("give --value, or --pressure with --from baro")

    lat, lon = args.lat, args.lon
    needs_position = not (isinstance(source, (HAE, Baro)) and isinstance(target, (HAE, Baro)))
    if needs_position and source != target and (lat is None or lon is None):
        raise _UsageError("--lat and --lon are required for MSL and AGL conversions")
    result = convert(Height(value, source), target, ctx,
                     0.0 if lat is None else lat, 0.0 if lon is None else lon)
    _emit(result.to_json(), args.output, out)
    return EXIT_OK


def cmd_zone(args, out) -> int:
    dem = load_terrain(args.dem, MSL(args.datum), args.surface)
    if isinstance(dem.vertical_ref, MSL):
        if not args.geoid:
            raise MissingContext("geoid", "DEM heights are MSL; --geoid is needed to reach HAE")
        dem = raster_to_hae(dem, _load_geoid(args.geoid))
    config = ZoningConfig(k=args.k, k_max=args.k_max, seed=args.seed,
                          area_fraction_threshold=args.area_threshold, interval=args.interval)
    result = zone_raster(dem, config)
    meta = {"k": result.model.k, "seed": args.seed, "interval_m": args.interval,
            "area_fraction_threshold": args.area_threshold,
            "thresholds_hae_m": result.thresholds_m,
            "simple_clusters": result.simple_clusters,
            "complex_clusters": result.complex_clusters}
    text = publish_zones(result.zones, dem.geometry, meta)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("wrote %d zones to %s", len(result.zones), args.out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_risk(args, out) -> int:
    a = analyze_separation(args.sigma1, args.sigma2, args.tls, args.ceiling, args.vsm_override)
    _emit(a.to_json(), args.output, out)
    if args.sweep:
        s_max = args.sweep_max or 2.0 * a.vsm_formula_m
        rows = separation_sweep(Gaussian(0.0, args.sigma1), Gaussian(0.0, args.sigma2), s_max,
                                args.sweep_n)
        _write_rows(args.sweep, ("S_m", "overlap_density_per_m", "tail_probability"), rows)
    return EXIT_OK


def cmd_capacity(args, out) -> int:
    a = analyze_capacity(args.levels, args.qos, args.holding_hr)
    _emit(a.to_json(), args.output, out)
    if args.sweep:
        rows = demand_sweep(args.levels, args.holding_hr, args.sweep_max, args.sweep_n)
        _write_rows(args.sweep, ("demand_per_hr", "blocking_probability"), rows)
    return EXIT_OK


def cmd_logs(args, out) -> int:
    records = parse_log_csv(args.input)
    ext = extract_error_models(debias_segments(records, args.window))
    doc = ext.to_json()
    doc["meta"] = {"window_n": args.window, "sigma_hae_definition": "sample std of EPV series"}
    _emit(doc, args.output, out)
    if args.histogram:
        _write_rows(args.histogram, ("bin_center_m", "density_per_m"), ext.histogram_rows())
    return EXIT_OK


def cmd_geoid_info(args, out) -> int:
    _emit(describe_geoid(load_geoid_grid(args.path, name=Path(args.path).stem)), args.output, out)
    return EXIT_OK


def cmd_dem_info(args, out) -> int:
    _emit(describe_terrain(load_terrain(args.path, MSL(args.datum), args.surface)), args.output, out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # globals are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="haekit", description="Height-reference conversion and airspace analysis.",
                parents=[common])
    p.add_argument("--version", action="version", version=f"haekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("convert", parents=[common], help="convert a height between references")
    kinds = ("hae", "msl", "agl", "baro")
    c.add_argument("--from", dest="src", choices=kinds, required=True)
    c.add_argument("--to", dest="dst", choices=kinds, required=True)
    c.add_argument("--value", type=float)
    c.add_argument("--pressure", type=float, help="aircraft static pressure, hPa")
    c.add_argument("--calib", help="calibration JSON {lat, lon, [hae_m], pressure_hPa, mean_temp_C}")
    c.add_argument("--geoid")
    c.add_argument("--dem")
    c.add_argument("--lat", type=float)
    c.add_argument("--lon", type=float)
    c.add_argument("--datum", default="EGM96")
    c.add_argument("--surface", choices=("DTM", "DSM"), default="DTM")
    c.add_argument("--code", choices=("QNH", "QFE", "QNE"), default="QNH")
    c.add_argument("--ref-pressure", type=float, default=STANDARD_PRESSURE_HPA)
    c.add_argument("--qnh", type=float, help="altimeter setting, overrides --ref-pressure")
    c.set_defaults(func=cmd_convert)

    z = sub.add_parser("zone", parents=[common], help="zone a DEM into HAE height thresholds")
    z.add_argument("--dem", required=True)
    z.add_argument("--geoid")
    z.add_argument("--k", type=int)
    z.add_argument("--k-max", type=int, default=8)
    z.add_argument("--interval", type=float, default=100.0)
    z.add_argument("--area-threshold", type=float, default=0.85)
    z.add_argument("--datum", default="EGM96")
    z.add_argument("--surface", choices=("DTM", "DSM"), default="DSM")
    z.add_argument("--out", help="zone JSON path (default stdout)")
    z.set_defaults(func=cmd_zone)

    r = sub.add_parser("risk", parents=[common], help="vertical separation from error sigmas")
    r.add_argument("--sigma1", type=float, required=True)
    r.add_argument("--sigma2", type=float, required=True)
    r.add_argument("--tls", type=float, default=1e-7)
    r.add_argument("--ceiling", type=float, default=1000.0)
    r.add_argument("--vsm-override", type=float)
    r.add_argument("--sweep", help="CSV of (S, density, tail)")
    r.add_argument("--sweep-max", type=float)
    r.add_argument("--sweep-n", type=int, default=200)
    r.set_defaults(func=cmd_risk)

    k = sub.add_parser("capacity", parents=[common], help="Erlang-B capacity of the flight levels")
    k.add_argument("--levels", type=int, required=True)
    k.add_argument("--qos", type=float, default=0.05)
    k.add_argument("--holding-hr", type=float, default=0.1)
    k.add_argument("--sweep", help="CSV of (demand, blocking)")
    k.add_argument("--sweep-max", type=float)
    k.add_argument("--sweep-n", type=int, default=200)
    k.set_defaults(func=cmd_capacity)

    lg = sub.add_parser("logs", parents=[common], help="vertical error models from flight logs")
    lg.add_argument("--input", required=True)
    lg.add_argument("--window", type=int, default=10)
    lg.add_argument("--histogram", help="CSV of (bin_center, density)")
    lg.set_defaults(func=cmd_logs)

    gi = sub.add_parser("geoid-info", parents=[common], help="summarise a UGG geoid grid")
    gi.add_argument("path")
    gi.set_defaults(func=cmd_geoid_info)

    di = sub.add_parser("dem-info", parents=[common], help="summarise a terrain raster")
    di.add_argument("path")
    di.add_argument("--datum", default="EGM96")
    di.add_argument("--surface", choices=("DTM", "DSM"), default="DTM")
    di.set_defaults(func=cmd_dem_info)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"haekit: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    args.output = getattr(args, "output", "json")
    args.seed = getattr(args, "seed", 42)
    args.quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="haekit: %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args, out)
    except (HaeKitError, _UsageError) as exc:
        tag = type(exc).__name__
        if isinstance(exc, MissingContext):
            tag += f"[{exc.which}]"
        print(f"haekit: error: {tag}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, UnicodeDecodeError) as exc:
        print(f"haekit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, json.JSONDecodeError) as exc:
        print(f"haekit: error: malformed input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
