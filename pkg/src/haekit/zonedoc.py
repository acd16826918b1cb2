"""Zone document (JSON): run-length masks plus traced boundary polygons."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .grid import GridGeometry
from .zoning import CLASS_G_HEIGHT_M, CLASS_W_HEIGHT_M, RegionStats, Zone

M_DECIMALS = 2
DEG_DECIMALS = 6
DIMENSIONLESS_DECIMALS = 4

# the Class-G rule also caps altitude at 6000 m MSL; recorded, never enforced
CLASS_G_MSL_LIMIT_M = 6000.0


# -- masks --------------------------------------------------------------------

def mask_to_rle(mask: np.ndarray) -> list[list[int]]:
    """Row-major ``[start, length]`` runs of True cells."""
    flat = np.asarray(mask, dtype=bool).ravel()
    padded = np.concatenate(([False], flat, [False])).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return [[int(s), int(e - s)] for s, e in zip(starts, ends)]


def rle_to_mask(runs, nrows: int, ncols: int) -> np.ndarray:
    flat = np.zeros(nrows * ncols, dtype=bool)
    for start, length in runs:
        flat[start:start + length] = True
    return flat.reshape(nrows, ncols)


def trace_rings(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """Closed boundary rings of a cell mask, as (row, col) cell-corner vertices.

    Edges are oriented with the interior on the right; at corners shared by
    two diagonal cells the walk turns right, keeping such cells in separate
    rings.  Collinear vertices are dropped.
    """
    m = np.pad(np.asarray(mask, dtype=bool), 1)
    inner = m[1:-1, 1:-1]
    r, c = np.nonzero(inner & ~m[:-2, 1:-1])
    edges = [((a, b), (a, b + 1)) for a, b in zip(r.tolist(), c.tolist())]
    r, c = np.nonzero(inner & ~m[1:-1, 2:])
    edges += [((a, b + 1), (a + 1, b + 1)) for a, b in zip(r.tolist(), c.tolist())]
    r, c = np.nonzero(inner & ~m[2:, 1:-1])
    edges += [((a + 1, b + 1), (a + 1, b)) for a, b in zip(r.tolist(), c.tolist())]
    r, c = np.nonzero(inner & ~m[1:-1, :-2])
    edges += [((a + 1, b), (a, b)) for a, b in zip(r.tolist(), c.tolist())]

    out: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    for a, b in edges:
        out[a].append(b)

    rings = []
    for start in sorted(out):
        while out[start]:
            ring = [start]
            prev, cur = start, out[start].pop()
            while cur != start:
                ring.append(cur)
                nxt = out[cur]
                if len(nxt) == 1:
                    choice = nxt.pop()
                else:
                    choice = _right_turn(prev, cur, nxt)
                    nxt.remove(choice)
                prev, cur = cur, choice
            rings.append(_drop_collinear(ring))
    return rings


def _right_turn(prev, cur, options):
    # rows grow downward, so with (dr, dc) the right-hand turn is (dc, -dr)
    dr, dc = cur[0] - prev[0], cur[1] - prev[1]
    want = (cur[0] + dc, cur[1] - dr)
    return want if want in options else options[0]


def _drop_collinear(ring):
    n = len(ring)
    keep = []
    for i in range(n):
        a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) != (b[1] - a[1]) * (c[0] - b[0]):
            keep.append(b)
    return keep


def mask_polygons(mask: np.ndarray, geom: GridGeometry) -> list[list[list[float]]]:
    """Boundary rings in [lat, lon] degrees; each ring is closed (first vertex repeated)."""
    polys = []
    for ring in trace_rings(mask):
        pts = [[round(geom.lat0 + (r - 0.5) * geom.dlat, DEG_DECIMALS),
                round(geom.lon0 + (c - 0.5) * geom.dlon, DEG_DECIMALS)] for r, c in ring]
        pts.append(list(pts[0]))
        polys.append(pts)
    return polys


# -- documents ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZoneDocument:
    geometry: GridGeometry
    meta: dict
    zones: list[Zone]


def _m(x):
    return None if x is None else round(float(x), M_DECIMALS)


def _stats_json(s: RegionStats) -> dict:
    d = {}
    for f in fields(RegionStats):
        v = getattr(s, f.name)
        if f.name == "pixel_count":
            d[f.name] = int(v)
        elif f.name in ("skew", "kurtosis"):
            d[f.name] = round(float(v), DIMENSIONLESS_DECIMALS)
        else:
            d[f.name] = _m(v)
    return d


def zone_to_json(z: Zone, geom: GridGeometry) -> dict:
    d = {
        "id": z.id,
        "category": z.category,
        "baseline_hae_m": _m(z.baseline_hae_m),
        "classW_ceiling_hae_m": _m(z.classW_ceiling_hae_m),
        "classG_ceiling_hae_m": _m(z.classG_ceiling_hae_m),
    }
    if z.category == "complex-band":
        d["band"] = {"lower": _m(z.hae_lower_m), "upper": _m(z.hae_upper_m)}
    d["stats"] = _stats_json(z.stats)
    d["mask_rle"] = mask_to_rle(z.mask)
    d["polygons"] = mask_polygons(z.mask, geom)
    return d


def publish_zones(zones: list[Zone], geometry: GridGeometry, meta: dict | None = None) -> str:
    """Serialize zones to the published JSON document."""
    g = geometry
    head = {
        "raster": {"lat0": g.lat0, "lon0": g.lon0, "dlat": g.dlat, "dlon": g.dlon,
                   "nrows": g.nrows, "ncols": g.ncols},
        "toolkit": "haekit",
        "toolkit_version": __version__,
        "vertical_reference": "HAE",
        "classW_height_m": CLASS_W_HEIGHT_M,
        "classG_height_m": CLASS_G_HEIGHT_M,
        "classG_msl_limit_m": CLASS_G_MSL_LIMIT_M,
        "classG_msl_limit_enforced": False,
    }
    for key, value in (meta or {}).items():
        head.setdefault(key, value)
    doc = {"meta": head, "zones": [zone_to_json(z, g) for z in zones]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_zone_document(source) -> ZoneDocument:
    if isinstance(source, dict):
        doc = source
    else:
        text = source.decode("utf-8") if isinstance(source, bytes) else str(source)
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as f:
                text = f.read()
        doc = json.loads(text)
    meta = dict(doc["meta"])
    r = meta["raster"]
    geom = GridGeometry(r["lat0"], r["lon0"], r["dlat"], r["dlon"], r["nrows"], r["ncols"])
    zones = []
    for zd in doc["zones"]:
        band = zd.get("band") or {}
        zones.append(Zone(
            id=zd["id"], category=zd["category"],
            mask=rle_to_mask(zd["mask_rle"], geom.nrows, geom.ncols),
            baseline_hae_m=zd["baseline_hae_m"],
            classW_ceiling_hae_m=zd["classW_ceiling_hae_m"],
            stats=RegionStats(**zd["stats"]),
            hae_lower_m=band.get("lower"), hae_upper_m=band.get("upper")))
    return ZoneDocument(geom, meta, zones)
