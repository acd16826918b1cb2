"""Vertical reference tags: HAE, MSL{datum}, AGL{surface}, Baro{Q-code}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InvalidReference

STANDARD_PRESSURE_HPA = 1013.25
SURFACE_KINDS = ("DTM", "DSM")
Q_CODES = ("QNH", "QFE", "QNE")
MAX_ABS_HEIGHT = 100_000.0


@dataclass(frozen=True)
class HAE:
    """Height above the (WGS84) ellipsoid, the hub reference."""

    def to_json(self) -> dict:
        return {"kind": "HAE"}


@dataclass(frozen=True)
class MSL:
    """Orthometric height above a sea-level datum realised by a geoid model."""
    datum: str = "EGM96"

    def __post_init__(self):
        if not self.datum:
            raise InvalidReference("MSL datum label must be non-empty")

    def to_json(self) -> dict:
        return {"kind": "MSL", "datum": self.datum}


@dataclass(frozen=True)
class AGL:
    """Height above a terrain (DTM) or surface (DSM) model."""
    surface: str = "DTM"

    def __post_init__(self):
        if self.surface not in SURFACE_KINDS:
            raise InvalidReference(f"AGL surface must be one of {SURFACE_KINDS}, got {self.surface!r}")

    def to_json(self) -> dict:
        return {"kind": "AGL", "surface": self.surface}


@dataclass(frozen=True)
class Baro:
    """Barometric altimeter reading (meters) for an altimeter set to ``ref_pressure_hPa``."""
    code: str
    ref_pressure_hPa: float = STANDARD_PRESSURE_HPA

    def __post_init__(self):
        if self.code not in Q_CODES:
            raise InvalidReference(f"Q-code must be one of {Q_CODES}, got {self.code!r}")
        if not (math.isfinite(self.ref_pressure_hPa) and self.ref_pressure_hPa > 0):
            raise InvalidReference("reference pressure must be positive")
        if self.code == "QNE" and self.ref_pressure_hPa != STANDARD_PRESSURE_HPA:
            raise InvalidReference("QNE is fixed at 1013.25 hPa")

    def to_json(self) -> dict:
        return {"kind": "Baro", "code": self.code, "ref_pressure_hPa": self.ref_pressure_hPa}


HeightReference = Union[HAE, MSL, AGL, Baro]


def reference_from_json(d: dict) -> HeightReference:
    kind = d.get("kind")
    if kind == "HAE":
        return HAE()
    if kind == "MSL":
        return MSL(d.get("datum", "EGM96"))
    if kind == "AGL":
        return AGL(d.get("surface", "DTM"))
    if kind == "Baro":
        return Baro(d["code"], float(d.get("ref_pressure_hPa", STANDARD_PRESSURE_HPA)))
    raise InvalidReference(f"unknown reference kind {kind!r}")


@dataclass(frozen=True)
class Height:
    value_m: float
    reference: HeightReference

    def __post_init__(self):
        if not math.isfinite(self.value_m) or abs(self.value_m) >= MAX_ABS_HEIGHT:
            raise InvalidReference(f"height value {self.value_m!r} out of range")

    def to_json(self) -> dict:
        return {"value_m": self.value_m, "reference": self.reference.to_json()}
