"""Exception hierarchy shared by every haekit module."""

from __future__ import annotations


class HaeKitError(ValueError):
    """Base class for all domain errors raised by haekit."""


# grid / raster parsing
class MalformedHeader(HaeKitError):
    pass


class ValueCountMismatch(HaeKitError):
    pass


class NonFiniteValue(HaeKitError):
    pass


class InvalidGrid(HaeKitError):
    pass


# spatial queries
class OutOfExtent(HaeKitError):
    pass


class NodataNeighborhood(HaeKitError):
    pass


class GeoidCoverageGap(HaeKitError):
    pass


# conversions
class MissingContext(HaeKitError):
    def __init__(self, which: str, message: str | None = None):
        self.which = which
        super().__init__(message or f"missing context: {which}")


class UnsupportedPath(HaeKitError):
    pass


class NonPositivePressure(HaeKitError):
    pass


class InvalidReference(HaeKitError):
    pass


# statistics / clustering
class EmptyInput(HaeKitError):
    pass


class KTooLarge(HaeKitError):
    pass


# risk / capacity
class DegenerateModel(HaeKitError):
    pass


class OutOfDomain(HaeKitError):
    pass


class NonPositiveInput(HaeKitError):
    pass


class NegativeLoad(HaeKitError):
    pass


class NonPositiveHoldingTime(HaeKitError):
    pass


# flight logs
class MalformedRow(HaeKitError):
    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"row {index}: {message}")


class MissingColumn(HaeKitError):
    pass


class SegmentTooShort(HaeKitError):
    def __init__(self, segment_id: str, n: int, window_n: int):
        self.segment_id = segment_id
        super().__init__(
            f"segment {segment_id!r} has {n} records, debias window needs {window_n}")


class InsufficientData(HaeKitError):
    pass
