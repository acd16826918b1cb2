"""Flight-log ingestion and vertical-error extraction.

CSV schema (UTF-8, header required)::

    t_s,segment_id,baro_alt_m,rtk_hae_m,epv_m

RTK ellipsoidal height is ground truth; the barometric residual is
``baro_alt_m - rtk_hae_m`` after removing each segment's initial bias.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyInput, InsufficientData, MalformedRow, MissingColumn, SegmentTooShort
from .risk import Empirical

COLUMNS = ("t_s", "segment_id", "baro_alt_m", "rtk_hae_m", "epv_m")
MIN_RECORDS = 30
HIST_HALF_WIDTH_SIGMAS = 6.0
HIST_BINS_PER_SIGMA = 10
# a bias within this many ulps of the window's heights is rounding noise left
# by an earlier debias; skipping it makes a second pass a no-op
DEBIAS_ULPS = 8
SPIKE_WIDTH_M = 0.01


@dataclass(frozen=True)
class FlightLogRecord:
    t_s: float
    segment_id: str
    baro_alt_m: float
    rtk_hae_m: float
    epv_m: float

    @property
    def residual_m(self) -> float:
        return self.baro_alt_m - self.rtk_hae_m


# -- CSV ----------------------------------------------------------------------

def parse_log_csv(source) -> list[FlightLogRecord]:
    """Parse log rows from bytes, text, a stream or a path.

    Row indices in errors count data rows from 0.
    """
    reader = csv.reader(io.StringIO(_read_text(source)))
    header = next(reader, None)
    if header is None:
        raise MissingColumn(f"empty log; expected columns {','.join(COLUMNS)}")
    header = [h.strip() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise MissingColumn(f"missing column(s): {', '.join(missing)}")
    pos = {c: header.index(c) for c in COLUMNS}

    records: list[FlightLogRecord] = []
    last_t: dict[str, float] = {}
    for i, row in enumerate(reader):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(header):
            raise MalformedRow(i, f"expected {len(header)} fields, got {len(row)}")
        try:
            t, baro, rtk, epv = (float(row[pos[c]]) for c in ("t_s", "baro_alt_m", "rtk_hae_m", "epv_m"))
        except ValueError as exc:
            raise MalformedRow(i, str(exc)) from None
        if not all(math.isfinite(v) for v in (t, baro, rtk, epv)):
            raise MalformedRow(i, "non-finite value")
        if epv < 0:
            raise MalformedRow(i, f"negative epv {epv}")
        seg = row[pos["segment_id"]].strip()
        if seg in last_t and t < last_t[seg]:
            raise MalformedRow(i, f"time goes backwards in segment {seg!r}")
        last_t[seg] = t
        records.append(FlightLogRecord(t, seg, baro, rtk, epv))
    return records


def write_log_csv(records, dest=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([repr(r.t_s), r.segment_id, repr(r.baro_alt_m), repr(r.rtk_hae_m), repr(r.epv_m)])
    text = buf.getvalue()
    if dest is not None:
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", encoding="utf-8", newline="") as f:
                f.write(text)
    return text


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8") if isinstance(data, bytes) else data
    with open(source, encoding="utf-8", newline="") as f:
        return f.read()


# -- processing ---------------------------------------------------------------

def segments(records) -> dict[str, list[FlightLogRecord]]:
    """Records grouped by segment id, in lexicographic id order."""
    out: dict[str, list[FlightLogRecord]] = {}
    for r in records:
        out.setdefault(r.segment_id, []).append(r)
    return dict(sorted(out.items()))


def debias_segments(records, window_n: int = 10) -> list[FlightLogRecord]:
    """Subtract each segment's mean residual over its first ``window_n`` records.

    Output keeps the input order; only ``baro_alt_m`` changes.
    """
    if window_n < 1:
        raise ValueError("window_n must be at least 1")
    records = list(records)
    bias = {}
    for seg, recs in segments(records).items():
        if len(recs) < window_n:
            raise SegmentTooShort(seg, len(recs), window_n)
        window = recs[:window_n]
        b = math.fsum(r.residual_m for r in window) / window_n
        scale = max(max(abs(r.baro_alt_m), abs(r.rtk_hae_m)) for r in window)
        bias[seg] = b if abs(b) > DEBIAS_ULPS * np.spacing(scale) else 0.0
    return [r if bias[r.segment_id] == 0.0 else replace(r, baro_alt_m=r.baro_alt_m - bias[r.segment_id])
            for r in records]


@dataclass(frozen=True, eq=False)
class ErrorExtraction:
    sigma_baro_m: float
    sigma_hae_m: float
    n_segments: int
    n_records: int
    residual_histogram: Empirical
    mean_residual_m: float = 0.0

    def to_json(self) -> dict:
        return {
            "sigma_baro_m": self.sigma_baro_m,
            "sigma_hae_m": self.sigma_hae_m,
            "mean_residual_m": self.mean_residual_m,
            "n_segments": self.n_segments,
            "n_records": self.n_records,
            "histogram_bins": int(self.residual_histogram.densities.size),
        }

    def histogram_rows(self) -> list[tuple[float, float]]:
        h = self.residual_histogram
        return [(float(c), float(d)) for c, d in zip(h.centers, h.densities)]


def residual_histogram(residuals, sigma: float) -> Empirical:
    """Density histogram, bin width sigma/10 over mean +- 6 sigma."""
    eps = np.asarray(residuals, dtype=np.float64)
    mean = float(eps.mean())
    # zero spread (or spread too small to bin in float64) becomes one unit spike
    if sigma / HIST_BINS_PER_SIGMA <= 16 * np.spacing(abs(mean) + HIST_HALF_WIDTH_SIGMAS * sigma):
        half = SPIKE_WIDTH_M / 2
        return Empirical(np.array([mean - half, mean + half]), np.array([1.0 / SPIKE_WIDTH_M]))
    nbins = int(2 * HIST_HALF_WIDTH_SIGMAS * HIST_BINS_PER_SIGMA)
    lo = mean - HIST_HALF_WIDTH_SIGMAS * sigma
    hi = mean + HIST_HALF_WIDTH_SIGMAS * sigma
    return Empirical.from_samples(eps, (hi - lo) / nbins, lo, hi)


def extract_error_models(records) -> ErrorExtraction:
    """Pooled baro residual sigma, EPV-series sigma and the residual histogram.

    ``sigma_hae_m`` is the sample standard deviation of the EPV values.
    Treating EPV as a per-sample 1-sigma and taking its RMS would be the
    other reading; that is not what this returns.
    """
    records = list(records)
    if len(records) < MIN_RECORDS:
        raise InsufficientData(f"need at least {MIN_RECORDS} records, got {len(records)}")
    eps = np.array([r.residual_m for r in records])
    epv = np.array([r.epv_m for r in records])
    sigma_baro = float(np.std(eps, ddof=1))
    sigma_hae = float(np.std(epv, ddof=1))
    return ErrorExtraction(sigma_baro, sigma_hae, len(segments(records)), len(records),
                           residual_histogram(eps, sigma_baro), float(eps.mean()))


def descriptive_stats(values) -> dict[str, float]:
    v = [float(x) for x in values]
    if not v:
        raise EmptyInput("no values")
    lo, hi = min(v), max(v)
    return {
        "mean": statistics.fmean(v),
        "sd": statistics.stdev(v) if len(v) > 1 else 0.0,
        "min": lo,
        "median": statistics.median(v),
        "max": hi,
        "range": hi - lo,
    }
