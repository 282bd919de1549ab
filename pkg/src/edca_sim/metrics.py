"""Ledger aggregation and CSV export.

All estimators work off packet records. Latency is deliver minus generation
time; throughput over an interval is delivered bits divided by its length.
Percentiles use the nearest-rank rule (ceil(p * n)), medians interpolate.

Exports are plain CSV with a fixed header and every number printed with 9
significant digits, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import CATEGORIES, ServiceCategory
from .mac_edca import PacketRecord


@dataclass(frozen=True)
class SeriesPoint:
    bucket_start: float
    category: ServiceCategory
    mean_latency: Optional[float]   # None when the bucket delivered nothing
    throughput: float               # bits/s over the bucket
    delivered: int


@dataclass
class CategorySummary:
    category: ServiceCategory
    generated: int = 0
    delivered: int = 0
    dropped: int = 0
    residual: int = 0
    delivered_bits: int = 0
    mean_latency: Optional[float] = None
    median_latency: Optional[float] = None
    p95_latency: Optional[float] = None
    mean_throughput: float = 0.0


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def percentile(values: Sequence[float], p: float) -> float:
    """Nearest-rank percentile of a nonempty sequence, p in (0, 1]."""
    if not values:
        raise ValueError("percentile of empty sequence")
    ordered = sorted(values)
    rank = math.ceil(p * len(ordered))
    return ordered[max(rank, 1) - 1]


def time_series(ledger: Iterable[PacketRecord], bucket: float) -> List[SeriesPoint]:
    """Per-category delivery series in fixed buckets, zero-filled through the
    last bucket that delivered anything."""
    if bucket <= 0:
        raise ValueError("bucket must be > 0")
    acc: Dict[Tuple[int, ServiceCategory], List[float]] = {}
    last = -1
    for rec in ledger:
        if rec.deliver_time is None:
            continue
        b = int(rec.deliver_time / bucket)
        cell = acc.get((b, rec.category))
        if cell is None:
            cell = [0.0, 0.0, 0]   # latency sum, bits, count
            acc[(b, rec.category)] = cell
        cell[0] += rec.deliver_time - rec.gen_time
        cell[1] += rec.size * 8
        cell[2] += 1
        if b > last:
            last = b
    out: List[SeriesPoint] = []
    for b in range(last + 1):
        for cat in CATEGORIES:
            cell = acc.get((b, cat))
            if cell is None:
                out.append(SeriesPoint(b * bucket, cat, None, 0.0, 0))
            else:
                out.append(SeriesPoint(b * bucket, cat, cell[0] / cell[2],
                                       cell[1] / bucket, cell[2]))
    return out


def latencies_of(ledger: Iterable[PacketRecord], category: ServiceCategory) -> List[float]:
    return [rec.deliver_time - rec.gen_time for rec in ledger
            if rec.category is category and rec.deliver_time is not None]


def cdf_points(values: Sequence[float]) -> List[Tuple[float, float]]:
    """(value, fraction <= value) over distinct sorted values."""
    n = len(values)
    if n == 0:
        return []
    out: List[Tuple[float, float]] = []
    seen = 0
    ordered = sorted(values)
    for i, v in enumerate(ordered):
        seen += 1
        if i + 1 == n or ordered[i + 1] != v:
            out.append((v, seen / n))
    return out


def cdf_latency(ledger: Iterable[PacketRecord], category: ServiceCategory
                ) -> List[Tuple[float, float]]:
    return cdf_points(latencies_of(ledger, category))


def cdf_throughput(ledger: Iterable[PacketRecord], category: ServiceCategory,
                   bucket: float) -> List[Tuple[float, float]]:
    """CDF of per-bucket throughput samples, zero buckets included."""
    series = time_series(ledger, bucket)
    return cdf_points([pt.throughput for pt in series if pt.category is category])


def summarize(ledger: Iterable[PacketRecord], duration: Optional[float] = None
              ) -> Dict[ServiceCategory, CategorySummary]:
    """Per-category counts and latency stats over a whole ledger.

    duration (s) scales mean throughput; when omitted it is inferred from
    the latest packet timestamp.
    """
    rows = {cat: CategorySummary(cat) for cat in CATEGORIES}
    lat: Dict[ServiceCategory, List[float]] = {cat: [] for cat in CATEGORIES}
    horizon = 0.0
    for rec in ledger:
        row = rows[rec.category]
        row.generated += 1
        if rec.gen_time > horizon:
            horizon = rec.gen_time
        if rec.deliver_time is not None:
            row.delivered += 1
            row.delivered_bits += rec.size * 8
            lat[rec.category].append(rec.deliver_time - rec.gen_time)
            if rec.deliver_time > horizon:
                horizon = rec.deliver_time
        elif rec.dropped:
            row.dropped += 1
        else:
            row.residual += 1
    span = duration if duration is not None else horizon
    for cat, row in rows.items():
        vals = lat[cat]
        if vals:
            row.mean_latency = sum(vals) / len(vals)
            row.median_latency = statistics.median(vals)
            row.p95_latency = percentile(vals, 0.95)
        if span > 0:
            row.mean_throughput = row.delivered_bits / span
    return rows


# ---------------------------------------------------------------------------
# CSV writers. Headers are part of the format contract.

SERIES_HEADER = ["bucket_start", "category", "mean_latency", "throughput", "delivered"]
CDF_HEADER_LATENCY = ["category", "latency", "cum_fraction"]
CDF_HEADER_THROUGHPUT = ["category", "throughput", "cum_fraction"]
SUMMARY_HEADER = ["mode", "category", "seed", "generated", "delivered", "dropped",
                  "residual", "mean_latency", "median_latency", "p95_latency",
                  "mean_throughput"]


def export_series(points: Iterable[SeriesPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_HEADER)
        for pt in points:
            w.writerow([_fmt(pt.bucket_start), pt.category.short,
                        _fmt(pt.mean_latency), _fmt(pt.throughput), pt.delivered])


def export_cdf(per_category: Dict[ServiceCategory, List[Tuple[float, float]]],
               path, value_name: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["category", value_name, "cum_fraction"])
        for cat in CATEGORIES:
            for value, frac in per_category.get(cat, []):
                w.writerow([cat.short, _fmt(value), _fmt(frac)])


def export_summary(rows: Dict[ServiceCategory, CategorySummary], path,
                   mode: str, seed: int) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_HEADER)
        for cat in CATEGORIES:
            r = rows[cat]
            w.writerow([mode, cat.short, seed, r.generated, r.delivered, r.dropped,
                        r.residual, _fmt(r.mean_latency), _fmt(r.median_latency),
                        _fmt(r.p95_latency), _fmt(r.mean_throughput)])
