"""Windowed rate/latency statistics and the shared utility signal.

The utility a vehicle's agents receive for a decision window is

    U = alpha1 * clamp(R_c / R_max, 0, cap) - alpha2 * (L_c / L_max) + V

where V adds a bonus (+a) or penalty (-b) per threshold crossed, with strict
inequalities; sitting exactly on a threshold contributes nothing. A window
with no deliveries reports R_c = 0 and the sentinel L_c = L_max. The latency
ratio is deliberately unclamped so very late traffic keeps hurting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import CategoryProfile, ServiceCategory


@dataclass(frozen=True)
class WindowStats:
    category: ServiceCategory
    window: float                  # s
    delivered: int
    delivered_bits: int
    rate: float                    # R_c, bits/s over the window
    mean_latency: Optional[float]  # L_c, None when nothing was delivered


def window_stats(records: Iterable, category: ServiceCategory, window: float) -> WindowStats:
    """Aggregate one vehicle's delivered packets over a decision window.

    Only records of the given category with a deliver_time count; window is
    the elapsed wall time being scored, in seconds.
    """
    if window <= 0:
        raise ValueError(f"window must be > 0, got {window}")
    bits = 0
    n = 0
    latency_sum = 0.0
    for rec in records:
        if rec.category is not category or rec.deliver_time is None:
            continue
        bits += rec.size * 8
        latency_sum += rec.deliver_time - rec.gen_time
        n += 1
    return WindowStats(
        category=category,
        window=window,
        delivered=n,
        delivered_bits=bits,
        rate=bits / window,
        mean_latency=(latency_sum / n) if n else None,
    )


def penalty_bonus(rate: float, latency: float, profile: CategoryProfile,
                  a: float, b: float) -> float:
    """Threshold term V: +a above the rate target / under the latency target,
    -b below / over; exact equality adds 0."""
    v = 0.0
    if rate < profile.rate_threshold:
        v -= b
    elif rate > profile.rate_threshold:
        v += a
    if latency < profile.latency_threshold:
        v += a
    elif latency > profile.latency_threshold:
        v -= b
    return v


def utility(stats: WindowStats, profile: CategoryProfile,
            alpha1: float, alpha2: float, a: float, b: float,
            rate_ratio_cap: float = 1.5) -> float:
    latency = stats.mean_latency if stats.delivered else profile.latency_max
    ratio = stats.rate / profile.rate_max
    if ratio < 0.0:
        ratio = 0.0
    elif ratio > rate_ratio_cap:
        ratio = rate_ratio_cap
    return (alpha1 * ratio
            - alpha2 * (latency / profile.latency_max)
            + penalty_bonus(stats.rate, latency, profile, a, b))
