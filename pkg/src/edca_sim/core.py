"""Service categories, per-category profiles and the simulation config.

Everything the simulator does is driven by a single SimConfig value. The
defaults describe the reference scenario: a 600 m corridor with a roadside
unit in the middle, a 6 Mb/s half-clocked OFDM channel (13 us slots), and
four application categories (voice, video, HD map updates, best effort)
whose rate/latency targets and contention-window seed ranges live in
CategoryProfile.

Profiles carry two kinds of numbers:

* targets used by the reward (rate_threshold, latency_threshold),
* normalizers used by the utility (rate_max, latency_max), which default to
  the application rate and the latency threshold respectively.

``default_profiles(traffic_scale=...)`` scales the rate side of all profiles
by a common factor. That keeps the reward geometry intact while letting a
desk-size run stay oversubscribed without generating millions of packets.
Latency numbers are never scaled; they are set by real airtime.

Config validation collects every violation instead of stopping at the first
one, so a bad config file is reported in one shot.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

__version__ = "0.1.0"


class ServiceCategory(Enum):
    """The four application traffic classes a vehicle can carry."""

    VOICE = "VO"
    VIDEO = "VI"
    HD_MAP = "HD"
    BEST_EFFORT = "BE"

    @property
    def short(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_short(cls, code: str) -> "ServiceCategory":
        for cat in cls:
            if cat.value == code:
                return cat
        raise ValueError(f"unknown category code {code!r}")


_LABELS = {
    ServiceCategory.VOICE: "Voice",
    ServiceCategory.VIDEO: "Video",
    ServiceCategory.HD_MAP: "HD Map",
    ServiceCategory.BEST_EFFORT: "Best Effort",
}

CATEGORIES: Tuple[ServiceCategory, ...] = tuple(ServiceCategory)


@dataclass(frozen=True)
class EdcaParams:
    """One queue's contention parameters. cw bounds live in [1, 1023]."""

    cw_min: int
    cw_max: int
    ifsn: int

    def __post_init__(self) -> None:
        if not (1 <= self.cw_min <= self.cw_max <= CW_CAP):
            raise ValueError(
                f"need 1 <= cw_min <= cw_max <= {CW_CAP}, got ({self.cw_min}, {self.cw_max})"
            )
        if self.ifsn < 1:
            raise ValueError(f"ifsn must be >= 1, got {self.ifsn}")


CW_CAP = 1023

# Standard EDCA parameter rows (CWmin, CWmax, AIFSN). HD map traffic has no
# row of its own in the standard and rides the BE access class; the BK row is
# kept for completeness but no category maps to it here.
STANDARD_EDCA: Dict[str, EdcaParams] = {
    "VO": EdcaParams(3, 7, 2),
    "VI": EdcaParams(7, 15, 3),
    "BE": EdcaParams(15, 1023, 6),
    "BK": EdcaParams(15, 1023, 9),
}

# DCF fallback used by the single-queue baseline mode.
DCF_PARAMS = EdcaParams(15, 1023, 2)

AC_OF_CATEGORY = {
    ServiceCategory.VOICE: "VO",
    ServiceCategory.VIDEO: "VI",
    ServiceCategory.HD_MAP: "BE",
    ServiceCategory.BEST_EFFORT: "BE",
}


def standard_params(category: ServiceCategory) -> EdcaParams:
    """Standard EDCA row for a category (HD map rides the BE class)."""
    return STANDARD_EDCA[AC_OF_CATEGORY[category]]


@dataclass(frozen=True)
class CategoryProfile:
    """Static per-category targets, seeds and bounds."""

    category: ServiceCategory
    app_rate: float              # offered application rate, bits/s
    packet_size: int             # bytes
    rate_threshold: float        # reward rate target, bits/s
    latency_threshold: float     # reward latency target, s
    rate_max: float              # rate normalizer, bits/s
    latency_max: float           # latency normalizer and zero-delivery sentinel, s
    wt_max: float                # waiting-time ceiling and decision cycle length, s
    cw_seed_min: int             # starting cw_min for agent-tuned modes
    cw_seed_max: int             # starting cw_max for agent-tuned modes
    ifsn_min: int
    ifsn_max: int


def default_profiles(traffic_scale: float = 1.0) -> Dict[ServiceCategory, CategoryProfile]:
    """Reference profiles; rates scaled by traffic_scale, latencies untouched."""
    s = traffic_scale
    rows = [
        # category, app bits/s, pkt B, R_th bits/s, L_th s, wt_max s, seeds, ifsn bounds
        (ServiceCategory.VOICE, 100e3, 100, 0.1e6, 0.150, 0.92, (2, 10), (1, 10)),
        (ServiceCategory.VIDEO, 5e6, 1200, 1.25e6, 0.100, 2.0, (3, 17), (1, 20)),
        (ServiceCategory.HD_MAP, 4e6, 1200, 1.25e6, 0.100, 2.0, (3, 17), (1, 20)),
        (ServiceCategory.BEST_EFFORT, 28e6, 1200, 1.0e6, 1.000, 8.0, (7, 23), (1, 40)),
    ]
    out = {}
    for cat, rate, size, rth, lth, wtm, seeds, ifsb in rows:
        out[cat] = CategoryProfile(
            category=cat,
            app_rate=rate * s,
            packet_size=size,
            rate_threshold=rth * s,
            latency_threshold=lth,
            rate_max=rate * s,
            latency_max=lth,
            wt_max=wtm,
            cw_seed_min=seeds[0],
            cw_seed_max=seeds[1],
            ifsn_min=ifsb[0],
            ifsn_max=ifsb[1],
        )
    return out


MODES = ("nonqos", "qos", "cwfixed8", "cwmin3", "cwminmax", "two-agent", "three-agent")

MODE_LABELS = {
    "nonqos": "Non-QoS",
    "qos": "QoS",
    "cwfixed8": "CWminFixed",
    "cwmin3": "CWmin",
    "cwminmax": "CWminmax",
    "two-agent": "CWminmaxIFS",
    "three-agent": "CWminmaxIFS_STime",
}


@dataclass
class SimConfig:
    """Full description of one experiment. Serializes to/from a JSON dict."""

    mode: str = "three-agent"
    rng_seed: int = 1
    episodes: int = 50
    episode_duration: float = 250.0      # s
    arrival_interval: float = 0.66       # s between vehicle entries
    road_length: float = 600.0           # m, corridor
    rsu_position: float = 300.0          # m
    coverage_radius: float = 200.0       # m
    max_speed: float = 17.0              # m/s
    accel: float = 2.6                   # m/s^2
    decel: float = 4.5                   # m/s^2, used only toward a stop point
    spawn_speed: Optional[float] = None  # None means enter at max_speed
    stop_position: Optional[float] = None
    mobility_tick: float = 0.1           # s
    slot_time: float = 13e-6             # s
    sifs: float = 32e-6                  # s
    phy_rate: float = 6e6                # bits/s
    tx_overhead: float = 68e-6           # s per frame (preamble, headers, ack turnaround)
    retry_limit: int = 7
    alpha1: float = 0.3                  # utility weight on rate
    alpha2: float = 0.7                  # utility weight on latency
    reward_bonus: float = 1.0            # a
    reward_penalty: float = 1.0          # b
    rate_ratio_cap: float = 1.5
    learning_rate: float = 0.1
    discount: float = 0.99
    epsilon: float = 0.2
    count_bin_width: int = 5             # vehicle-count discretization
    count_bin_cap: int = 10
    sojourn_bins: int = 8
    sojourn_span: float = 20.0           # s
    series_bucket: float = 1.0           # s, time-series bucket for exports
    reset_tables_each_episode: bool = False
    profiles: Dict[ServiceCategory, CategoryProfile] = field(default_factory=default_profiles)

    def profile(self, category: ServiceCategory) -> CategoryProfile:
        return self.profiles[category]


def profile_of(category: ServiceCategory, config: SimConfig) -> CategoryProfile:
    return config.profiles[category]


class ConfigError(ValueError):
    pass


def validate_config(config: SimConfig) -> List[str]:
    """Return every violated constraint as a message; empty list means valid."""
    errs: List[str] = []

    def need(cond: bool, msg: str) -> None:
        if not cond:
            errs.append(msg)

    need(config.mode in MODES, f"mode must be one of {', '.join(MODES)}, got {config.mode!r}")
    need(config.episodes >= 1, "episodes must be >= 1")
    for name in ("episode_duration", "arrival_interval", "road_length", "coverage_radius",
                 "max_speed", "mobility_tick", "slot_time", "phy_rate", "series_bucket"):
        need(getattr(config, name) > 0, f"{name} must be > 0")
    need(config.accel > 0, "accel must be > 0")
    need(config.decel > 0, "decel must be > 0")
    need(config.sifs >= 0, "sifs must be >= 0")
    need(config.tx_overhead >= 0, "tx_overhead must be >= 0")
    need(0 <= config.rsu_position <= config.road_length,
         "rsu_position must lie on the corridor")
    if config.spawn_speed is not None:
        need(config.spawn_speed >= 0, "spawn_speed must be >= 0")
    need(config.retry_limit >= 1, "retry_limit must be >= 1")
    need(0 < config.alpha1 <= 1, "alpha1 must be in (0, 1]")
    need(0 < config.alpha2 <= 1, "alpha2 must be in (0, 1]")
    need(config.reward_bonus >= 0, "reward_bonus must be >= 0")
    need(config.reward_penalty >= 0, "reward_penalty must be >= 0")
    need(config.rate_ratio_cap >= 1, "rate_ratio_cap must be >= 1")
    need(0 < config.learning_rate <= 1, "learning_rate must be in (0, 1]")
    need(0 <= config.discount <= 1, "discount must be in [0, 1]")
    need(0 <= config.epsilon <= 1, "epsilon must be in [0, 1]")
    need(config.count_bin_width >= 1, "count_bin_width must be >= 1")
    need(config.count_bin_cap >= 1, "count_bin_cap must be >= 1")
    need(config.sojourn_bins >= 1, "sojourn_bins must be >= 1")
    need(config.sojourn_span > 0, "sojourn_span must be > 0")

    seen = set(config.profiles)
    for cat in CATEGORIES:
        if cat not in seen:
            errs.append(f"missing profile for {cat.short}")
    for cat, p in config.profiles.items():
        tag = cat.short
        need(p.app_rate > 0, f"{tag}: app_rate must be > 0")
        need(p.packet_size > 0, f"{tag}: packet_size must be > 0")
        need(p.rate_threshold > 0, f"{tag}: rate_threshold must be > 0")
        need(p.latency_threshold > 0, f"{tag}: latency_threshold must be > 0")
        need(p.rate_max > 0, f"{tag}: rate_max must be > 0")
        need(p.latency_max > 0, f"{tag}: latency_max must be > 0")
        need(p.wt_max > 0, f"{tag}: wt_max must be > 0")
        need(1 <= p.cw_seed_min <= p.cw_seed_max <= CW_CAP,
             f"{tag}: need 1 <= cw_seed_min <= cw_seed_max <= {CW_CAP}")
        need(p.ifsn_min >= 1, f"{tag}: ifsn_min must be >= 1")
        need(p.ifsn_min <= p.ifsn_max, f"{tag}: ifsn_min must be <= ifsn_max")
    return errs


def require_valid(config: SimConfig) -> SimConfig:
    errs = validate_config(config)
    if errs:
        raise ConfigError("; ".join(errs))
    return config


# ---------------------------------------------------------------------------
# JSON round trip. Profiles are keyed by category code; every other field is
# a flat scalar so config files stay hand-editable.

def config_to_dict(config: SimConfig) -> dict:
    d = {}
    for name in SimConfig.__dataclass_fields__:
        if name == "profiles":
            continue
        d[name] = getattr(config, name)
    d["profiles"] = {
        cat.short: {k: v for k, v in vars(p).items() if k != "category"}
        for cat, p in config.profiles.items()
    }
    return d


def config_from_dict(d: dict) -> SimConfig:
    known = set(SimConfig.__dataclass_fields__)
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = {k: v for k, v in d.items() if k != "profiles"}
    if "profiles" in d:
        profs = {}
        for code, fields_ in d["profiles"].items():
            cat = ServiceCategory.from_short(code)
            profs[cat] = CategoryProfile(category=cat, **fields_)
        kw["profiles"] = profs
    return SimConfig(**kw)


def save_config(config: SimConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config_to_dict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> SimConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def scaled_config(traffic_scale: float, **overrides) -> SimConfig:
    """Convenience constructor: default config with rate-scaled profiles."""
    return SimConfig(profiles=default_profiles(traffic_scale), **overrides)
