"""Corridor mobility: spawning, speed ramp, coverage bookkeeping.

One straight road, one roadside unit. Vehicles enter from either end on a
fixed arrival interval, ramp toward max_speed, and matter to the MAC only
while inside the RSU coverage disc. The optional stop point (with decel)
exists for scripted scenarios; the reference corridor never brakes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from random import Random
from typing import Dict, Iterable, List, Optional, Tuple

from .core import CATEGORIES, ServiceCategory, SimConfig

# Floor applied to speed when projecting remaining coverage time, m/s.
SPEED_FLOOR = 0.1


class CycleState(Enum):
    WAITING = "waiting"
    CONTENDING = "contending"


@dataclass
class Vehicle:
    vid: int
    category: ServiceCategory
    direction: int              # +1 rides positions up, -1 down
    position: float
    speed: float
    entry_time: float           # corridor entry, s
    covered_since: Optional[float] = None
    retired: bool = False       # done contending (left coverage or corridor)
    cycle_state: CycleState = CycleState.CONTENDING
    wt: float = 0.0             # current waiting time, s
    t0: float = 0.0             # start of the current decision cycle, s


def spawn_schedule(config: SimConfig, rng: Random) -> List[Tuple[float, ServiceCategory, int]]:
    """Arrival times with rng-assigned category and travel direction.

    Entries at k * arrival_interval for every k with a time strictly below
    the episode duration.
    """
    out = []
    t = 0.0
    k = 0
    while True:
        t = k * config.arrival_interval
        if t >= config.episode_duration:
            break
        cat = CATEGORIES[rng.randrange(len(CATEGORIES))]
        direction = 1 if rng.random() < 0.5 else -1
        out.append((t, cat, direction))
        k += 1
    return out


def spawn_vehicle(vid: int, entry_time: float, category: ServiceCategory,
                  direction: int, config: SimConfig) -> Vehicle:
    speed = config.max_speed if config.spawn_speed is None else config.spawn_speed
    position = 0.0 if direction > 0 else config.road_length
    return Vehicle(vid=vid, category=category, direction=direction,
                   position=position, speed=speed, entry_time=entry_time)


def step_mobility(vehicle: Vehicle, config: SimConfig, dt: float) -> None:
    """Advance one tick: ramp the speed, then move with the updated speed.

    A vehicle at or past its stop point is parked for good; on approach it
    brakes inside the stopping distance (plus one tick of lookahead) and
    never moves beyond the point.
    """
    v = vehicle.speed
    if config.stop_position is not None:
        gap = (config.stop_position - vehicle.position) * vehicle.direction
        if gap <= 0.0:
            vehicle.speed = 0.0
            return
        if gap <= v * v / (2.0 * config.decel) + v * dt:
            v = max(0.0, v - config.decel * dt)
            vehicle.speed = v
            vehicle.position += min(v * dt, gap) * vehicle.direction
            return
    v = min(v + config.accel * dt, config.max_speed)
    vehicle.speed = v
    vehicle.position += v * dt * vehicle.direction


def in_coverage(vehicle: Vehicle, config: SimConfig) -> bool:
    return abs(vehicle.position - config.rsu_position) <= config.coverage_radius


def off_road(vehicle: Vehicle, config: SimConfig) -> bool:
    return vehicle.position < 0.0 or vehicle.position > config.road_length


def sojourn_time(vehicle: Vehicle, config: SimConfig) -> float:
    """Projected time until the vehicle exits coverage at its current speed."""
    if not in_coverage(vehicle, config):
        raise ValueError(f"vehicle {vehicle.vid} is outside coverage")
    exit_x = config.rsu_position + config.coverage_radius * vehicle.direction
    dist = (exit_x - vehicle.position) * vehicle.direction
    return dist / max(vehicle.speed, SPEED_FLOOR)


def active_counts(vehicles: Iterable[Vehicle], config: SimConfig
                  ) -> Tuple[int, Dict[ServiceCategory, int]]:
    """Vehicles currently inside coverage, total and per category."""
    per: Dict[ServiceCategory, int] = {cat: 0 for cat in CATEGORIES}
    total = 0
    for v in vehicles:
        if not v.retired and v.covered_since is not None and in_coverage(v, config):
            total += 1
            per[v.category] += 1
    return total, per
