"""Corridor mobility checks."""

from random import Random

import pytest
from hypothesis import given, strategies as st

from edca_sim.core import CATEGORIES, ServiceCategory, SimConfig
from edca_sim.mobility import (SPEED_FLOOR, Vehicle, active_counts, in_coverage,
                               off_road, sojourn_time, spawn_schedule,
                               spawn_vehicle, step_mobility)

VO = ServiceCategory.VOICE


def cfg(**kw):
    base = dict(episode_duration=2.0, arrival_interval=0.66, road_length=600,
                rsu_position=300, coverage_radius=200, max_speed=17.0)
    base.update(kw)
    return SimConfig(**base)


def test_schedule_times():
    sched = spawn_schedule(cfg(), Random(1))
    assert [round(t, 10) for t, _, _ in sched] == [0.0, 0.66, 1.32, 1.98]


def test_schedule_excludes_duration_boundary():
    sched = spawn_schedule(cfg(episode_duration=1.98), Random(1))
    assert len(sched) == 3


def test_schedule_deterministic_per_seed():
    a = spawn_schedule(cfg(episode_duration=60.0), Random(5))
    b = spawn_schedule(cfg(episode_duration=60.0), Random(5))
    c = spawn_schedule(cfg(episode_duration=60.0), Random(6))
    assert a == b
    assert a != c


def test_schedule_mixes_categories_and_directions():
    sched = spawn_schedule(cfg(episode_duration=120.0), Random(2))
    cats = {cat for _, cat, _ in sched}
    dirs = {d for _, _, d in sched}
    assert cats == set(CATEGORIES)
    assert dirs == {1, -1}


def test_spawn_positions():
    up = spawn_vehicle(0, 0.0, VO, 1, cfg())
    down = spawn_vehicle(1, 0.0, VO, -1, cfg())
    assert up.position == 0.0
    assert down.position == 600.0
    assert up.speed == down.speed == 17.0


def test_spawn_speed_override():
    v = spawn_vehicle(0, 0.0, VO, 1, cfg(spawn_speed=0.0))
    assert v.speed == 0.0


def test_speed_ramp():
    c = cfg(spawn_speed=0.0, accel=2.6)
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    step_mobility(v, c, 1.0)
    assert v.speed == pytest.approx(2.6)
    assert v.position == pytest.approx(2.6)
    for _ in range(20):
        step_mobility(v, c, 1.0)
    assert v.speed == 17.0


def test_stop_point_brakes():
    c = cfg(spawn_speed=17.0, stop_position=50.0, decel=4.5)
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    # stopping distance 17^2 / (2 * 4.5) = 32.1 m; brake only inside it
    for _ in range(200):
        step_mobility(v, c, 0.1)
    assert v.speed == 0.0
    assert v.position <= 50.0 + 1e-9


def test_direction_sign():
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, -1, c)
    step_mobility(v, c, 1.0)
    assert v.position < 600.0


def test_coverage_window():
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    assert not in_coverage(v, c)
    v.position = 100.0
    assert in_coverage(v, c)
    v.position = 500.0
    assert in_coverage(v, c)
    v.position = 500.1
    assert not in_coverage(v, c)


def test_off_road():
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, -1, c)
    assert not off_road(v, c)
    v.position = -0.5
    assert off_road(v, c)


def test_sojourn_at_entry_edge():
    # enters coverage at x=100 heading up; 400 m of coverage at 17 m/s
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    v.position = 100.0
    assert sojourn_time(v, c) == pytest.approx(400.0 / 17.0)


def test_sojourn_down_direction():
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, -1, c)
    v.position = 300.0
    assert sojourn_time(v, c) == pytest.approx(200.0 / 17.0)


def test_sojourn_speed_floor():
    c = cfg(spawn_speed=0.0)
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    v.position = 300.0
    assert sojourn_time(v, c) == pytest.approx(200.0 / SPEED_FLOOR)


def test_sojourn_outside_coverage_raises():
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, 1, c)
    with pytest.raises(ValueError):
        sojourn_time(v, c)


@given(st.floats(100.0, 500.0), st.sampled_from([1, -1]))
def test_sojourn_nonnegative_and_bounded(pos, direction):
    c = cfg()
    v = spawn_vehicle(0, 0.0, VO, direction, c)
    v.position = pos
    s = sojourn_time(v, c)
    assert 0.0 <= s <= 400.0 / 17.0 + 1e-9


def test_active_counts_filters():
    c = cfg()
    vs = []
    for i, pos in enumerate([100.0, 300.0, 550.0, 200.0]):
        v = spawn_vehicle(i, 0.0, CATEGORIES[i % 4], 1, c)
        v.position = pos
        v.covered_since = 0.0
        vs.append(v)
    vs[3].retired = True
    vs.append(spawn_vehicle(9, 0.0, VO, 1, c))   # never covered
    total, per = active_counts(vs, c)
    assert total == 2
    assert per[CATEGORIES[0]] == 1 and per[CATEGORIES[1]] == 1
    assert per[CATEGORIES[2]] == 0 and per[CATEGORIES[3]] == 0
