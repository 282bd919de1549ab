"""Utility-signal checks against an independent transcription.

reference_utility below restates the documented formula from scratch and is
written before any comparison with the package code; the tests then hold the
implementation to it exactly.
"""

import math
from random import Random

import pytest
from hypothesis import given, strategies as st

from edca_sim.core import CategoryProfile, ServiceCategory, default_profiles
from edca_sim.mac_edca import PacketRecord
from edca_sim.reward import WindowStats, penalty_bonus, utility, window_stats

VO = ServiceCategory.VOICE
VI = ServiceCategory.VIDEO
BE = ServiceCategory.BEST_EFFORT


def reference_utility(rate, mean_latency, delivered, profile,
                      alpha1, alpha2, a, b, cap):
    """Independent restatement: U = a1*clamp(Rc/Rmax, 0, cap)
    - a2*(Lc/Lmax) + V, V per threshold with strict inequalities,
    empty window scored at Lc = Lmax."""
    latency = mean_latency if delivered > 0 else profile.latency_max
    ratio = rate / profile.rate_max
    ratio = min(max(ratio, 0.0), cap)
    v = 0.0
    if rate > profile.rate_threshold:
        v += a
    elif rate < profile.rate_threshold:
        v -= b
    if latency < profile.latency_threshold:
        v += a
    elif latency > profile.latency_threshold:
        v -= b
    return alpha1 * ratio - alpha2 * latency / profile.latency_max + v


def make_stats(category, rate, mean_latency, delivered, window=1.0):
    bits = int(rate * window)
    return WindowStats(category=category, window=window, delivered=delivered,
                       delivered_bits=bits, rate=rate, mean_latency=mean_latency)


def vi_profile():
    return default_profiles()[VI]


def test_hand_example_good_window():
    # VI profile: Rmax 5e6, Rth 1.25e6, Lth = Lmax = 0.1
    # rate 2.5e6 -> ratio 0.5, above Rth -> +1
    # latency 0.05 -> ratio 0.5, under Lth -> +1
    # U = 0.3*0.5 - 0.7*0.5 + 2 = 1.8
    stats = make_stats(VI, 2.5e6, 0.05, 10)
    assert utility(stats, vi_profile(), 0.3, 0.7, 1.0, 1.0) == pytest.approx(1.8, abs=1e-12)


def test_hand_example_bad_window():
    # rate 0.5e6 -> ratio 0.1, below Rth -> -1
    # latency 0.2 -> ratio 2.0, over Lth -> -1
    # U = 0.3*0.1 - 0.7*2.0 - 2 = -3.37
    stats = make_stats(VI, 0.5e6, 0.2, 4)
    assert utility(stats, vi_profile(), 0.3, 0.7, 1.0, 1.0) == pytest.approx(-3.37, abs=1e-12)


def test_hand_example_rate_cap():
    # rate 10e6 -> raw ratio 2.0 capped at 1.5, above Rth -> +1
    # latency 0.1 sits exactly on Lth -> no V contribution
    # U = 0.3*1.5 - 0.7*1.0 + 1 = 0.75
    stats = make_stats(VI, 10e6, 0.1, 100)
    assert utility(stats, vi_profile(), 0.3, 0.7, 1.0, 1.0) == pytest.approx(0.75, abs=1e-12)


def test_empty_window_sentinel():
    # nothing delivered: Rc = 0 (below Rth -> -1), Lc = Lmax
    # Lmax equals Lth for the default profiles so the latency side adds 0
    # U = 0 - 0.7*1.0 - 1 = -1.7
    stats = make_stats(VI, 0.0, None, 0)
    assert utility(stats, vi_profile(), 0.3, 0.7, 1.0, 1.0) == pytest.approx(-1.7, abs=1e-12)


def test_latency_ratio_unclamped():
    # latency 1.0 on Lmax 0.1 -> ratio 10, the term keeps growing
    stats = make_stats(VI, 2.5e6, 1.0, 1)
    u = utility(stats, vi_profile(), 0.3, 0.7, 1.0, 1.0)
    assert u == pytest.approx(0.3 * 0.5 - 0.7 * 10.0 + 1 - 1, abs=1e-12)


def test_penalty_bonus_strictness():
    p = vi_profile()
    assert penalty_bonus(p.rate_threshold, p.latency_threshold, p, 1.0, 1.0) == 0.0
    assert penalty_bonus(p.rate_threshold + 1, p.latency_threshold, p, 1.0, 1.0) == 1.0
    assert penalty_bonus(p.rate_threshold - 1, p.latency_threshold, p, 1.0, 1.0) == -1.0
    assert penalty_bonus(p.rate_threshold, p.latency_threshold - 1e-9, p, 1.0, 1.0) == 1.0
    assert penalty_bonus(p.rate_threshold, p.latency_threshold + 1e-9, p, 1.0, 1.0) == -1.0
    # asymmetric weights keep their sides
    assert penalty_bonus(p.rate_threshold + 1, p.latency_threshold + 1, p, 2.0, 5.0) == -3.0


@given(
    rate=st.floats(0, 4e7),
    latency=st.floats(1e-6, 5.0),
    delivered=st.integers(0, 500),
    alpha1=st.floats(0.01, 1.0),
    alpha2=st.floats(0.01, 1.0),
    a=st.floats(0, 3.0),
    b=st.floats(0, 3.0),
    cap=st.floats(1.0, 3.0),
)
def test_matches_reference_transcription(rate, latency, delivered, alpha1,
                                         alpha2, a, b, cap):
    profile = default_profiles()[BE]
    stats = make_stats(BE, rate, latency if delivered else None, delivered)
    got = utility(stats, profile, alpha1, alpha2, a, b, cap)
    want = reference_utility(rate, latency, delivered, profile,
                             alpha1, alpha2, a, b, cap)
    assert got == pytest.approx(want, abs=1e-12)
    assert math.isfinite(got)


@given(st.floats(0, 1e8), st.floats(0, 2.0))
def test_reference_on_custom_profile(rate, latency):
    # thresholds decoupled from the normalizers
    profile = CategoryProfile(category=VO, app_rate=1e6, packet_size=200,
                              rate_threshold=3e5, latency_threshold=0.4,
                              rate_max=2e6, latency_max=0.8, wt_max=1.0,
                              cw_seed_min=2, cw_seed_max=10,
                              ifsn_min=1, ifsn_max=10)
    stats = make_stats(VO, rate, latency, 3)
    got = utility(stats, profile, 0.3, 0.7, 1.0, 1.0)
    want = reference_utility(rate, latency, 3, profile, 0.3, 0.7, 1.0, 1.0, 1.5)
    assert got == pytest.approx(want, abs=1e-12)


def test_window_stats_filters_and_averages():
    recs = [
        PacketRecord(1, 0, VI, 1200, 0.0),   # residual, ignored
        PacketRecord(2, 0, VI, 1200, 0.0),
        PacketRecord(3, 0, VO, 100, 0.0),    # other category, ignored
        PacketRecord(4, 0, VI, 1200, 1.0),
    ]
    recs[1].deliver_time = 0.25
    recs[2].deliver_time = 0.10
    recs[3].deliver_time = 1.15
    stats = window_stats(recs, VI, 2.0)
    assert stats.delivered == 2
    assert stats.delivered_bits == 2 * 1200 * 8
    assert stats.rate == pytest.approx(2 * 1200 * 8 / 2.0)
    assert stats.mean_latency == pytest.approx((0.25 + 0.15) / 2)


def test_window_stats_empty():
    stats = window_stats([], VI, 1.0)
    assert stats.delivered == 0
    assert stats.rate == 0.0
    assert stats.mean_latency is None


def test_window_stats_rejects_bad_window():
    with pytest.raises(ValueError):
        window_stats([], VI, 0.0)


@given(st.integers(1, 40), st.integers(0, 3))
def test_window_stats_rate_scales_with_bits(n, seed):
    rng = Random(seed)
    recs = []
    for i in range(n):
        r = PacketRecord(i, 0, BE, 1200, 0.0)
        if rng.random() < 0.7:
            r.deliver_time = rng.uniform(0.001, 0.9)
        recs.append(r)
    stats = window_stats(recs, BE, 1.0)
    assert stats.rate == pytest.approx(stats.delivered * 9600 / 1.0)
