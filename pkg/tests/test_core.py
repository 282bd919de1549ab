"""Config and parameter-table checks."""

import json

import pytest

from edca_sim.core import (CATEGORIES, DCF_PARAMS, MODES, MODE_LABELS,
                           STANDARD_EDCA, AC_OF_CATEGORY, ConfigError, EdcaParams,
                           ServiceCategory, SimConfig, config_from_dict,
                           config_to_dict, default_profiles, load_config,
                           profile_of, require_valid, save_config, scaled_config,
                           standard_params, validate_config)

VO = ServiceCategory.VOICE
VI = ServiceCategory.VIDEO
HD = ServiceCategory.HD_MAP
BE = ServiceCategory.BEST_EFFORT


def test_category_shorts_round_trip():
    for cat in CATEGORIES:
        assert ServiceCategory.from_short(cat.short) is cat
    with pytest.raises(ValueError):
        ServiceCategory.from_short("XX")


def test_categories_order_fixed():
    assert [c.short for c in CATEGORIES] == ["VO", "VI", "HD", "BE"]


def test_standard_rows():
    assert STANDARD_EDCA["VO"] == EdcaParams(3, 7, 2)
    assert STANDARD_EDCA["VI"] == EdcaParams(7, 15, 3)
    assert STANDARD_EDCA["BE"] == EdcaParams(15, 1023, 6)
    assert STANDARD_EDCA["BK"] == EdcaParams(15, 1023, 9)
    assert DCF_PARAMS == EdcaParams(15, 1023, 2)


def test_category_to_access_class():
    # both the map stream and plain data ride the best-effort row
    assert AC_OF_CATEGORY[VO] == "VO"
    assert AC_OF_CATEGORY[VI] == "VI"
    assert AC_OF_CATEGORY[HD] == "BE"
    assert AC_OF_CATEGORY[BE] == "BE"
    assert standard_params(HD) == standard_params(BE) == EdcaParams(15, 1023, 6)


def test_edca_params_validation():
    with pytest.raises(ValueError):
        EdcaParams(0, 7, 2)
    with pytest.raises(ValueError):
        EdcaParams(15, 7, 2)
    with pytest.raises(ValueError):
        EdcaParams(15, 1024, 2)
    with pytest.raises(ValueError):
        EdcaParams(3, 7, 0)


def test_default_profiles_values():
    p = default_profiles()
    assert p[VO].app_rate == 100e3
    assert p[VO].packet_size == 100
    assert p[VO].rate_threshold == 0.1e6
    assert p[VO].latency_threshold == 0.15
    assert p[VO].wt_max == 0.92
    assert (p[VO].cw_seed_min, p[VO].cw_seed_max) == (2, 10)
    assert (p[VO].ifsn_min, p[VO].ifsn_max) == (1, 10)

    assert p[VI].app_rate == 5e6
    assert p[VI].packet_size == 1200
    assert p[VI].rate_threshold == 1.25e6
    assert p[VI].latency_threshold == 0.1
    assert p[VI].wt_max == 2.0
    assert (p[VI].cw_seed_min, p[VI].cw_seed_max) == (3, 17)
    assert (p[VI].ifsn_min, p[VI].ifsn_max) == (1, 20)

    assert p[HD].app_rate == 4e6
    assert p[HD].rate_threshold == 1.25e6
    assert p[HD].latency_threshold == 0.1

    assert p[BE].app_rate == 28e6
    assert p[BE].rate_threshold == 1.0e6
    assert p[BE].latency_threshold == 1.0
    assert p[BE].wt_max == 8.0
    assert (p[BE].cw_seed_min, p[BE].cw_seed_max) == (7, 23)
    assert (p[BE].ifsn_min, p[BE].ifsn_max) == (1, 40)

    # reward normalizers tie to the profile's own numbers
    for cat in CATEGORIES:
        assert p[cat].rate_max == p[cat].app_rate
        assert p[cat].latency_max == p[cat].latency_threshold


def test_traffic_scale_scales_rates_only():
    base = default_profiles()
    scaled = default_profiles(0.25)
    for cat in CATEGORIES:
        assert scaled[cat].app_rate == base[cat].app_rate * 0.25
        assert scaled[cat].rate_threshold == base[cat].rate_threshold * 0.25
        assert scaled[cat].rate_max == base[cat].rate_max * 0.25
        assert scaled[cat].latency_threshold == base[cat].latency_threshold
        assert scaled[cat].latency_max == base[cat].latency_max
        assert scaled[cat].wt_max == base[cat].wt_max
        assert scaled[cat].packet_size == base[cat].packet_size


def test_mode_labels_complete():
    assert set(MODE_LABELS) == set(MODES)
    assert MODE_LABELS["nonqos"] == "Non-QoS"
    assert MODE_LABELS["qos"] == "QoS"
    assert MODE_LABELS["cwfixed8"] == "CWminFixed"
    assert MODE_LABELS["cwmin3"] == "CWmin"
    assert MODE_LABELS["cwminmax"] == "CWminmax"
    assert MODE_LABELS["two-agent"] == "CWminmaxIFS"
    assert MODE_LABELS["three-agent"] == "CWminmaxIFS_STime"


def test_validate_collects_all_errors():
    cfg = SimConfig(mode="nope", episodes=0, episode_duration=-1.0,
                    arrival_interval=0.0)
    errs = validate_config(cfg)
    assert len(errs) >= 4
    joined = "\n".join(errs)
    for word in ("mode", "episodes", "duration", "arrival"):
        assert word in joined
    with pytest.raises(ConfigError):
        require_valid(cfg)


def test_validate_accepts_default():
    assert validate_config(SimConfig()) == []
    cfg = require_valid(SimConfig())
    assert isinstance(cfg, SimConfig)


def test_coverage_must_fit_road():
    cfg = SimConfig(rsu_position=700, road_length=600)
    assert any("rsu" in e for e in validate_config(cfg))


def test_config_json_round_trip(tmp_path):
    cfg = scaled_config(0.5, mode="two-agent", rng_seed=9, episodes=3,
                        episode_duration=30.0, coverage_radius=150)
    d = config_to_dict(cfg)
    back = config_from_dict(json.loads(json.dumps(d)))
    assert back == cfg

    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    assert load_config(path) == cfg


def test_config_from_dict_rejects_unknown_keys():
    d = config_to_dict(SimConfig())
    d["bogus"] = 1
    with pytest.raises(ConfigError):
        config_from_dict(d)


def test_profile_of_uses_config_profiles():
    cfg = scaled_config(0.125)
    assert profile_of(VO, cfg) is cfg.profiles[VO]
    assert profile_of(BE, cfg).app_rate == 28e6 * 0.125
