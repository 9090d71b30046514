import json

import pytest

from telecell.config import (normalize_config, parse_set_value, set_override)
from telecell.core import ConfigError


def test_empty_config_gets_all_defaults():
    cfg = normalize_config({})
    assert cfg["sim"]["dt"] == 0.001
    assert len(cfg["arms"]) == 1
    arm = cfg["arms"][0]
    assert arm["bilateral"]["c1_kp"] == 400.0
    assert set(arm["channels"]) == {"m2s_motion", "m2s_force",
                                    "s2m_motion", "s2m_force"}
    assert cfg["environment"] == {"walls": [], "couplings": [], "objects": []}
    assert cfg["hand"] is None


def test_normalize_is_idempotent_bytewise():
    raw = {"sim": {"dof": 2}, "arms": [{"name": "left",
                                        "channels": {"delay_steps": 3}}]}
    once = normalize_config(raw)
    twice = normalize_config(once)
    assert json.dumps(once, sort_keys=True) == json.dumps(twice, sort_keys=True)


def test_unknown_keys_rejected_everywhere():
    with pytest.raises(ConfigError):
        normalize_config({"simulation": {}})
    with pytest.raises(ConfigError):
        normalize_config({"sim": {"timestep": 0.01}})
    with pytest.raises(ConfigError):
        normalize_config({"arms": [{"bilateral": {"c5_kp": 1.0}}]})
    with pytest.raises(ConfigError):
        normalize_config({"environment": {"wall": []}})


def test_error_messages_name_the_path():
    with pytest.raises(ConfigError, match="arms.0.bilateral"):
        normalize_config({"arms": [{"bilateral": {"bogus": 1}}]})


def test_schedule_must_be_strictly_increasing():
    ok = {"arms": [{"bilateral": {"schedule": [[10, "four_channel"],
                                               [20, "position_force"]]}}]}
    normalize_config(ok)
    with pytest.raises(ConfigError):
        normalize_config({"arms": [{"bilateral": {
            "schedule": [[20, "four_channel"], [20, "position_force"]]}}]})
    with pytest.raises(ConfigError):
        normalize_config({"arms": [{"bilateral": {"schedule": [[5, "turbo"]]}}]})


def test_per_direction_channel_overrides():
    cfg = normalize_config({"arms": [{"channels": {
        "delay_steps": 2, "s2m_force": {"delay_steps": 9}}}]})
    ch = cfg["arms"][0]["channels"]
    assert ch["m2s_motion"]["delay_steps"] == 2
    assert ch["s2m_force"]["delay_steps"] == 9


def test_set_override_descends_dicts_and_lists():
    raw = {"environment": {"walls": [{"stiffness": 1.0}]}}
    set_override(raw, "environment.walls.0.stiffness", 2.0)
    assert raw["environment"]["walls"][0]["stiffness"] == 2.0
    with pytest.raises(ConfigError):
        set_override(raw, "environment.walls.5.stiffness", 2.0)
    with pytest.raises(ConfigError):
        set_override(raw, "environment.walls.first.stiffness", 2.0)


def test_set_override_arm_shorthand_applies_to_every_arm():
    raw = {"arms": [{}, {}]}
    set_override(raw, "channels.delay_steps", 7)
    cfg = normalize_config(raw)
    for arm in cfg["arms"]:
        assert arm["channels"]["m2s_motion"]["delay_steps"] == 7


def test_parse_set_value_json_first_then_string():
    assert parse_set_value("2.5") == 2.5
    assert parse_set_value("true") is True
    assert parse_set_value("[1, 2]") == [1, 2]
    assert parse_set_value("four_channel") == "four_channel"
