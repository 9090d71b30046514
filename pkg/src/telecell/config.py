"""Scenario configuration: JSON schema, defaults, validation, overrides.

A scenario file is one JSON object; `normalize_config` fills every default
so the dict embedded in a telemetry header is complete and canonical (the
same normalized dict always serializes to the same bytes, which replay
verification depends on).
"""
from __future__ import annotations

import copy
import json

from .core import ConfigError, VALID_DOF

SIM_DEFAULTS = {"dt": 0.001, "duration": 10.0, "seed": 0, "dof": 1}
MASTER_DEFAULTS = {"mass": 2.0, "viscous_friction": 0.0, "coulomb_friction": 0.0}
ADMITTANCE_DEFAULTS = {"M": 5.0, "B": 50.0, "K": 400.0}
BILATERAL_DEFAULTS = {
    "mode": "position_force",
    "c1_kp": 400.0, "c1_kd": 40.0,
    "c2_scale": 1.0, "c3_scale": 1.0,
    "c4_kp": 200.0, "c4_kd": 20.0,
    "local_damping_m": 5.0, "local_damping_s": 5.0,
    "schedule": [],
}
CHANNEL_DEFAULTS = {"delay_steps": 0, "jitter_steps_max": 0, "drop_probability": 0.0}
CHANNEL_DIRECTIONS = ("m2s_motion", "m2s_force", "s2m_motion", "s2m_force")
OPERATOR_DEFAULTS = {"kind": "impedance", "k_h": 100.0, "b_h": 10.0, "script": []}
RESHAPE_DEFAULTS = {"enabled": False, "desired_mass": 1.0, "b_fc": 2.0}
FINGER_DEFAULTS = {"torque_constant": 0.5, "servo_kp": 2.0, "servo_kd": 0.05,
                   "finger_inertia": 0.002, "glove_inertia": 0.002,
                   "operator_kp": 2.0, "operator_kd": 0.05}
HAND_DEFAULTS = {"render_scale": 1.0, "cap": 1.0}
PASSIVITY_DEFAULTS = {"threshold": 10.0, "window": 200}
WALL_DEFAULTS = {"axis": 0, "position": 0.0, "stiffness": 0.0, "damping": 0.0, "side": 1}
COUPLING_DEFAULTS = {"rest_length": 0.0, "stiffness": 0.0, "damping": 0.0}
OBJECT_DEFAULTS = {"mass": 0.5, "viscous_friction": 0.0, "coulomb_friction": 0.0}


def _merge(defaults: dict, given: dict, path: str) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(f"{path}: expected an object, got {type(given).__name__}")
    unknown = set(given) - set(defaults) - {"name", "x0", "script", "phases"} \
        - set(CHANNEL_DIRECTIONS)
    if unknown:
        raise ConfigError(f"{path}: unknown key {sorted(unknown)[0]!r}")
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(given))
    return out


def normalize_config(raw: dict) -> dict:
    """Fill defaults, validate structure, and return the canonical dict."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario config must be a JSON object")
    known = {"sim", "arms", "environment", "success", "passivity", "hand"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")
    cfg = {}
    cfg["sim"] = _merge(SIM_DEFAULTS, raw.get("sim", {}), "sim")
    dof = cfg["sim"]["dof"]
    if dof not in VALID_DOF:
        raise ConfigError(f"sim.dof must be one of {VALID_DOF}, got {dof}")
    zeros = [0.0] * dof

    arms = raw.get("arms", [{}])
    cfg["arms"] = []
    for i, arm in enumerate(arms):
        name = arm.get("name", f"arm{i}")
        master = _merge(MASTER_DEFAULTS, arm.get("master", {}), f"arms.{i}.master")
        master.setdefault("x0", list(zeros))
        slave = {"x0": arm.get("slave", {}).get("x0", list(zeros))}
        bilateral = _merge(BILATERAL_DEFAULTS, arm.get("bilateral", {}),
                           f"arms.{i}.bilateral")
        _validate_schedule(bilateral["schedule"], f"arms.{i}.bilateral.schedule")
        operator = _merge(OPERATOR_DEFAULTS, arm.get("operator", {}),
                          f"arms.{i}.operator")
        channels = _normalize_channels(arm.get("channels", {}), f"arms.{i}.channels")
        cfg["arms"].append({
            "name": name,
            "master": master,
            "slave": slave,
            "admittance": _merge(ADMITTANCE_DEFAULTS, arm.get("admittance", {}),
                                 f"arms.{i}.admittance"),
            "bilateral": bilateral,
            "operator": operator,
            "channels": channels,
            "friction_comp": bool(arm.get("friction_comp", False)),
            "inertia_reshape": _merge(RESHAPE_DEFAULTS, arm.get("inertia_reshape", {}),
                                      f"arms.{i}.inertia_reshape"),
        })

    env = raw.get("environment", {})
    env_unknown = set(env) - {"walls", "couplings", "objects"}
    if env_unknown:
        raise ConfigError(f"unknown environment keys: {sorted(env_unknown)}")
    cfg["environment"] = {
        "walls": [
            {**_merge(WALL_DEFAULTS, {k: v for k, v in w.items() if k != "applies_to"},
                      f"environment.walls.{j}"),
             "applies_to": list(w.get("applies_to", []))}
            for j, w in enumerate(env.get("walls", []))],
        "couplings": [
            {**_merge(COUPLING_DEFAULTS,
                      {k: v for k, v in c.items() if k not in ("body_a", "body_b", "handoff")},
                      f"environment.couplings.{j}"),
             "body_a": c.get("body_a"), "body_b": c.get("body_b"),
             "handoff": c.get("handoff")}
            for j, c in enumerate(env.get("couplings", []))],
        "objects": [
            {**_merge(OBJECT_DEFAULTS, {k: v for k, v in o.items() if k != "name"},
                      f"environment.objects.{j}"),
             "name": o.get("name", f"object{j}"),
             "x0": o.get("x0", list(zeros))}
            for j, o in enumerate(env.get("objects", []))],
    }

    hand = raw.get("hand")
    if hand:
        fingers = hand.get("fingers", [{}] * int(hand.get("finger_count", 2)))
        if len(fingers) > 5:
            raise ConfigError("hand.fingers: at most 5 fingers")
        cfg["hand"] = {
            **_merge(HAND_DEFAULTS, {k: v for k, v in hand.items()
                                     if k in HAND_DEFAULTS}, "hand"),
            "fingers": [_merge(FINGER_DEFAULTS, f, f"hand.fingers.{j}")
                        for j, f in enumerate(fingers)],
            "object": {"surface_angle": hand.get("object", {}).get("surface_angle", 0.2),
                       "stiffness": hand.get("object", {}).get("stiffness", 0.0)},
            "script": hand.get("script", []),
            "channels": _merge(CHANNEL_DEFAULTS, hand.get("channels", {}),
                               "hand.channels"),
        }
    else:
        cfg["hand"] = None

    cfg["success"] = copy.deepcopy(raw.get("success"))
    cfg["passivity"] = _merge(PASSIVITY_DEFAULTS, raw.get("passivity", {}), "passivity")
    return cfg


def _validate_schedule(schedule, path):
    last = -1
    for entry in schedule:
        try:
            tick, mode = int(entry[0]), str(entry[1])
        except (TypeError, ValueError, IndexError):
            raise ConfigError(f"{path}: entries must be [tick, mode]")
        if tick <= last:
            raise ConfigError(f"{path}: ticks must be strictly increasing")
        if mode not in ("position_force", "four_channel"):
            raise ConfigError(f"{path}: unknown mode {mode!r}")
        last = tick


def _normalize_channels(given: dict, path: str) -> dict:
    """Either one shared config or per-direction overrides over a default."""
    per_dir = {}
    base = {k: v for k, v in given.items() if k in CHANNEL_DEFAULTS}
    default = _merge(CHANNEL_DEFAULTS, base, path)
    for direction in CHANNEL_DIRECTIONS:
        override = given.get(direction, {})
        per_dir[direction] = _merge(default, override, f"{path}.{direction}")
    return per_dir


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    return normalize_config(raw)


def set_override(raw: dict, path: str, value):
    """Apply one `--set path=value` override to a raw config dict in place.

    Path segments are dot-separated; integer segments index lists. The value
    is parsed as JSON when possible, else kept as a string.
    """
    keys = path.split(".")
    arm_keys = ("master", "slave", "admittance", "bilateral", "operator", "channels",
                "friction_comp", "inertia_reshape")
    if keys[0] in arm_keys:  # shorthand: apply to every arm
        arms = raw.setdefault("arms", [{}])
        for i in range(len(arms)):
            set_override(raw, f"arms.{i}.{path}", value)
        return raw
    node = raw
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(node, list):
            try:
                idx = int(key)
            except ValueError:
                raise ConfigError(f"--set {path}: {key!r} is not a list index")
            if not (0 <= idx < len(node)):
                raise ConfigError(f"--set {path}: index {idx} out of range")
            if last:
                node[idx] = value
            else:
                node = node[idx]
        elif isinstance(node, dict):
            if last:
                node[key] = value
            else:
                node = node.setdefault(key, {})
        else:
            raise ConfigError(f"--set {path}: cannot descend into {key!r}")
    return raw


def parse_set_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text
