"""Shared helpers: random scenario generation for determinism tests."""
import random

SCENARIO_DIR = None  # resolved lazily via telecell.scenarios


def random_scenario(rng: random.Random) -> dict:
    """A small random-but-valid scenario; exercises channels, operators,
    walls, couplings, and the hand loop in random combinations."""
    dof = rng.choice([1, 2])
    n_arms = rng.choice([1, 2])
    duration = rng.choice([0.3, 0.4, 0.5])
    arms = []
    for i in range(n_arms):
        x0 = [round(rng.uniform(-0.1, 0.1), 3) for _ in range(dof)]
        target = [round(x + rng.uniform(-0.05, 0.05), 3) for x in x0]
        script = [
            {"kind": "hold", "t0": 0.0, "start": x0},
            {"kind": "min_jerk", "t0": 0.05, "t1": duration * 0.8,
             "start": x0, "end": target},
            {"kind": "hold", "t0": duration * 0.8, "start": target},
        ]
        arms.append({
            "name": f"arm{i}",
            "master": {"x0": x0,
                       "viscous_friction": rng.choice([0.0, 1.0]),
                       "coulomb_friction": rng.choice([0.0, 0.2])},
            "slave": {"x0": x0},
            "bilateral": {"mode": rng.choice(["position_force", "four_channel"])},
            "friction_comp": rng.random() < 0.5,
            "channels": {"delay_steps": rng.randrange(0, 5),
                         "jitter_steps_max": rng.randrange(0, 3),
                         "drop_probability": rng.choice([0.0, 0.05, 0.2])},
            "operator": {"kind": rng.choice(["scripted", "impedance"]),
                         "script": script},
        })
    env = {}
    if rng.random() < 0.5:
        env["walls"] = [{"applies_to": [f"{arms[0]['name']}.slave"],
                         "axis": rng.randrange(dof),
                         "position": 0.0, "stiffness": 2000.0, "damping": 20.0,
                         "side": rng.choice([1, -1])}]
    if n_arms == 2 and rng.random() < 0.5:
        env["couplings"] = [{"body_a": "arm0.slave", "body_b": "arm1.slave",
                             "rest_length": 0.05, "stiffness": 200.0,
                             "damping": 10.0}]
    cfg = {
        "sim": {"dt": 0.001, "duration": duration,
                "seed": rng.randrange(2**32), "dof": dof},
        "arms": arms,
        "environment": env,
    }
    if rng.random() < 0.3:
        cfg["hand"] = {
            "finger_count": 2,
            "object": {"surface_angle": 0.2, "stiffness": 5.0},
            "script": [
                {"kind": "hold", "t0": 0.0, "start": [0.0, 0.0]},
                {"kind": "min_jerk", "t0": 0.05, "t1": duration * 0.8,
                 "start": [0.0, 0.0], "end": [0.3, 0.25]},
                {"kind": "hold", "t0": duration * 0.8, "start": [0.3, 0.25]},
            ],
        }
    return cfg
