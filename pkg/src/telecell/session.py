"""Assembled teleoperation session: the wiring `run_session` executes.

Per tick, in fixed order: read sensors -> channels advance -> controllers
compute -> plants integrate -> telemetry append. The recorded snapshot
holds start-of-tick states together with the commands computed from them,
so observers recomputed from the record match the live ones exactly.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from .admittance import AdmittanceParams, admittance_accel
from .bilateral import (BilateralControllerState, BilateralGains, BilateralMode,
                        friction_feedforward)
from .admittance import reshape_inertia
from .channel import Channel, ChannelConfig, derive_channel_seeds
from .config import CHANNEL_DIRECTIONS, normalize_config
from .core import (AxisState, ConfigError, SimConfig, SimulationFault, Tick,
                   integrate_step, require_finite, run_session)
from .hand import FingerChannel, GraspObject, estimate_force, glove_render, hand_servo
from .plants import (ObjectCoupling, OperatorModel, RigidAxisPlant, ScriptedTrajectory,
                     TrajectorySegment, WallContact, contact_force, coupling_forces,
                     operator_force)


def _trajectory_from_json(segments, dof: int) -> ScriptedTrajectory:
    out = []
    for seg in segments:
        out.append(TrajectorySegment(
            kind=seg["kind"],
            t0=float(seg.get("t0", 0.0)),
            t1=float(seg.get("t1", math.inf)),
            start=np.asarray(seg["start"], dtype=float) if "start" in seg else None,
            end=np.asarray(seg["end"], dtype=float) if "end" in seg else None,
            center=np.asarray(seg["center"], dtype=float) if "center" in seg else None,
            amplitude=np.asarray(seg["amplitude"], dtype=float) if "amplitude" in seg else None,
            period=float(seg.get("period", 1.0)),
        ))
    if not out:
        out.append(TrajectorySegment(kind="hold", t0=0.0, start=np.zeros(dof)))
    return ScriptedTrajectory(out)


class ArmPair:
    """One master/slave pair with its bilateral controller and four channels."""

    def __init__(self, cfg: dict, sim: SimConfig, arm_index: int):
        dof = sim.dof
        self.name = cfg["name"]
        m = cfg["master"]
        self.master = RigidAxisPlant(m["mass"], m["viscous_friction"], m["coulomb_friction"],
                                     AxisState.of(m["x0"], [0.0] * dof))
        self.slave_state = AxisState.of(cfg["slave"]["x0"], [0.0] * dof)
        self.virtual_mass = float(cfg["admittance"]["M"])
        if self.virtual_mass <= 0:
            raise ConfigError(f"arms.{arm_index}.admittance.M must be > 0")

        b = cfg["bilateral"]
        gains = BilateralGains(b["c1_kp"], b["c1_kd"], b["c2_scale"], b["c3_scale"],
                               b["c4_kp"], b["c4_kd"], b["local_damping_m"],
                               b["local_damping_s"])
        mode = BilateralMode(b["mode"])
        self.controller = BilateralControllerState(gains, mode, dof=dof)
        self.schedule = [(int(t), BilateralMode(mname)) for t, mname in b["schedule"]]

        op = cfg["operator"]
        self.operator = OperatorModel(op["kind"], op["k_h"], op["b_h"],
                                      _trajectory_from_json(op["script"], dof))
        self._input_target = None   # live master_input override
        self._pending_mode = None   # live set_mode, applied at the controller stage
        self._last_f_h = np.zeros(dof)

        seeds = derive_channel_seeds(sim.seed, arm_index)
        self.channels = {}
        for direction in CHANNEL_DIRECTIONS:
            ch_cfg = cfg["channels"][direction]
            zero = (np.zeros(dof), np.zeros(dof)) if direction.endswith("motion") \
                else np.zeros(dof)
            self.channels[direction] = Channel(
                ChannelConfig(int(ch_cfg["delay_steps"]), int(ch_cfg["jitter_steps_max"]),
                              float(ch_cfg["drop_probability"]), seeds[direction]),
                zero)

        self.friction_comp = bool(cfg["friction_comp"])
        rs = cfg["inertia_reshape"]
        self.reshape_enabled = bool(rs["enabled"])
        self.reshape_mass = float(rs["desired_mass"])
        self.reshape_b_fc = float(rs["b_fc"])
        if self.reshape_enabled and not (0 < self.reshape_mass <= self.master.mass):
            raise ConfigError(
                f"arms.{arm_index}.inertia_reshape.desired_mass must be in "
                f"(0, {self.master.mass}]")
        self.energy = 0.0   # passivity-observer accumulator

    @property
    def scripted(self) -> bool:
        return self.operator.kind == "scripted" and self._input_target is None


class HandLoop:
    """Per-finger glove->hand->glove loop sharing the channel contract."""

    def __init__(self, cfg: dict, sim: SimConfig):
        self.fingers = [FingerChannel(
            torque_constant=f["torque_constant"], servo_kp=f["servo_kp"],
            servo_kd=f["servo_kd"], finger_inertia=f["finger_inertia"],
            glove_inertia=f["glove_inertia"]) for f in cfg["fingers"]]
        self.operator_gains = [(f["operator_kp"], f["operator_kd"]) for f in cfg["fingers"]]
        self.object = GraspObject(cfg["object"]["surface_angle"], cfg["object"]["stiffness"])
        self.render_scale = float(cfg["render_scale"])
        self.cap = float(cfg["cap"])
        self.script = _trajectory_from_json(cfg["script"], len(self.fingers))
        ch = cfg["channels"]
        ch_cfg = ChannelConfig(int(ch["delay_steps"]), int(ch["jitter_steps_max"]),
                               float(ch["drop_probability"]), 0)
        n = len(self.fingers)
        self.g2h = [Channel(dataclasses.replace(ch_cfg, seed=1000 + i), 0.0) for i in range(n)]
        self.h2g = [Channel(dataclasses.replace(ch_cfg, seed=2000 + i), 0.0) for i in range(n)]


class TeleopSession:
    """Wiring object consumed by `core.run_session`."""

    def __init__(self, config: dict, inputs=None):
        self.config = normalize_config(config)
        self.sim = SimConfig(**self.config["sim"])
        self.arms = [ArmPair(arm_cfg, self.sim, i)
                     for i, arm_cfg in enumerate(self.config["arms"])]
        env = self.config["environment"]
        self.objects = {}
        for obj in env["objects"]:
            self.objects[obj["name"]] = RigidAxisPlant(
                obj["mass"], obj["viscous_friction"], obj["coulomb_friction"],
                AxisState.of(obj["x0"], [0.0] * self.sim.dof))
        self.walls = [(WallContact(w["position"], w["stiffness"], w["damping"],
                                   w["axis"], w["side"]), list(w["applies_to"]))
                      for w in env["walls"]]
        self.couplings = []
        for c in env["couplings"]:
            cpl = ObjectCoupling(c["body_a"], c["body_b"], c["rest_length"],
                                 c["stiffness"], c["damping"])
            self.couplings.append({"coupling": cpl, "handoff": c.get("handoff")})
        self.hand = HandLoop(self.config["hand"], self.sim) if self.config["hand"] else None
        self._inputs_by_tick = {}
        for msg in inputs or []:
            self._inputs_by_tick.setdefault(int(msg["tick"]), []).append(msg)
        self.input_log = list(inputs or [])

    # -- wiring protocol -----------------------------------------------------

    def header(self) -> dict:
        return {"config": self.config}

    def validate(self):
        names = {f"{arm.name}.master" for arm in self.arms}
        names |= {f"{arm.name}.slave" for arm in self.arms}
        names |= set(self.objects)
        for wall, applies_to in self.walls:
            if not applies_to:
                raise ConfigError("environment.walls: applies_to port is unbound")
            for body in applies_to:
                if body not in names:
                    raise ConfigError(f"environment.walls: unknown body {body!r}")
        for entry in self.couplings:
            cpl = entry["coupling"]
            for body in (cpl.body_a, cpl.body_b):
                if body is None:
                    raise ConfigError("environment.couplings: endpoint port is unbound")
                if body not in names:
                    raise ConfigError(f"environment.couplings: unknown body {body!r}")
            handoff = entry["handoff"]
            if handoff:
                for key in ("new_body_a", "new_body_b"):
                    if key in handoff and handoff[key] not in names:
                        raise ConfigError(
                            f"environment.couplings.handoff: unknown body {handoff[key]!r}")
        success = self.config.get("success")
        if success:
            self._success_bodies(success, names)

    def _success_bodies(self, success, names):
        bodies = [success.get("body")]
        for phase in success.get("phases", []) or []:
            if "body" in phase:
                bodies.append(phase["body"])
        for body in bodies:
            if body is None:
                raise ConfigError("success.body port is unbound")
            if body not in names:
                raise ConfigError(f"success: unknown body {body!r}")

    # -- body helpers ----------------------------------------------------------

    def body_state(self, body: str) -> AxisState:
        if "." in body:
            arm_name, part = body.split(".", 1)
            for arm in self.arms:
                if arm.name == arm_name:
                    return arm.master.state if part == "master" else arm.slave_state
        if body in self.objects:
            return self.objects[body].state
        raise ConfigError(f"unknown body {body!r}")

    # -- the tick ---------------------------------------------------------------

    def step(self, tick: Tick) -> dict:
        k, dt, t = tick.index, tick.dt, tick.time
        self._apply_inputs(k)

        # stage 1: sensors (start-of-tick snapshot)
        coupling_snap = []
        env_forces = {}   # body -> accumulated external force on it

        def add_force(body, f):
            env_forces[body] = env_forces.get(body, 0.0) + f

        for entry in self.couplings:
            handoff = entry["handoff"]
            if handoff and int(handoff["tick"]) == k:
                cpl = entry["coupling"]
                if "new_body_a" in handoff:
                    cpl.body_a = handoff["new_body_a"]
                if "new_body_b" in handoff:
                    cpl.body_b = handoff["new_body_b"]
                if handoff.get("recapture_rest_length", True):
                    cpl.rest_length = float(np.linalg.norm(
                        self.body_state(cpl.body_b).x - self.body_state(cpl.body_a).x))
            cpl = entry["coupling"]
            f_a, f_b = coupling_forces(cpl, self.body_state(cpl.body_a),
                                       self.body_state(cpl.body_b))
            add_force(cpl.body_a, f_a)
            add_force(cpl.body_b, f_b)
            coupling_snap.append({"f_a": f_a.tolist(), "f_b": f_b.tolist()})
        for wall, applies_to in self.walls:
            for body in applies_to:
                add_force(body, contact_force(wall, self.body_state(body)))

        frames = []
        for arm in self.arms:
            f_env = np.asarray(env_forces.get(f"{arm.name}.slave", np.zeros(self.sim.dof)),
                               dtype=float)
            # f_e is the measured interaction force: what the slave exerts on
            # the environment (reaction of the contact/coupling force on it)
            f_e = -f_env
            if arm.scripted:
                f_h = arm._last_f_h
            else:
                f_h = operator_force(arm.operator, arm.master.state, t)
            frames.append({"f_e": f_e, "f_env": f_env, "f_h": f_h,
                           "x_m": arm.master.state.x.copy(), "v_m": arm.master.state.v.copy(),
                           "x_s": arm.slave_state.x.copy(), "v_s": arm.slave_state.v.copy()})

        # stage 2: channels advance (one push-pop per channel per tick)
        for arm, frame in zip(self.arms, frames):
            ch = arm.channels
            mx, mv = ch["m2s_motion"].push_pop(k, (frame["x_m"], frame["v_m"]))
            frame["master_rx"] = AxisState(mx, mv)
            frame["f_h_rx"] = ch["m2s_force"].push_pop(k, frame["f_h"])
            sx, sv = ch["s2m_motion"].push_pop(k, (frame["x_s"], frame["v_s"]))
            frame["slave_rx"] = AxisState(sx, sv)
            frame["f_e_rx"] = ch["s2m_force"].push_pop(k, frame["f_e"])
            frame["ages"] = {d: ch[d].age(k) for d in CHANNEL_DIRECTIONS}
        hand_frame = self._hand_channels(k) if self.hand else None

        # stage 3: controllers
        for arm, frame in zip(self.arms, frames):
            ctrl = arm.controller
            while arm.schedule and arm.schedule[0][0] == k:
                _, new_mode = arm.schedule.pop(0)
                ctrl.switch_mode(new_mode, arm.master.state, frame["slave_rx"])
            if arm._pending_mode is not None:
                ctrl.switch_mode(arm._pending_mode, arm.master.state, frame["slave_rx"])
                arm._pending_mode = None
            frame["mode"] = ctrl.mode
            frame["f_m_cmd"] = ctrl.master_force(frame["slave_rx"], frame["f_e_rx"],
                                                 arm.master.state)
            frame["f_s_cmd"] = ctrl.slave_force(frame["master_rx"], frame["f_h_rx"],
                                                arm.slave_state)
            ctrl.budget.accumulate(frame["f_h"], frame["v_m"], dt)
            if arm.friction_comp:
                frame["f_comp"] = friction_feedforward(
                    arm.master.viscous_friction, arm.master.coulomb_friction,
                    arm.master.state, ctrl.budget, dt)
            else:
                frame["f_comp"] = np.zeros(self.sim.dof)
            if arm.reshape_enabled:
                frame["f_reshape"] = reshape_inertia(
                    arm.master.mass, arm.reshape_mass, frame["f_h"],
                    arm.master.state, arm.reshape_b_fc)
            else:
                frame["f_reshape"] = np.zeros(self.sim.dof)
            arm.energy += dt * (float(np.dot(frame["f_m_cmd"], frame["v_m"]))
                                + float(np.dot(frame["f_s_cmd"], frame["v_s"])))
            ctrl.advance(dt)
        if self.hand:
            self._hand_controllers(hand_frame)

        # stage 4: plants integrate
        for arm, frame in zip(self.arms, frames):
            self._integrate_arm(arm, frame, tick)
        for name, plant in self.objects.items():
            f = np.asarray(env_forces.get(name, np.zeros(self.sim.dof)), dtype=float)
            accel = (f + plant.friction_force()) / plant.mass
            plant.state = integrate_step(plant.state, accel, dt,
                                         module=f"object:{name}", tick=k)
        if self.hand:
            self._integrate_hand(hand_frame, tick)

        # stage 5: telemetry record
        return self._make_record(tick, frames, coupling_snap, hand_frame)

    # -- stage helpers ---------------------------------------------------------

    def inject_input(self, msg: dict):
        """Queue a live input message for its tick; it becomes part of the
        recorded series so the session replays deterministically."""
        self._inputs_by_tick.setdefault(int(msg["tick"]), []).append(msg)
        self.input_log.append(msg)

    def _apply_inputs(self, k: int):
        for msg in self._inputs_by_tick.get(k, ()):
            mtype = msg["type"]
            payload = msg.get("payload", {})
            arm = self.arms[int(payload.get("arm", 0))]
            if mtype == "master_input":
                arm._input_target = np.asarray(payload["target"], dtype=float)
                arm.operator = OperatorModel(
                    "impedance", arm.operator.k_h, arm.operator.b_h,
                    ScriptedTrajectory([TrajectorySegment(
                        kind="hold", t0=0.0, start=arm._input_target)]))
            elif mtype == "set_mode":
                arm._pending_mode = BilateralMode(payload["mode"])
            elif mtype == "set_channel":
                direction = payload.get("direction")
                dirs = [direction] if direction else list(CHANNEL_DIRECTIONS)
                for d in dirs:
                    ch = arm.channels[d]
                    ch.config = dataclasses.replace(
                        ch.config,
                        delay_steps=int(payload.get("delay_steps", ch.config.delay_steps)),
                        jitter_steps_max=int(payload.get("jitter_steps_max",
                                                         ch.config.jitter_steps_max)),
                        drop_probability=float(payload.get("drop_probability",
                                                           ch.config.drop_probability)))
            else:
                raise ConfigError(f"unknown input message type {mtype!r}")

    def _integrate_arm(self, arm: ArmPair, frame: dict, tick: Tick):
        k, dt = tick.index, tick.dt
        total_cmd = frame["f_m_cmd"] + frame["f_comp"] + frame["f_reshape"]
        f_fric = arm.master.friction_force()
        if arm.scripted:
            traj = arm.operator.trajectory
            _, v_now = traj.sample(tick.time)
            x_next, v_next = traj.sample((k + 1) * dt)
            a_script = (v_next - v_now) / dt
            f_h = arm.master.mass * a_script - (total_cmd + f_fric)
            arm._last_f_h = require_finite(f_h, f"{arm.name}.master", k)
            arm.master.state = AxisState(x_next.copy(), v_next.copy())
            frame["f_h"] = f_h   # constraint force the script exerted this tick
        else:
            accel = (frame["f_h"] + total_cmd + f_fric) / arm.master.mass
            arm.master.state = integrate_step(arm.master.state, accel, dt,
                                              module=f"{arm.name}.master", tick=k)
        # slave: virtual admittance with K = c1_kp about the received master
        # position and B = c1_kd (+ local damping); environment forces enter
        # the force input
        g = arm.controller.gains
        params = AdmittanceParams.per_axis(
            arm.virtual_mass, g.c1_kd + g.local_damping_s, g.c1_kp, self.sim.dof,
            x_ref=frame["master_rx"].x)
        if frame["mode"] is BilateralMode.FOUR_CHANNEL:
            c3_share = g.c3_scale * frame["f_h_rx"]
        else:
            c3_share = np.zeros(self.sim.dof)
        f_ext = g.c1_kd * frame["master_rx"].v + frame["f_env"] + c3_share
        accel = admittance_accel(params, arm.slave_state, f_ext)
        arm.slave_state = integrate_step(arm.slave_state, accel, dt,
                                         module=f"{arm.name}.slave", tick=k)

    def _hand_channels(self, k: int) -> dict:
        hand = self.hand
        frame = {"glove_rx": [], "tau_rx": [],
                 "glove_angle": [f.glove_angle for f in hand.fingers],
                 "hand_angle": [f.hand_angle for f in hand.fingers]}
        for i, finger in enumerate(hand.fingers):
            frame["glove_rx"].append(hand.g2h[i].push_pop(k, finger.glove_angle))
            frame["tau_rx"].append(hand.h2g[i].push_pop(k, estimate_force(finger)))
        return frame

    def _hand_controllers(self, frame: dict):
        hand = self.hand
        frame["torque"], frame["current"] = [], []
        frame["tau_est"], frame["rendered"], frame["saturated"] = [], [], []
        for i, finger in enumerate(hand.fingers):
            torque, current = hand_servo(finger, frame["glove_rx"][i])
            frame["torque"].append(torque)
            frame["current"].append(current)
            frame["tau_est"].append(estimate_force(finger))
            rendered, saturated = glove_render(frame["tau_rx"][i], hand.render_scale,
                                               hand.cap)
            frame["rendered"].append(rendered)
            frame["saturated"].append(saturated)

    def _integrate_hand(self, frame: dict, tick: Tick):
        hand = self.hand
        k, dt, t = tick.index, tick.dt, tick.time
        targets, _ = hand.script.sample(t)
        for i, finger in enumerate(hand.fingers):
            tau_obj = hand.object.torque(finger.hand_angle)
            alpha = (frame["torque"][i] + tau_obj) / finger.finger_inertia
            state = integrate_step(AxisState.of([finger.hand_angle], [finger.hand_vel]),
                                   [alpha], dt, module=f"finger{i}.hand", tick=k)
            finger.hand_angle, finger.hand_vel = float(state.x[0]), float(state.v[0])
            kp, kd = hand.operator_gains[i]
            # operator squeezes toward the scripted target; rendered feedback
            # opposes closure
            tau_glove = (kp * (targets[i] - finger.glove_angle)
                         - kd * finger.glove_vel - frame["rendered"][i])
            alpha_g = tau_glove / finger.glove_inertia
            state = integrate_step(AxisState.of([finger.glove_angle], [finger.glove_vel]),
                                   [alpha_g], dt, module=f"finger{i}.glove", tick=k)
            finger.glove_angle, finger.glove_vel = float(state.x[0]), float(state.v[0])

    def _make_record(self, tick: Tick, frames, coupling_snap, hand_frame) -> dict:
        record = {"tick": tick.index, "time": tick.time, "arms": []}
        for arm, frame in zip(self.arms, frames):
            budget = arm.controller.budget
            record["arms"].append({
                "name": arm.name,
                "mode": frame["mode"].value,
                "x_m": frame["x_m"].tolist(), "v_m": frame["v_m"].tolist(),
                "x_s": frame["x_s"].tolist(), "v_s": frame["v_s"].tolist(),
                "f_h": np.asarray(frame["f_h"], dtype=float).tolist(),
                "f_e": frame["f_e"].tolist(),
                "f_m_cmd": frame["f_m_cmd"].tolist(),
                "f_s_cmd": frame["f_s_cmd"].tolist(),
                "channel_ages": frame["ages"],
                "energy": arm.energy,
                "budget": {"accumulated": budget.accumulated_interaction_energy,
                           "spent": budget.spent_compensation_energy},
            })
        if self.objects:
            record["objects"] = [{"name": name, "x": plant.state.x.tolist(),
                                  "v": plant.state.v.tolist()}
                                 for name, plant in self.objects.items()]
        if coupling_snap:
            record["couplings"] = coupling_snap
        if hand_frame is not None:
            record["fingers"] = [{
                "glove_angle": hand_frame["glove_angle"][i],
                "hand_angle": hand_frame["hand_angle"][i],
                "current": hand_frame["current"][i],
                "tau_est": hand_frame["tau_est"][i],
                "rendered": hand_frame["rendered"][i],
                "saturated": bool(hand_frame["saturated"][i]),
            } for i in range(len(self.hand.fingers))]
        return record


def build_session(config: dict, inputs=None) -> TeleopSession:
    return TeleopSession(config, inputs=inputs)


def run_scenario(config: dict, inputs=None):
    """Build and execute a scenario; returns the telemetry series."""
    session = build_session(config, inputs=inputs)
    series = run_session(session.sim, session)
    series.inputs = list(inputs or [])
    return series
