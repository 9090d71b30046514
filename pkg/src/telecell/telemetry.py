"""Recording, bit-exact replay, and metric extraction.

Series are serialized as line-delimited JSON: one header line carrying the
full configuration and schema version, then one line per tick (plus input
lines for live sessions). Floats use Python's shortest round-trip repr, so
serialize -> parse -> serialize is byte-identical and replay equality is
meaningful at the byte level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import ConfigError

SCHEMA_VERSION = 1


class OrderingError(RuntimeError):
    """Record tick does not equal the series length (out-of-order append)."""


@dataclass
class TelemetrySeries:
    header: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    inputs: list = field(default_factory=list)   # live-session input messages
    fault: dict = None

    def __len__(self):
        return len(self.records)

    def serialize(self) -> str:
        lines = [json.dumps({"kind": "header", "schema_version": SCHEMA_VERSION,
                             **self.header})]
        inputs_by_tick = {}
        for msg in self.inputs:
            inputs_by_tick.setdefault(msg["tick"], []).append(msg)
        for rec in self.records:
            for msg in inputs_by_tick.get(rec["tick"], ()):
                lines.append(json.dumps({"kind": "input", **msg}))
            lines.append(json.dumps({"kind": "record", **rec}))
        if self.fault is not None:
            lines.append(json.dumps({"kind": "fault", **self.fault}))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "TelemetrySeries":
        series = cls()
        for lineno, line in enumerate(text.splitlines()):
            if not line.strip():
                continue
            obj = json.loads(line)
            kind = obj.pop("kind", None)
            if kind == "header":
                if obj.pop("schema_version", None) != SCHEMA_VERSION:
                    raise ConfigError(f"line {lineno + 1}: unsupported schema version")
                series.header = obj
            elif kind == "record":
                series.records.append(obj)
            elif kind == "input":
                series.inputs.append(obj)
            elif kind == "fault":
                series.fault = obj
            else:
                raise ConfigError(f"line {lineno + 1}: unknown record kind {kind!r}")
        return series

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.serialize())

    @classmethod
    def load(cls, path) -> "TelemetrySeries":
        with open(path) as fh:
            return cls.parse(fh.read())


def record_append(series: TelemetrySeries, record: dict) -> TelemetrySeries:
    """Append one tick record; ticks must arrive gapless and in order."""
    if record["tick"] != len(series.records):
        raise OrderingError(
            f"record tick {record['tick']} != series length {len(series.records)}")
    series.records.append(record)
    return series


def replay(series: TelemetrySeries) -> TelemetrySeries:
    """Re-simulate from the recorded config (+ recorded live inputs); the
    result must be byte-identical to the original after serialization."""
    from .session import build_session
    from .core import run_session, SimConfig

    config = series.header.get("config")
    if config is None:
        raise ConfigError("series header carries no config; cannot replay")
    session = build_session(config, inputs=series.inputs)
    sim = SimConfig(**config["sim"])
    if series.fault is None and len(series.records) < sim.n_ticks:
        # session stopped early (live stop): replay the recorded span only
        sim = SimConfig(sim.dt, len(series.records) * sim.dt, sim.seed, sim.dof)
    out = run_session(sim, session)
    out.inputs = list(series.inputs)
    return out


def first_divergence(a: TelemetrySeries, b: TelemetrySeries):
    """First tick at which two serialized series differ, or None."""
    a_lines = a.serialize().splitlines()
    b_lines = b.serialize().splitlines()
    for i in range(max(len(a_lines), len(b_lines))):
        la = a_lines[i] if i < len(a_lines) else None
        lb = b_lines[i] if i < len(b_lines) else None
        if la != lb:
            for line in (la, lb):
                if line:
                    try:
                        return json.loads(line).get("tick", i)
                    except json.JSONDecodeError:
                        break
            return i
    return None


# --- metrics ----------------------------------------------------------------

STEADY_WINDOW_FRACTION = 0.2
CONTACT_FORCE_EPS = 1e-2  # N; below this a tick counts as free motion


@dataclass
class MetricsReport:
    tracking_rms: float = None
    steady_force_error: float = None
    free_motion_force_rms: float = None
    passivity_flag: bool = False
    max_energy: float = 0.0
    task_completion: bool = False
    completion_time: float = None
    internal_force: float = None
    phases: dict = None
    fault: dict = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _arm_arrays(records, arm):
    get = lambda key: np.array([r["arms"][arm][key] for r in records], dtype=float)
    return get


def compute_metrics(series: TelemetrySeries, arm: int = 0,
                    passivity_threshold: float = None,
                    passivity_window: int = None) -> MetricsReport:
    """Deterministic metric extraction from a recorded series.

    Metrics whose windows are empty (e.g. no contact ticks) are reported as
    absent (None), never as zero.
    """
    from .bilateral import passivity_observer, energy_activity_flag

    if passivity_threshold is None:
        passivity_threshold = _config_lookup(series.header, ["passivity", "threshold"], 10.0)
    if passivity_window is None:
        passivity_window = int(_config_lookup(series.header, ["passivity", "window"], 200))

    report = MetricsReport(fault=series.fault)
    records = series.records
    if not records:
        return report
    get = _arm_arrays(records, arm)
    x_m, x_s = get("x_m"), get("x_s")
    f_m, f_e = get("f_m_cmd"), get("f_e")
    c2 = _config_lookup(series.header, ["arms", arm, "bilateral", "c2_scale"], 1.0)

    n = len(records)
    steady_start = int(np.floor(n * (1.0 - STEADY_WINDOW_FRACTION)))
    # faulted runs carry arbitrarily large values; metrics over them are
    # diagnostic, so arithmetic overflow there is expected, not an error
    with np.errstate(over="ignore", invalid="ignore"):
        err = x_m - x_s
        steady = err[steady_start:]
        if len(steady):
            report.tracking_rms = float(np.sqrt(np.mean(np.sum(steady**2, axis=-1))))

        f_e_norm = np.linalg.norm(f_e, axis=-1)
        contact = f_e_norm > CONTACT_FORCE_EPS
        if np.any(contact):
            reflected = np.linalg.norm(f_m[contact], axis=-1)
            expected = c2 * f_e_norm[contact]
            report.steady_force_error = float(
                np.mean(np.abs(reflected - expected) / expected))
        free = ~contact
        if np.any(free):
            report.free_motion_force_rms = float(
                np.sqrt(np.mean(np.sum(f_m[free]**2, axis=-1))))

    trace, flag = passivity_observer(series, arm=arm, threshold=passivity_threshold,
                                     window=passivity_window)
    report.passivity_flag = flag or series.fault is not None
    report.max_energy = float(np.max(trace)) if len(trace) else 0.0

    _evaluate_success(series, report)
    _internal_force(series, report)
    return report


def _config_lookup(header, path, default=None):
    node = header.get("config", {})
    for key in path:
        try:
            node = node[key]
        except (KeyError, IndexError, TypeError):
            return default
    return node


def _evaluate_success(series: TelemetrySeries, report: MetricsReport):
    success = _config_lookup(series.header, ["success"])
    if not success:
        return
    records = series.records
    dt = _config_lookup(series.header, ["sim", "dt"], 0.001)
    phases = success.get("phases") or [{"name": "task", "start": 0,
                                        "end": len(records), **success}]
    report.phases = {}
    for phase in phases:
        spec = {**success, **phase}
        done, t_done = _dwell_success(records, spec, dt)
        report.phases[phase.get("name", "task")] = {
            "completed": done, "time": t_done}
    last = phases[-1].get("name", "task")
    report.task_completion = report.phases[last]["completed"]
    report.completion_time = report.phases[last]["time"]
    if len(report.phases) == 1:
        report.phases = None if "phases" not in success else report.phases


def _body_position(record, body: str):
    if "." in body:
        arm_name, part = body.split(".", 1)
        for arm_rec in record["arms"]:
            if arm_rec["name"] == arm_name:
                return np.asarray(arm_rec["x_" + ("m" if part == "master" else "s")])
    for obj in record.get("objects", ()):
        if obj["name"] == body:
            return np.asarray(obj["x"])
    raise ConfigError(f"success predicate references unknown body {body!r}")


def _dwell_success(records, spec, dt):
    target = np.asarray(spec["target"], dtype=float)
    tol = np.atleast_1d(np.asarray(spec.get("tolerance", 0.005), dtype=float))
    if tol.size == 1:
        tol = np.full(target.shape, float(tol[0]))
    dwell_ticks = int(round(spec.get("dwell", 0.5) / dt))
    start = int(spec.get("start", 0))
    end = int(spec.get("end", len(records)))
    run = 0
    for rec in records[start:end]:
        pos = _body_position(rec, spec["body"])
        if np.all(np.abs(pos - target) <= tol):
            run += 1
            if run >= dwell_ticks:
                return True, rec["time"]
        else:
            run = 0
    return False, None


def _internal_force(series: TelemetrySeries, report: MetricsReport):
    records = series.records
    if not records or "couplings" not in records[-1]:
        return
    if records[-1]["couplings"]:
        report.internal_force = float(
            np.linalg.norm(records[-1]["couplings"][0]["f_a"]))
