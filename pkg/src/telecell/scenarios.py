"""Task scenario runners and the parameter-sweep engine.

The shipped scenario JSON files reproduce the demonstration narrative at
desk scale: task 1 is a single-arm transit + floor contact + lift, task 2
squeezes an object between two slaves, task 4 is the fail/regrasp/succeed
story told with a gated (anisotropic-tolerance) goal region. Other tasks
are recombinations of these primitives, shipped as example configs only.
"""
from __future__ import annotations

import copy
import csv
import itertools
import json
import os

from .config import load_config, normalize_config, parse_set_value, set_override
from .core import ConfigError
from .session import run_scenario
from .telemetry import MetricsReport, TelemetrySeries, compute_metrics

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "scenarios")


def scenario_path(name: str) -> str:
    path = os.path.join(SCENARIO_DIR, f"{name}.json")
    if not os.path.exists(path):
        raise ConfigError(f"no builtin scenario named {name!r}")
    return path


def load_scenario(name: str) -> dict:
    with open(scenario_path(name)) as fh:
        return json.load(fh)


def _apply_overrides(raw: dict, overrides) -> dict:
    raw = copy.deepcopy(raw)
    if not overrides:
        return raw
    items = overrides.items() if isinstance(overrides, dict) else overrides
    for path, value in items:
        set_override(raw, path, value)
    return raw


def run_named_task(name: str, overrides=None, return_series: bool = False):
    raw = _apply_overrides(load_scenario(name), overrides)
    series = run_scenario(raw)
    report = compute_metrics(series)
    if return_series:
        return report, series
    return report


def run_task1(overrides=None, return_series: bool = False):
    """Single arm: free transit, floor contact, lift, transit to goal."""
    return run_named_task("task1", overrides, return_series)


def run_task2(overrides=None, return_series: bool = False):
    """Two arms squeezing one object; reports the internal coupling force."""
    return run_named_task("task2", overrides, return_series)


def run_task4(overrides=None, return_series: bool = False):
    """Fail from the blocked side, hand the object off, succeed through the
    corridor; the report carries both phases."""
    return run_named_task("task4", overrides, return_series)


# --- parameter sweeps --------------------------------------------------------

class SweepSpec:
    """Cartesian sweep over config paths applied to one base scenario."""

    def __init__(self, base: dict, axes, output_dir: str = None):
        self.base = base
        self.axes = list(axes)  # [(path, [values...]), ...]
        self.output_dir = output_dir
        # fail before any run starts: every path must be applicable
        probe = copy.deepcopy(base)
        for path, values in self.axes:
            if not values:
                raise ConfigError(f"sweep axis {path!r} has no values")
            set_override(probe, path, values[0])
        normalize_config(probe)


def run_sweep(spec: SweepSpec):
    """Run every cell of the Cartesian product, one independent kernel per
    cell, in deterministic order; returns [(cell_params, MetricsReport)].

    Cells are independent, so execution order cannot change any result.
    """
    paths = [path for path, _ in spec.axes]
    grids = [values for _, values in spec.axes]
    results = []
    if spec.output_dir:
        os.makedirs(spec.output_dir, exist_ok=True)
    combos = itertools.product(*grids) if grids else [()]
    for i, combo in enumerate(combos):
        raw = copy.deepcopy(spec.base)
        for path, value in zip(paths, combo):
            set_override(raw, path, value)
        series = run_scenario(raw)
        report = compute_metrics(series)
        cell = dict(zip(paths, combo))
        results.append((cell, report))
        if spec.output_dir:
            series.save(os.path.join(spec.output_dir, f"cell_{i:04d}.jsonl"))
    if spec.output_dir:
        write_sweep_csv(os.path.join(spec.output_dir, "summary.csv"), paths, results)
    return results


def write_sweep_csv(path: str, axis_paths, results):
    metric_fields = ["tracking_rms", "steady_force_error", "free_motion_force_rms",
                     "passivity_flag", "max_energy", "task_completion",
                     "completion_time", "internal_force"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(axis_paths) + metric_fields)
        for cell, report in results:
            row = [cell[p] for p in axis_paths]
            row += [getattr(report, f) for f in metric_fields]
            writer.writerow(row)


def parse_axis(text: str):
    """`path=v1,v2,v3` -> (path, [values]); values parsed as JSON literals."""
    if "=" not in text:
        raise ConfigError(f"--axis must look like path=v1,v2,..., got {text!r}")
    path, _, values = text.partition("=")
    return path, [parse_set_value(v) for v in values.split(",")]
