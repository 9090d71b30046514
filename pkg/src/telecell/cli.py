"""Command-line entry points: run, replay, sweep, serve.

Exit codes: 0 success, 2 configuration error, 3 simulation fault
(non-finite state), 4 replay verification mismatch.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .core import ConfigError
from .config import load_config, set_override, parse_set_value
from .scenarios import SweepSpec, run_sweep, parse_axis
from .session import run_scenario
from .telemetry import TelemetrySeries, compute_metrics, first_divergence, replay

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAULT = 3
EXIT_MISMATCH = 4


def _load_raw(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")


def _telemetry_path(given: str, default_name: str) -> str:
    if given:
        return given
    log_dir = os.environ.get("TELECELL_LOG_DIR", ".")
    return os.path.join(log_dir, default_name)


def cmd_run(args) -> int:
    raw = _load_raw(args.config)
    if args.seed is not None:
        set_override(raw, "sim.seed", args.seed)
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set must look like path=value, got {item!r}")
        path, _, value = item.partition("=")
        set_override(raw, path, parse_set_value(value))
    series = run_scenario(raw)
    out = _telemetry_path(args.out, "run.jsonl")
    series.save(out)
    report = compute_metrics(series)
    print(json.dumps(report.to_dict()))
    return EXIT_FAULT if series.fault is not None else EXIT_OK


def cmd_replay(args) -> int:
    series = TelemetrySeries.load(getattr(args, "in"))
    redone = replay(series)
    if args.verify:
        tick = first_divergence(series, redone)
        if tick is not None:
            print(f"replay diverges at tick {tick}", file=sys.stderr)
            return EXIT_MISMATCH
        print("replay verified: byte-identical")
    else:
        print(json.dumps(compute_metrics(redone).to_dict()))
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _load_raw(args.config)
    axes = [parse_axis(a) for a in args.axis or []]
    spec = SweepSpec(base=base, axes=axes, output_dir=args.out)
    results = run_sweep(spec)
    print(json.dumps([{"cell": cell, "metrics": report.to_dict()}
                      for cell, report in results]))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve  # imported lazily: pulls in fastapi/uvicorn

    raw = _load_raw(args.config)
    out = _telemetry_path(args.out, "live.jsonl")
    serve(raw, port=args.port, rate_hz=args.rate_hz, telemetry_path=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="telecell")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario headless")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="telemetry output file (.jsonl)")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--set", action="append", metavar="PATH=VALUE")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("replay", help="re-simulate a recorded session")
    p_rep.add_argument("--in", required=True, help="telemetry file (.jsonl)")
    p_rep.add_argument("--verify", action="store_true",
                       help="compare byte-exactly against the recording")
    p_rep.set_defaults(func=cmd_replay)

    p_sw = sub.add_parser("sweep", help="Cartesian parameter sweep")
    p_sw.add_argument("--config", required=True, help="base scenario")
    p_sw.add_argument("--axis", action="append", metavar="PATH=V1,V2,...")
    p_sw.add_argument("--out", help="output directory for CSV + telemetry")
    p_sw.set_defaults(func=cmd_sweep)

    p_srv = sub.add_parser("serve", help="live WebSocket session")
    p_srv.add_argument("--config", required=True)
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--rate-hz", type=float, default=60.0)
    p_srv.add_argument("--out", help="telemetry output file (.jsonl)")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
