"""Command-line front end: hqc run | holonomy | scan <config.json>.

Exit codes: 0 success, 2 precondition or configuration violation, 1 internal
error.  All outputs are deterministic for identical configs: fixed float
formatting, fixed field order, no timestamps.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, parse_config, scan_entry_config
from .dynamics import run_gate1, run_gate2, run_two_qubit
from .errors import PreconditionError
from .hamiltonians import BiexcitonShift, SingleExcitonBuilder, TwoExcitonBuilder
from .holonomy import (
    dark_frames,
    gate1_phase,
    gate2_rotation_angle,
    predicted_gate,
    schedule_solid_angle,
    wilson_line,
)
from .loops import (
    GateKind,
    LoopSchedule,
    gate1_schedule,
    gate2_schedule,
    schedule_from_wedge,
    two_qubit_schedule,
    write_schedule_csv,
)
from .serialize import csv_text, fmt, write_json

import numpy as np


def _build_schedule(cfg: ExperimentConfig) -> LoopSchedule:
    common = {"theta_max": cfg.loop.theta_max, "ramp": cfg.loop.ramp, "n_samples": cfg.loop.n_samples}
    if cfg.gate == "gate1":
        return gate1_schedule(cfg.phase_target, cfg.omega, cfg.t_ad, **common)
    if cfg.gate == "gate2":
        return gate2_schedule(cfg.phase_target, cfg.omega, cfg.t_ad, **common)
    if cfg.gate == "twoqubit":
        return two_qubit_schedule(cfg.loop, cfg.omega, cfg.delta_mev, cfg.t_ad)
    # geometric-only runs use the gate-1 control map
    return schedule_from_wedge(cfg.loop, GateKind.GATE1, cfg.omega, cfg.t_ad)


def _builder_for(cfg: ExperimentConfig):
    if cfg.gate == "twoqubit":
        return TwoExcitonBuilder(BiexcitonShift.from_mev(cfg.delta_mev))
    return SingleExcitonBuilder()


def _write_manifest(cfg: ExperimentConfig, out_dir: Path, command: str) -> None:
    write_json(
        out_dir / "manifest.json",
        {"tool": "hqcsim", "version": __version__, "command": command, "config": cfg.manifest_dict()},
    )


def _execute_run(cfg: ExperimentConfig, command: str = "run") -> dict:
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schedule = _build_schedule(cfg)

    if cfg.gate == "gate1":
        report, trace = run_gate1(
            cfg.phase_target, cfg.omega, cfg.t_ad, cfg.dt, cfg.initial_state,
            theta_max=cfg.loop.theta_max, ramp=cfg.loop.ramp,
            n_samples=cfg.loop.n_samples, compare_holonomy=True,
        )
    elif cfg.gate == "gate2":
        report, trace = run_gate2(
            cfg.phase_target, cfg.omega, cfg.t_ad, cfg.dt, cfg.initial_state,
            theta_max=cfg.loop.theta_max, ramp=cfg.loop.ramp,
            n_samples=cfg.loop.n_samples, compare_holonomy=True,
        )
    elif cfg.gate == "twoqubit":
        report, trace = run_two_qubit(
            cfg.loop, cfg.omega, cfg.delta_mev, cfg.t_ad, cfg.dt, cfg.initial_state
        )
    else:
        raise PreconditionError(f"gate {cfg.gate!r} is not a dynamics run; use 'hqc holonomy'")

    payload = {
        "gate": cfg.gate,
        "phase_target": cfg.phase_target,
        "solid_angle": schedule_solid_angle(schedule),
        **report.to_json_dict(),
        "norm_drift": trace.norm_drift,
    }
    write_json(out_dir / "report.json", payload)
    trace.write_csv(out_dir / "trace.csv")
    write_schedule_csv(schedule, out_dir / "schedule.csv")
    _write_manifest(cfg, out_dir, command)
    return payload


def _execute_holonomy(cfg: ExperimentConfig) -> dict:
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schedule = _build_schedule(cfg)
    result = wilson_line(dark_frames(schedule, _builder_for(cfg)))
    solid = schedule_solid_angle(schedule)

    kind = schedule.kind
    if kind is GateKind.GATE2:
        extracted = gate2_rotation_angle(result.unitary)
    elif kind is GateKind.TWO_QUBIT:
        extracted = float(np.angle(result.unitary[2, 2]))
    else:
        extracted = gate1_phase(result.unitary)

    predicted_deviation = None
    if kind in (GateKind.GATE1, GateKind.GATE2):
        expected = abs(solid) if kind is GateKind.GATE2 else abs(solid) / 2.0
        predicted_deviation = min(
            float(np.max(np.abs(result.unitary - predicted_gate(kind, sign * expected))))
            for sign in (1.0, -1.0)
        )

    payload = {
        "gate": cfg.gate,
        "control_map": kind.value,
        "solid_angle_numeric": solid,
        "solid_angle_analytic": cfg.loop.solid_angle,
        "extracted_phase": extracted,
        "predicted_deviation": predicted_deviation,
        **result.to_json_dict(),
    }
    write_json(out_dir / "holonomy.json", payload)
    write_schedule_csv(schedule, out_dir / "schedule.csv")
    _write_manifest(cfg, out_dir, "holonomy")
    return payload


def _execute_scan(cfg: ExperimentConfig) -> None:
    if cfg.scan is None:
        raise PreconditionError("config has no scan block; use 'hqc run'")
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, value in enumerate(cfg.scan.values):
        entry_cfg = scan_entry_config(cfg, value)
        entry_cfg = replace(entry_cfg, output_dir=str(out_dir / f"entry_{i:03d}"))
        payload = _execute_run(entry_cfg, command="scan")
        rows.append([
            str(i),
            fmt(value),
            fmt(payload["fidelity"]),
            "" if payload["final_phase"] is None else fmt(payload["final_phase"]),
            fmt(payload["leakage_max"]),
            "" if payload["holonomy_distance"] is None else fmt(payload["holonomy_distance"]),
            fmt(payload["norm_drift"]),
        ])
    header = [
        "index", cfg.scan.parameter, "fidelity", "final_phase",
        "leakage_max", "holonomy_distance", "norm_drift",
    ]
    (out_dir / "summary.csv").write_text(csv_text(header, rows), encoding="utf-8")
    _write_manifest(cfg, out_dir, "scan")


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    text = Path(args.config).read_text(encoding="utf-8")
    cfg = parse_config(text)
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt, dt_explicit=True)
    if args.samples is not None:
        cfg = replace(cfg, loop=replace(cfg.loop, n_samples=args.samples))
    return cfg


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("config", help="path to a JSON experiment config")
    sub.add_argument("--output-dir", default=None, help="override config output_dir")
    sub.add_argument("--dt", type=float, default=None, help="override integration step (fs)")
    sub.add_argument("--samples", type=int, default=None, help="override loop.n_samples")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hqc", description="Adiabatic holonomic gate simulator"
    )
    parser.add_argument("--version", action="version", version=f"hqcsim {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("run", "integrate a gate loop and write trace/report"),
        ("holonomy", "geometric loop transport only, no dynamics"),
        ("scan", "run one gate over a list of parameter values"),
    ):
        _add_common(subparsers.add_parser(name, help=text))

    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "run":
            if cfg.scan is not None:
                raise PreconditionError("config has a scan block; use 'hqc scan'")
            _execute_run(cfg)
        elif args.command == "holonomy":
            _execute_holonomy(cfg)
        else:
            _execute_scan(cfg)
    except PreconditionError as exc:
        print(f"hqc: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"hqc: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"hqc: internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
