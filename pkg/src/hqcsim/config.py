"""Experiment configuration: strict JSON parsing, unit conversion, defaults.

Configs are JSON documents.  Unknown keys are rejected with their key path;
unit-carrying fields accept either a bare number (documented default unit),
a string like ``"7.5 ps"``, or ``{"value": 7.5, "unit": "ps"}``.  All values
are converted to internal units (rad/fs, fs, meV for delta) at parse time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import SINGLE_EXCITON, TWO_EXCITON, StateVector, basis_state, mev_to_rad_per_fs
from .dynamics import max_allowed_dt
from .errors import ConfigError
from .loops import Ramp, WedgeLoopSpec, canonical_two_qubit_spec

GATES = ("gate1", "gate2", "twoqubit", "holonomy")

_TIME_SCALES = {"fs": 1.0, "ps": 1e3, "ns": 1e6}
_OMEGA_UNITS = ("rad/fs", "inverse-fs", "fs", "meV")

_TOP_KEYS = {
    "gate", "phase_target", "omega", "delta", "t_ad", "dt",
    "loop", "initial_state", "output_dir", "scan",
}
_LOOP_KEYS = {"theta_max", "phi_sweep", "ramp", "n_samples"}
_SCAN_KEYS = {"parameter", "values"}
_SCAN_PARAMETERS = ("t_ad", "dt", "phase_target", "omega", "delta", "n_samples")

DEFAULT_OUTPUT_DIR = "hqc_output"
DEFAULT_N_SAMPLES = 10_000
HOLONOMY_DEFAULT_T_AD = 1000.0  # fs; geometric runs do not depend on it


@dataclass(frozen=True)
class ScanSpec:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (internal units)."""

    gate: str
    phase_target: float | None
    omega: float            # rad/fs
    delta_mev: float | None
    t_ad: float             # fs
    dt: float               # fs
    loop: WedgeLoopSpec
    initial_state: StateVector | None
    output_dir: str
    scan: ScanSpec | None
    dt_explicit: bool = False

    def manifest_dict(self) -> dict:
        """Every parameter, defaulted or not, with its resolved value."""
        state = None
        if self.initial_state is not None:
            state = [[z.real, z.imag] for z in self.initial_state.amplitudes]
        return {
            "gate": self.gate,
            "phase_target": self.phase_target,
            "omega_rad_per_fs": self.omega,
            "delta_mev": self.delta_mev,
            "t_ad_fs": self.t_ad,
            "dt_fs": self.dt,
            "loop": {
                "theta_max": self.loop.theta_max,
                "phi_sweep": self.loop.phi_sweep,
                "ramp": self.loop.ramp.value,
                "n_samples": self.loop.n_samples,
            },
            "initial_state": state,
            "output_dir": self.output_dir,
            "scan": (
                None
                if self.scan is None
                else {"parameter": self.scan.parameter, "values": list(self.scan.values)}
            ),
        }


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _split_quantity(value, path: str) -> tuple[float, str | None]:
    """(number, unit-or-None) from a number, "X unit" string, or value/unit dict."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value), None
    if isinstance(value, str):
        parts = value.split(None, 1)
        if len(parts) != 2:
            raise ConfigError(path, f"expected '<number> <unit>', got {value!r}")
        try:
            return float(parts[0]), parts[1].strip()
        except ValueError:
            raise ConfigError(path, f"expected '<number> <unit>', got {value!r}") from None
    if isinstance(value, dict):
        extra = set(value) - {"value", "unit"}
        if extra:
            raise ConfigError(path, f"unknown keys {sorted(extra)}")
        if "value" not in value or "unit" not in value:
            raise ConfigError(path, "expected both 'value' and 'unit'")
        return _require_number(value["value"], f"{path}.value"), str(value["unit"])
    raise ConfigError(path, f"expected a number, string, or value/unit object, got {value!r}")


def parse_omega(value, path: str = "omega") -> float:
    """Rabi amplitude in rad/fs.  Bare numbers are rad/fs; 'X fs' means Omega^-1 = X fs."""
    number, unit = _split_quantity(value, path)
    if unit is None or unit == "rad/fs":
        omega = number
    elif unit in ("fs", "inverse-fs"):
        if number <= 0:
            raise ConfigError(path, "inverse-time amplitude must be positive")
        omega = 1.0 / number
    elif unit == "meV":
        omega = mev_to_rad_per_fs(number)
    else:
        raise ConfigError(path, f"unknown unit {unit!r}; expected one of {_OMEGA_UNITS}")
    if omega <= 0:
        raise ConfigError(path, "amplitude must be positive")
    return omega


def parse_time(value, path: str) -> float:
    """Duration in fs.  Bare numbers are fs."""
    number, unit = _split_quantity(value, path)
    if unit is None:
        return number
    if unit not in _TIME_SCALES:
        raise ConfigError(path, f"unknown unit {unit!r}; expected one of {sorted(_TIME_SCALES)}")
    return number * _TIME_SCALES[unit]


def parse_delta(value, path: str = "delta") -> float:
    """Biexciton shift in meV.  Bare numbers are meV."""
    number, unit = _split_quantity(value, path)
    if unit not in (None, "meV"):
        raise ConfigError(path, f"unknown unit {unit!r}; delta is specified in meV")
    if number <= 0:
        raise ConfigError(path, "delta must be positive")
    return number


def _parse_initial_state(value, gate: str, path: str = "initial_state") -> StateVector:
    basis = TWO_EXCITON if gate == "twoqubit" else SINGLE_EXCITON
    if isinstance(value, str):
        if value not in basis.labels:
            raise ConfigError(path, f"unknown basis label {value!r}; expected one of {basis.labels}")
        return basis_state(basis, value)
    if isinstance(value, list):
        if len(value) != basis.dim:
            raise ConfigError(path, f"expected {basis.dim} amplitudes, got {len(value)}")
        amps = np.zeros(basis.dim, dtype=np.complex128)
        for i, entry in enumerate(value):
            if isinstance(entry, list):
                if len(entry) != 2:
                    raise ConfigError(f"{path}[{i}]", "expected [re, im]")
                amps[i] = complex(
                    _require_number(entry[0], f"{path}[{i}][0]"),
                    _require_number(entry[1], f"{path}[{i}][1]"),
                )
            else:
                amps[i] = _require_number(entry, f"{path}[{i}]")
        try:
            return StateVector(basis, amps)
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
    raise ConfigError(path, "expected a basis label or an amplitude list")


def _parse_loop(raw: dict, gate: str, phase_target: float | None, n_samples_default: int):
    """Resolve the wedge spec; for gate1/gate2 the sweep may be solved from the phase."""
    extra = set(raw) - _LOOP_KEYS
    if extra:
        raise ConfigError(f"loop.{sorted(extra)[0]}", "unknown key")
    ramp_name = raw.get("ramp", Ramp.SMOOTHSTEP.value)
    try:
        ramp = Ramp(ramp_name)
    except ValueError:
        raise ConfigError("loop.ramp", f"unknown ramp {ramp_name!r}") from None
    n_samples = int(_require_number(raw.get("n_samples", n_samples_default), "loop.n_samples"))
    theta_max = raw.get("theta_max")
    phi_sweep = raw.get("phi_sweep")
    if theta_max is not None:
        theta_max = _require_number(theta_max, "loop.theta_max")
    if phi_sweep is not None:
        phi_sweep = _require_number(phi_sweep, "loop.phi_sweep")

    if gate == "twoqubit":
        if phi_sweep is None and theta_max is None:
            base = canonical_two_qubit_spec(ramp, n_samples)
            return base, None
        if phi_sweep is None or theta_max is None:
            raise ConfigError("loop", "twoqubit loops need both theta_max and phi_sweep")
        return WedgeLoopSpec(theta_max, phi_sweep, ramp, n_samples), None

    # gate1 / gate2 / holonomy: wedge solved from the phase unless given explicitly
    if phi_sweep is not None:
        if phase_target is not None:
            raise ConfigError("loop.phi_sweep", "give either phase_target or loop.phi_sweep, not both")
        spec = WedgeLoopSpec(
            theta_max if theta_max is not None else math.pi / 2, phi_sweep, ramp, n_samples
        )
        implied = spec.solid_angle if gate == "gate2" else spec.solid_angle / 2.0
        return spec, implied
    if phase_target is None:
        raise ConfigError("phase_target", "required when loop.phi_sweep is not given")
    theta = theta_max if theta_max is not None else math.pi / 2
    cap = 1.0 - math.cos(theta)
    sweep = (phase_target if gate == "gate2" else 2.0 * phase_target) / cap
    if sweep > 2 * math.pi + 1e-12:
        raise ConfigError(
            "phase_target",
            f"unreachable: needs phi_sweep = {sweep:.4g} > 2*pi at theta_max = {theta:.4g}",
        )
    return WedgeLoopSpec(theta, sweep, ramp, n_samples), phase_target


def _parse_scan(raw: dict, gate: str) -> ScanSpec:
    extra = set(raw) - _SCAN_KEYS
    if extra:
        raise ConfigError(f"scan.{sorted(extra)[0]}", "unknown key")
    parameter = raw.get("parameter")
    if parameter not in _SCAN_PARAMETERS:
        raise ConfigError("scan.parameter", f"expected one of {_SCAN_PARAMETERS}, got {parameter!r}")
    values = raw.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("scan.values", "expected a non-empty list")
    resolved = []
    for i, v in enumerate(values):
        path = f"scan.values[{i}]"
        if parameter == "t_ad" or parameter == "dt":
            resolved.append(parse_time(v, path))
        elif parameter == "omega":
            resolved.append(parse_omega(v, path))
        elif parameter == "delta":
            resolved.append(parse_delta(v, path))
        elif parameter == "n_samples":
            resolved.append(float(int(_require_number(v, path))))
        else:
            resolved.append(_require_number(v, path))
    return ScanSpec(parameter, tuple(resolved))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully resolve a JSON experiment config (strict mode)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("", "top-level config must be an object")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown key")

    gate = raw.get("gate")
    if gate not in GATES:
        raise ConfigError("gate", f"expected one of {GATES}, got {gate!r}")

    phase_target = raw.get("phase_target")
    if phase_target is not None:
        phase_target = _require_number(phase_target, "phase_target")

    if "omega" not in raw:
        raise ConfigError("omega", "missing required field")
    omega = parse_omega(raw["omega"])

    delta_mev = None
    if gate == "twoqubit":
        if "delta" not in raw:
            raise ConfigError("delta", "missing required field for twoqubit runs")
        delta_mev = parse_delta(raw["delta"])
    elif "delta" in raw:
        raise ConfigError("delta", f"not used by {gate} runs")

    if "t_ad" in raw:
        t_ad = parse_time(raw["t_ad"], "t_ad")
    elif gate == "holonomy":
        t_ad = HOLONOMY_DEFAULT_T_AD
    else:
        raise ConfigError("t_ad", "missing required field")
    if t_ad <= 0:
        raise ConfigError("t_ad", "must be positive")

    loop_raw = raw.get("loop", {})
    if not isinstance(loop_raw, dict):
        raise ConfigError("loop", "expected an object")
    loop, implied_phase = _parse_loop(loop_raw, gate, phase_target, DEFAULT_N_SAMPLES)
    if gate != "twoqubit":
        phase_target = implied_phase

    dt_explicit = "dt" in raw
    dt = parse_time(raw["dt"], "dt") if dt_explicit else max_allowed_dt(omega, t_ad)
    if dt <= 0:
        raise ConfigError("dt", "must be positive")

    initial_state = None
    if gate == "holonomy":
        if "initial_state" in raw:
            raise ConfigError("initial_state", "not used by holonomy runs")
    else:
        default_label = "EplusEplus" if gate == "twoqubit" else "Eplus"
        initial_state = _parse_initial_state(raw.get("initial_state", default_label), gate)

    scan = None
    if "scan" in raw:
        if gate == "holonomy":
            raise ConfigError("scan", "scans require a dynamics gate (gate1, gate2, twoqubit)")
        if not isinstance(raw["scan"], dict):
            raise ConfigError("scan", "expected an object")
        scan = _parse_scan(raw["scan"], gate)

    output_dir = raw.get("output_dir", DEFAULT_OUTPUT_DIR)
    if not isinstance(output_dir, str):
        raise ConfigError("output_dir", "expected a string path")

    return ExperimentConfig(
        gate=gate,
        phase_target=phase_target,
        omega=omega,
        delta_mev=delta_mev,
        t_ad=t_ad,
        dt=dt,
        loop=loop,
        initial_state=initial_state,
        output_dir=output_dir,
        scan=scan,
        dt_explicit=dt_explicit,
    )


def scan_entry_config(cfg: ExperimentConfig, value: float) -> ExperimentConfig:
    """One scan entry: the scanned parameter replaced, dt re-defaulted if needed."""
    assert cfg.scan is not None
    parameter = cfg.scan.parameter
    entry = replace(cfg, scan=None)
    if parameter == "t_ad":
        entry = replace(entry, t_ad=value)
    elif parameter == "dt":
        entry = replace(entry, dt=value, dt_explicit=True)
    elif parameter == "omega":
        entry = replace(entry, omega=value)
    elif parameter == "delta":
        entry = replace(entry, delta_mev=value)
    elif parameter == "phase_target":
        entry = replace(entry, phase_target=value)
        # re-solve the wedge sweep for the new phase
        cap = 1.0 - math.cos(entry.loop.theta_max)
        factor = 1.0 if cfg.gate == "gate2" else 2.0
        sweep = factor * value / cap
        entry = replace(entry, loop=replace(entry.loop, phi_sweep=sweep))
    elif parameter == "n_samples":
        entry = replace(entry, loop=replace(entry.loop, n_samples=int(value)))
    if not entry.dt_explicit and parameter in ("t_ad", "omega"):
        entry = replace(entry, dt=max_allowed_dt(entry.omega, entry.t_ad))
    return entry
