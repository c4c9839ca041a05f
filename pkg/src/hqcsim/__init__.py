"""Simulator for adiabatic holonomic quantum gates on driven exciton levels.

Builds the control Hamiltonians, computes dark-state loop transport (Wilson
lines) along closed control paths, integrates the time-dependent Schrödinger
equation, and cross-checks geometry against dynamics.
"""

__version__ = "0.1.0"

from .core import (
    HBAR_MEV_FS,
    SINGLE_EXCITON,
    TWO_EXCITON,
    Basis,
    StateVector,
    basis_state,
    eigensystem,
    inner_product,
    mev_to_rad_per_fs,
    polar_unitary,
    rad_per_fs_to_mev,
    unitarity_defect,
)
from .dynamics import (
    FidelityReport,
    SimulationTrace,
    dynamics_vs_holonomy,
    evolve,
    max_allowed_dt,
    run_gate1,
    run_gate2,
    run_two_qubit,
)
from .errors import ConfigError, PreconditionError
from .hamiltonians import (
    BiexcitonShift,
    ControlPoint,
    SingleExcitonBuilder,
    TwoExcitonBuilder,
    build_single,
    build_two_exciton,
)
from .holonomy import (
    DarkFrame,
    HolonomyResult,
    computational_dark_basis,
    dark_frames,
    gate1_phase,
    gate2_rotation_angle,
    predicted_gate,
    schedule_solid_angle,
    solid_angle,
    wilson_line,
)
from .loops import (
    GateKind,
    LoopSchedule,
    Ramp,
    SphereAngles,
    WedgeLoopSpec,
    canonical_two_qubit_spec,
    control_points,
    gate1_schedule,
    gate2_schedule,
    make_schedule,
    reverse_schedule,
    schedule_from_wedge,
    two_qubit_schedule,
    wedge_path,
)
from .config import ExperimentConfig, ScanSpec, parse_config

__all__ = [
    "HBAR_MEV_FS", "SINGLE_EXCITON", "TWO_EXCITON", "Basis", "StateVector",
    "basis_state", "eigensystem", "inner_product", "mev_to_rad_per_fs",
    "polar_unitary", "rad_per_fs_to_mev", "unitarity_defect",
    "FidelityReport", "SimulationTrace", "dynamics_vs_holonomy", "evolve",
    "max_allowed_dt", "run_gate1", "run_gate2", "run_two_qubit",
    "ConfigError", "PreconditionError",
    "BiexcitonShift", "ControlPoint", "SingleExcitonBuilder", "TwoExcitonBuilder",
    "build_single", "build_two_exciton",
    "DarkFrame", "HolonomyResult", "computational_dark_basis", "dark_frames",
    "gate1_phase", "gate2_rotation_angle", "predicted_gate",
    "schedule_solid_angle", "solid_angle", "wilson_line",
    "GateKind", "LoopSchedule", "Ramp", "SphereAngles", "WedgeLoopSpec",
    "canonical_two_qubit_spec", "control_points", "gate1_schedule",
    "gate2_schedule", "make_schedule", "reverse_schedule", "schedule_from_wedge",
    "two_qubit_schedule", "wedge_path",
    "ExperimentConfig", "ScanSpec", "parse_config",
]
