"""Closed control-space loops for the holonomic gates.

The only loop family implemented is the meridian-parallel-meridian "wedge" on
the (theta, phi) control sphere: descend a meridian from the pole to
theta_max, sweep the azimuth, and ascend back to the pole.  Wedges have an
analytic enclosed solid angle phi_sweep * (1 - cos theta_max), exact pole
endpoints (so start and end dark frames are computational basis states), and
each leg can be eased in time so the angular velocity vanishes at the corners.

Three control maps turn sphere angles into Rabi triples:

* GATE1:     Omega = (0, -A sin(theta/2) e^{i phi}, A cos(theta/2))
* GATE2:     Omega = (A sin(theta) cos(phi), A sin(theta) sin(phi), A cos(theta))
* TWO_QUBIT: the GATE1 map on (Omega_+, Omega_0) with amplitude A = Omega-tilde

All three satisfy sum |Omega_mu|^2 = A^2 at every sample and reduce to
(0, 0, A) at the pole.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .core import mev_to_rad_per_fs
from .errors import PreconditionError
from .hamiltonians import ControlPoint
from .serialize import csv_text, fmt

#: Maximum |first - last| control-point mismatch for a closed schedule.
CLOSURE_TOL = 1e-12

#: Minimum/soft-warning values of T_ad / (delta / Omega^2) for two-system loops.
ADIABATIC_RATIO_MIN = 50.0
ADIABATIC_RATIO_WARN = 100.0


class Ramp(Enum):
    """Per-leg time easing of the angle progression."""

    LINEAR = "linear"
    SMOOTHSTEP = "smoothstep"

    def ease(self, u: np.ndarray) -> np.ndarray:
        if self is Ramp.LINEAR:
            return u
        return u * u * (3.0 - 2.0 * u)


class GateKind(Enum):
    GATE1 = "gate1"
    GATE2 = "gate2"
    TWO_QUBIT = "twoqubit"


@dataclass(frozen=True)
class SphereAngles:
    """Point on the control sphere; phi is unwrapped and may exceed 2*pi."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (-1e-12 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")


@dataclass(frozen=True)
class WedgeLoopSpec:
    """Geometry of one wedge loop.

    ``phi_start`` places the first meridian; the sweep runs counterclockwise
    from there.  The enclosed solid angle is phi_sweep * (1 - cos theta_max)
    regardless of phi_start.
    """

    theta_max: float
    phi_sweep: float
    ramp: Ramp = Ramp.SMOOTHSTEP
    n_samples: int = 10_000
    phi_start: float = 0.0

    def __post_init__(self) -> None:
        if self.theta_max <= 0 or self.phi_sweep <= 0:
            raise PreconditionError("zero-area loop")
        if self.theta_max > math.pi:
            raise PreconditionError(f"theta_max must lie in (0, pi], got {self.theta_max!r}")
        if self.phi_sweep > 2 * math.pi + 1e-12:
            raise PreconditionError(f"phi_sweep must lie in (0, 2*pi], got {self.phi_sweep!r}")
        if self.n_samples < 100:
            raise PreconditionError(f"n_samples must be at least 100, got {self.n_samples}")

    @property
    def solid_angle(self) -> float:
        return self.phi_sweep * (1.0 - math.cos(self.theta_max))


def _wedge_angles(
    theta_max: float,
    sweep: float,
    phi_start: float,
    ramp: Ramp,
    n_samples: int,
    t_ad: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled (t, theta, phi) for a wedge; ``sweep`` may be negative.

    Leg durations are proportional to arc length and corner samples are shared,
    so the discretized parallel leg carries the whole solid angle exactly.
    """
    if t_ad <= 0:
        raise PreconditionError(f"loop duration must be positive, got {t_ad!r}")
    leg_arc = np.array([theta_max, abs(sweep) * math.sin(theta_max), theta_max])
    total_arc = leg_arc.sum()
    segments = n_samples - 1
    s1 = max(1, round(segments * leg_arc[0] / total_arc))
    s2 = max(1, round(segments * leg_arc[1] / total_arc))
    s3 = segments - s1 - s2
    if s3 < 1:
        shrink = 1 - s3
        s2 -= shrink  # keep the total; s2 is the largest leg in this regime
        s3 = 1
    counts = (s1, s2, s3)
    t_marks = np.concatenate([[0.0], np.cumsum(leg_arc) / total_arc]) * t_ad

    times, thetas, phis = [], [], []
    legs = (
        (lambda e: (theta_max * e, np.full_like(e, phi_start))),
        (lambda e: (np.full_like(e, theta_max), phi_start + sweep * e)),
        (lambda e: (theta_max * (1.0 - e), np.full_like(e, phi_start + sweep))),
    )
    for i, leg in enumerate(legs):
        n_pts = counts[i] + 1
        u = np.linspace(0.0, 1.0, n_pts)
        th, ph = leg(ramp.ease(u))
        t = t_marks[i] + (t_marks[i + 1] - t_marks[i]) * u
        if times:  # corner sample already present
            t, th, ph = t[1:], th[1:], ph[1:]
        times.append(t)
        thetas.append(th)
        phis.append(ph)
    return np.concatenate(times), np.concatenate(thetas), np.concatenate(phis)


def wedge_path(spec: WedgeLoopSpec, t_ad: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled (times, thetas, phis) arrays of the wedge, traversed counterclockwise."""
    return _wedge_angles(
        spec.theta_max, spec.phi_sweep, spec.phi_start, spec.ramp, spec.n_samples, t_ad
    )


def control_points(
    kind: GateKind, amplitude: float, thetas: np.ndarray, phis: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply a gate's control map to sphere angles; returns (Omega_-, Omega_+, Omega_0)."""
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if kind is GateKind.GATE2:
        om = amplitude * np.sin(thetas) * np.cos(phis) + 0j
        op = amplitude * np.sin(thetas) * np.sin(phis) + 0j
        oz = amplitude * np.cos(thetas) + 0j
    else:
        om = np.zeros_like(thetas, dtype=np.complex128)
        op = -amplitude * np.sin(thetas / 2.0) * np.exp(1j * phis)
        oz = amplitude * np.cos(thetas / 2.0) + 0j
    return om, op, oz


@dataclass(eq=False)
class LoopSchedule:
    """Discretized closed control path with time stamps.

    ``samples[i]`` is (t_i, ControlPoint, SphereAngles); arrays are exposed
    directly for vectorized consumers.
    """

    kind: GateKind
    amplitude: float
    times: np.ndarray
    thetas: np.ndarray
    phis: np.ndarray
    omega_minus: np.ndarray
    omega_plus: np.ndarray
    omega_zero: np.ndarray

    @property
    def total_duration(self) -> float:
        return float(self.times[-1])

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def control_point(self, i: int) -> ControlPoint:
        return ControlPoint(self.omega_minus[i], self.omega_plus[i], self.omega_zero[i])

    def sphere_angles(self, i: int) -> SphereAngles:
        return SphereAngles(float(self.thetas[i]), float(self.phis[i]))

    @property
    def samples(self):
        for i in range(self.n_samples):
            yield float(self.times[i]), self.control_point(i), self.sphere_angles(i)

    def interpolate_angles(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Linear (theta, phi) interpolation between stored samples."""
        t = np.asarray(t, dtype=float)
        return np.interp(t, self.times, self.thetas), np.interp(t, self.times, self.phis)


def make_schedule(
    kind: GateKind,
    amplitude: float,
    times: np.ndarray,
    thetas: np.ndarray,
    phis: np.ndarray,
) -> LoopSchedule:
    """Build and validate a LoopSchedule from sampled angles."""
    times = np.asarray(times, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if not (len(times) == len(thetas) == len(phis)) or len(times) < 2:
        raise ValueError("times/thetas/phis must be equal-length arrays with >= 2 samples")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must increase strictly from 0")
    if np.min(thetas) < -1e-12 or np.max(thetas) > math.pi + 1e-12:
        raise ValueError("theta samples must lie in [0, pi]")
    om, op, oz = control_points(kind, amplitude, thetas, phis)
    first = np.array([om[0], op[0], oz[0]])
    last = np.array([om[-1], op[-1], oz[-1]])
    if np.max(np.abs(first - last)) > CLOSURE_TOL:
        raise PreconditionError("control path is not closed")
    expected = np.array([0.0, 0.0, amplitude], dtype=np.complex128)
    if np.max(np.abs(first - expected)) > CLOSURE_TOL:
        raise PreconditionError(
            "schedule endpoints must sit at the pole, cp = (0, 0, amplitude)"
        )
    return LoopSchedule(kind, float(amplitude), times, thetas, phis, om, op, oz)


def schedule_from_wedge(
    spec: WedgeLoopSpec, kind: GateKind, amplitude: float, t_ad: float
) -> LoopSchedule:
    """Wedge loop rendered through a gate's control map (counterclockwise sweep)."""
    times, thetas, phis = wedge_path(spec, t_ad)
    return make_schedule(kind, amplitude, times, thetas, phis)


#: First meridian used by gate-2 schedules.  On the phi = pi/2 meridian the
#: gate-2 drive lives in the {Omega_+, Omega_0} plane, so the transported
#: |Eplus> passes through the ancilla |E0>; with meridians at phi = 0 it would
#: stay in the {Eminus, Eplus} plane and the ancilla would never populate.
GATE2_PHI_START = math.pi / 2


def gate1_schedule(
    phi1_target: float,
    omega: float,
    t_ad: float,
    *,
    theta_max: float = math.pi / 2,
    ramp: Ramp = Ramp.SMOOTHSTEP,
    n_samples: int = 10_000,
) -> LoopSchedule:
    """Wedge schedule enacting the phase gate diag(1, e^{i phi1}) on {Eminus, Eplus}.

    The wedge is solved so that half its solid angle equals phi1_target:
    theta_max is fixed (default pi/2) and phi_sweep = 2 * phi1 / (1 - cos theta_max).
    """
    if not (0 < phi1_target < 2 * math.pi):
        raise PreconditionError(f"phi1 target must lie in (0, 2*pi), got {phi1_target!r}")
    cap = 1.0 - math.cos(theta_max)
    phi_sweep = 2.0 * phi1_target / cap
    if phi_sweep > 2 * math.pi + 1e-12:
        raise PreconditionError(
            f"phase target {phi1_target:.4g} unreachable: needs phi_sweep = "
            f"{phi_sweep:.4g} > 2*pi at theta_max = {theta_max:.4g}"
        )
    spec = WedgeLoopSpec(theta_max, phi_sweep, ramp, n_samples)
    return schedule_from_wedge(spec, GateKind.GATE1, omega, t_ad)


def gate2_schedule(
    phi2_target: float,
    omega: float,
    t_ad: float,
    *,
    theta_max: float = math.pi / 2,
    ramp: Ramp = Ramp.SMOOTHSTEP,
    n_samples: int = 10_000,
) -> LoopSchedule:
    """Wedge schedule enacting the rotation exp(i phi2 sigma_y) on {Eminus, Eplus}.

    The wedge is solved so that its solid angle magnitude equals phi2_target.
    The sweep starts on the phi = pi/2 meridian (see GATE2_PHI_START) and runs
    clockwise; with this orientation the enacted rotation matches
    predicted_gate(GATE2, phi2) exactly rather than its inverse.
    """
    if not (0 < phi2_target < 4 * math.pi):
        raise PreconditionError(f"phi2 target must lie in (0, 4*pi), got {phi2_target!r}")
    cap = 1.0 - math.cos(theta_max)
    phi_sweep = phi2_target / cap
    if phi_sweep > 2 * math.pi + 1e-12:
        raise PreconditionError(
            f"phase target {phi2_target:.4g} unreachable: needs phi_sweep = "
            f"{phi_sweep:.4g} > 2*pi at theta_max = {theta_max:.4g}"
        )
    WedgeLoopSpec(theta_max, phi_sweep, ramp, n_samples)  # range validation
    times, thetas, phis = _wedge_angles(
        theta_max, -phi_sweep, GATE2_PHI_START, ramp, n_samples, t_ad
    )
    return make_schedule(GateKind.GATE2, omega, times, thetas, phis)


#: Canonical two-system wedge: on the recurrence curve
#: phi_sweep * sqrt(2 - cos^2 theta_max) = 2*pi the degenerate dark doublet
#: {sym(E0 Eplus), Eplus Eplus} completes a full internal rotation over the
#: sweep, so the loop enacts a pure controlled phase
#: chi = phi_sweep * (1 - cos(theta_max)/2) + pi on |EplusEplus|.
#: theta_max = acos((8 - 3*sqrt(10))/13) makes chi = +pi/2.  Off this curve the
#: doublet mixing survives at closure and the return fidelity of
#: |EplusEplus> is capped well below 1 (e.g. 0.71 for the pi/2-solid-angle wedge).
TWO_QUBIT_THETA_MAX = math.acos((8.0 - 3.0 * math.sqrt(10.0)) / 13.0)
TWO_QUBIT_PHI_SWEEP = 2.0 * math.pi / math.sqrt(2.0 - math.cos(TWO_QUBIT_THETA_MAX) ** 2)


def canonical_two_qubit_spec(
    ramp: Ramp = Ramp.SMOOTHSTEP, n_samples: int = 10_000
) -> WedgeLoopSpec:
    """The default two-system wedge (recurrence wedge, controlled phase +pi/2)."""
    return WedgeLoopSpec(TWO_QUBIT_THETA_MAX, TWO_QUBIT_PHI_SWEEP, ramp, n_samples)


def two_qubit_schedule(
    loop: WedgeLoopSpec,
    omega_tilde: float,
    delta_mev: float,
    t_ad: float,
) -> LoopSchedule:
    """Schedule for the coupled pair under the two-photon drive.

    Enforces the adiabaticity chain for the effective coupling: the loop must
    satisfy T_ad >> delta / Omega-tilde^2 (ratio >= 50, warning below 100).
    """
    delta = mev_to_rad_per_fs(delta_mev)
    if delta <= 0:
        raise PreconditionError(f"delta must be positive, got {delta_mev!r} meV")
    timescale = delta / omega_tilde**2
    ratio = t_ad / timescale
    if ratio < ADIABATIC_RATIO_MIN:
        raise PreconditionError(
            f"loop violates T_ad >> delta/|Omega|^2: T_ad/(delta/Omega^2) = "
            f"{ratio:.3g} < {ADIABATIC_RATIO_MIN:.0f}"
        )
    if ratio < ADIABATIC_RATIO_WARN:
        warnings.warn(
            f"marginal adiabaticity: T_ad/(delta/Omega^2) = {ratio:.3g}",
            stacklevel=2,
        )
    return schedule_from_wedge(loop, GateKind.TWO_QUBIT, omega_tilde, t_ad)


def reverse_schedule(schedule: LoopSchedule) -> LoopSchedule:
    """The same loop traversed in the opposite direction."""
    t = schedule.times
    return make_schedule(
        schedule.kind,
        schedule.amplitude,
        t[-1] - t[::-1],
        schedule.thetas[::-1].copy(),
        schedule.phis[::-1].copy(),
    )


def schedule_csv_text(schedule: LoopSchedule) -> str:
    header = [
        "t_fs", "theta", "phi",
        "re_omega_minus", "im_omega_minus",
        "re_omega_plus", "im_omega_plus",
        "re_omega_zero", "im_omega_zero",
    ]
    rows = []
    for i in range(schedule.n_samples):
        rows.append([
            fmt(schedule.times[i]), fmt(schedule.thetas[i]), fmt(schedule.phis[i]),
            fmt(schedule.omega_minus[i].real), fmt(schedule.omega_minus[i].imag),
            fmt(schedule.omega_plus[i].real), fmt(schedule.omega_plus[i].imag),
            fmt(schedule.omega_zero[i].real), fmt(schedule.omega_zero[i].imag),
        ])
    return csv_text(header, rows)


def write_schedule_csv(schedule: LoopSchedule, path: Path) -> None:
    Path(path).write_text(schedule_csv_text(schedule), encoding="utf-8")
