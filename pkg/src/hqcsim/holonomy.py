"""Dark-state frames, discrete Wilson-line transport, and geometric oracles.

The transport never forms a connection symbolically.  Dark frames are
extracted numerically as null spaces of the sampled Hamiltonians, smoothed in
gauge by polar alignment, and the loop unitary is the path-ordered product of
successive frame overlaps, each unitarized by polar decomposition.  With both
endpoint frames pinned to the same computational dark basis the product is
gauge invariant and converges quadratically in the sample spacing to the
adiabatic loop transport.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import polar_unitary, unitarity_defect
from .loops import GateKind, LoopSchedule
from .serialize import complex_pairs, round_sig

#: Eigenvalues with |lambda| below this times max |lambda| count as dark.
DARK_EIGENVALUE_RTOL = 1e-9

#: Smallest singular value of a frame-to-frame overlap before transport is
#: declared broken (the dark space jumped by ~60 degrees between samples).
OVERLAP_SINGULAR_TOL = 0.5

#: Max projector mismatch of first/last frame for a loop to count as closed.
CLOSED_FRAME_TOL = 1e-6


@dataclass(eq=False)
class DarkFrame:
    """Gauge-aligned orthonormal basis of the zero-eigenvalue subspace at one sample."""

    sample_index: int
    frame: np.ndarray  # (dim, dark_dim), orthonormal columns


@dataclass(eq=False)
class HolonomyResult:
    """Dark-space loop unitary in the computational dark basis, with diagnostics."""

    unitary: np.ndarray
    unitarity_defect: float
    step_count: int
    cauchy_estimate: float

    def to_json_dict(self) -> dict:
        return {
            "unitary": complex_pairs(self.unitary),
            "unitarity_defect": round_sig(self.unitarity_defect),
            "step_count": self.step_count,
            "cauchy_estimate": round_sig(self.cauchy_estimate),
        }


def computational_dark_basis(kind: GateKind) -> np.ndarray:
    """Dark basis at the loop endpoints, cp = (0, 0, A), as frame columns.

    Single system: {Eminus, Eplus}.  Coupled pair: the drive at the pole only
    couples GG <-> E0E0, so the dark product states are
    {E0Eplus, EplusE0, EplusEplus}, in basis order.
    """
    if kind is GateKind.TWO_QUBIT:
        frame = np.zeros((5, 3), dtype=np.complex128)
        frame[2, 0] = frame[3, 1] = frame[4, 2] = 1.0
    else:
        frame = np.zeros((4, 2), dtype=np.complex128)
        frame[1, 0] = frame[2, 1] = 1.0
    return frame


def _align(frame: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Gauge-rotate ``frame`` to maximize continuity with ``reference``.

    Uses the unitary polar factor of the overlap, so the aligned overlap
    reference^dag frame' is Hermitian positive (close to identity for fine
    sampling).  Raises if the overlap is near singular.
    """
    overlap = reference.conj().T @ frame
    smin = np.linalg.svd(overlap, compute_uv=False)[-1]
    if smin < OVERLAP_SINGULAR_TOL:
        raise ValueError(
            f"sampling too coarse: dark frame jump (min overlap singular value {smin:.3g})"
        )
    return frame @ polar_unitary(overlap).conj().T


def dark_frames(schedule: LoopSchedule, builder) -> list[DarkFrame]:
    """Null-space frames along the schedule, gauge-aligned sequentially.

    The first frame is aligned to the computational dark basis; each later
    frame to its predecessor.  A change of dark dimension along the path
    raises (degeneracy crossing), as does a frame jump between samples.
    """
    stack = builder.matrix_stack(
        schedule.omega_minus, schedule.omega_plus, schedule.omega_zero
    )
    eigenvalues, eigenvectors = np.linalg.eigh(stack)
    frames: list[DarkFrame] = []
    reference = computational_dark_basis(schedule.kind)
    for i in range(schedule.n_samples):
        w = eigenvalues[i]
        scale = max(float(np.max(np.abs(w))), 1e-300)
        dark = np.abs(w) < DARK_EIGENVALUE_RTOL * scale
        count = int(np.count_nonzero(dark))
        if count != builder.dark_dim:
            raise ValueError(
                f"degeneracy crossing at sample {i}: dark dimension {count}, "
                f"expected {builder.dark_dim}"
            )
        aligned = _align(eigenvectors[i][:, dark], reference)
        frames.append(DarkFrame(i, aligned))
        reference = aligned
    return frames


def _overlap_product(frames: list[np.ndarray]) -> np.ndarray:
    """Path-ordered product of polar-unitarized successive overlaps.

    Each step matrix is frame_{k+1}^dag frame_k (transport of coefficient
    vectors); the closing factor re-expresses the result in the start frame.
    """
    dark_dim = frames[0].shape[1]
    product = np.eye(dark_dim, dtype=np.complex128)
    for k in range(len(frames) - 1):
        product = polar_unitary(frames[k + 1].conj().T @ frames[k]) @ product
    return polar_unitary(frames[0].conj().T @ frames[-1]) @ product


def wilson_line(frames: list[DarkFrame]) -> HolonomyResult:
    """Discrete loop transport over gauge-aligned dark frames.

    Reports the unitary in the start (computational) dark basis, its
    unitarity defect, and a Cauchy convergence estimate obtained by
    recomputing the product on every second frame.
    """
    if len(frames) < 3:
        raise ValueError("need at least 3 frames for a loop transport")
    mats = [f.frame for f in frames]
    first, last = mats[0], mats[-1]
    projector_gap = np.max(
        np.abs(first @ first.conj().T - last @ last.conj().T)
    )
    if projector_gap > CLOSED_FRAME_TOL:
        raise ValueError(
            f"holonomy requires a closed path: endpoint dark spaces differ by {projector_gap:.3g}"
        )
    unitary = _overlap_product(mats)
    half_indices = list(range(0, len(mats), 2))
    if half_indices[-1] != len(mats) - 1:
        half_indices.append(len(mats) - 1)
    halved = _overlap_product([mats[i] for i in half_indices])
    cauchy = float(np.max(np.abs(unitary - halved)))
    defect = unitarity_defect(unitary)
    return HolonomyResult(unitary, defect, len(frames) - 1, cauchy)


def solid_angle(thetas: np.ndarray, phis: np.ndarray) -> float:
    """Signed solid angle enclosed by a closed path on the sphere.

    Computed as the discrete line integral of (1 - cos theta) d phi, which is
    exact for meridian and parallel segments.  Positive for counterclockwise
    (increasing phi) traversal around the north pole; paths through the south
    pole are out of scope.
    """
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if thetas.shape != phis.shape or thetas.ndim != 1:
        raise ValueError("thetas and phis must be equal-length 1-d arrays")
    if len(thetas) < 2:
        return 0.0
    first = _sphere_point(thetas[0], phis[0])
    last = _sphere_point(thetas[-1], phis[-1])
    if np.linalg.norm(first - last) > 1e-9:
        raise ValueError("solid angle requires a closed path on the sphere")
    c = np.cos(thetas)
    return float(np.sum((1.0 - 0.5 * (c[:-1] + c[1:])) * np.diff(phis)))


def _sphere_point(theta: float, phi: float) -> np.ndarray:
    s = np.sin(theta)
    return np.array([s * np.cos(phi), s * np.sin(phi), np.cos(theta)])


def schedule_solid_angle(schedule: LoopSchedule) -> float:
    return solid_angle(schedule.thetas, schedule.phis)


def predicted_gate(kind: GateKind, phase: float) -> np.ndarray:
    """Analytic prediction on the ordered dark basis {Eminus, Eplus}.

    GATE1: diag(1, e^{i phase}).  GATE2: exp(i phase sigma_y), a real rotation
    by ``phase`` in the {Eminus, Eplus} plane.
    """
    if kind is GateKind.GATE1:
        return np.diag([1.0, np.exp(1j * phase)]).astype(np.complex128)
    if kind is GateKind.GATE2:
        c, s = np.cos(phase), np.sin(phase)
        return np.array([[c, s], [-s, c]], dtype=np.complex128)
    raise ValueError(f"no closed-form gate prediction for {kind}")


def gate1_phase(unitary: np.ndarray) -> float:
    """Relative phase between the two diagonal entries of a near-diagonal 2x2 unitary."""
    return float(np.angle(unitary[1, 1] * np.conj(unitary[0, 0])))


def gate2_rotation_angle(unitary: np.ndarray) -> float:
    """Rotation angle of a 2x2 special-unitary-like rotation, from its half-trace."""
    half_trace = float(np.real(np.trace(unitary))) / 2.0
    return float(np.arccos(np.clip(half_trace, -1.0, 1.0)))
