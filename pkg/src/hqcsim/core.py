"""Labeled finite-dimensional Hilbert-space primitives shared by all modules.

Unit conventions: hbar = 1, time in femtoseconds, so energies and angular
frequencies are both rad/fs.  Quantities quoted in meV are converted through
``HBAR_MEV_FS``, stored once here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: hbar in meV * fs; the single source of truth for meV <-> rad/fs conversion.
HBAR_MEV_FS = 658.2119

#: Fixed basis orders. Every serialized trace and report uses these orders.
SINGLE_EXCITON_LABELS = ("G", "Eminus", "Eplus", "E0")
TWO_EXCITON_LABELS = ("GG", "E0E0", "E0Eplus", "EplusE0", "EplusEplus")

#: |norm^2 - 1| allowed for a StateVector, at construction and after runs.
NORM_TOL = 1e-8

#: Relative Hermiticity tolerance for operators handed to eigensystem().
HERMITICITY_RTOL = 1e-12


def mev_to_rad_per_fs(energy_mev: float) -> float:
    """Convert an energy in meV to angular frequency in rad/fs (hbar = 1)."""
    return energy_mev / HBAR_MEV_FS


def rad_per_fs_to_mev(omega: float) -> float:
    """Convert an angular frequency in rad/fs back to meV."""
    return omega * HBAR_MEV_FS


@dataclass(frozen=True)
class Basis:
    """Ordered, labeled orthonormal basis of a small Hilbert space."""

    labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r}; expected one of {self.labels}") from None


SINGLE_EXCITON = Basis(SINGLE_EXCITON_LABELS)
TWO_EXCITON = Basis(TWO_EXCITON_LABELS)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitude vector over a labeled basis.

    Norm drift is a diagnostic, never silently corrected, so construction
    rejects vectors whose squared norm is more than ``NORM_TOL`` from 1.
    """

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, basis dimension is {self.basis.dim}"
            )
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm_sq!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def population(self, label: str) -> float:
        return float(abs(self.amplitudes[self.basis.index(label)]) ** 2)

    def populations(self) -> np.ndarray:
        """Per-label populations |amplitude|^2 in fixed basis order."""
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        entries = ", ".join(
            f"{lbl}: {amp:.4g}" for lbl, amp in zip(self.basis.labels, self.amplitudes)
        )
        return f"StateVector({entries})"


def basis_state(basis: Basis, label: str) -> StateVector:
    """The basis ket with unit amplitude on ``label``."""
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[basis.index(label)] = 1.0
    return StateVector(basis, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.basis.labels != b.basis.labels:
        raise ValueError(
            f"basis mismatch: {a.basis.labels} vs {b.basis.labels}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def hermiticity_defect(matrix: np.ndarray) -> float:
    """Max-entry deviation of a matrix from its own conjugate transpose."""
    m = np.asarray(matrix)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def unitarity_defect(matrix: np.ndarray) -> float:
    """``max |U^dag U - I|``; zero for an exactly unitary matrix."""
    u = np.asarray(matrix)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def eigensystem(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    Raises ValueError if the input fails the Hermiticity contract
    (max |H - H^dag| entry <= HERMITICITY_RTOL * max |H| entry).
    """
    h = np.asarray(matrix, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = float(np.max(np.abs(h)))
    if hermiticity_defect(h) > HERMITICITY_RTOL * max(scale, 1e-300):
        raise ValueError("matrix is not Hermitian within tolerance")
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return eigenvalues, eigenvectors


def polar_unitary(matrix: np.ndarray) -> np.ndarray:
    """Unitary factor of the polar decomposition M = U P (via SVD)."""
    u, _, vh = np.linalg.svd(np.asarray(matrix, dtype=np.complex128))
    return u @ vh
