"""Interaction Hamiltonians for the driven exciton level schemes.

Two level structures are supported, both resonantly driven and written in the
rotating frame (no diagonal terms):

* single system, 4 levels (G, Eminus, Eplus, E0): the ground state couples to
  each excited level with Rabi frequency Omega_mu,

      H = - sum_mu ( Omega_mu |E_mu><G| + h.c. ),   mu in {-, +, 0};

* two coupled systems, 5 levels (GG plus the four {0,+} product excitations):
  an effective two-photon coupling through the level shift delta,

      H = -(2/delta) sum_{a,b in {0,+}} ( Omega_a Omega_b |E_a E_b><GG| + h.c. ).

Both couplings are rank one from the ground state, so the zero-eigenvalue
(dark) subspace has dimension 2 in the single system and 3 in the two-system
case whenever the drive is on.  Builders carry vectorized "stack" variants of
the same formulas for the integrator's hot path; they must stay exactly
equivalent to the per-point functions (tested).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SINGLE_EXCITON, TWO_EXCITON, Basis, mev_to_rad_per_fs

#: Default ceiling on |Omega_mu| in rad/fs; generous for real drives, tight
#: enough to catch meV-vs-rad/fs unit mistakes.
MAX_RABI_RAD_PER_FS = 1.0


@dataclass(frozen=True)
class ControlPoint:
    """The three complex Rabi frequencies (Omega_-, Omega_+, Omega_0), rad/fs."""

    omega_minus: complex
    omega_plus: complex
    omega_zero: complex
    max_magnitude: float = field(default=MAX_RABI_RAD_PER_FS, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("omega_minus", "omega_plus", "omega_zero"):
            value = complex(getattr(self, name))
            object.__setattr__(self, name, value)
            if not np.isfinite(value):
                raise ValueError(f"{name} is not finite: {value!r}")
            if abs(value) > self.max_magnitude:
                raise ValueError(
                    f"|{name}| = {abs(value):.3g} rad/fs exceeds the configured "
                    f"maximum {self.max_magnitude:.3g}; check units"
                )

    @property
    def magnitude(self) -> float:
        """Euclidean magnitude sqrt(sum |Omega_mu|^2) of the drive vector."""
        return float(
            np.sqrt(
                abs(self.omega_minus) ** 2
                + abs(self.omega_plus) ** 2
                + abs(self.omega_zero) ** 2
            )
        )


@dataclass(frozen=True)
class BiexcitonShift:
    """Level shift delta of one system's transition when the other is excited."""

    delta: float  # rad/fs

    def __post_init__(self) -> None:
        if not (self.delta > 0):
            raise ValueError(f"delta must be positive, got {self.delta!r}")

    @classmethod
    def from_mev(cls, delta_mev: float) -> "BiexcitonShift":
        return cls(mev_to_rad_per_fs(delta_mev))


def build_single(cp: ControlPoint) -> np.ndarray:
    """4x4 interaction Hamiltonian - sum_mu (Omega_mu |E_mu><G| + h.c.), rad/fs.

    Eigenvalues are {-|Omega|, 0, 0, +|Omega|} with |Omega| the drive magnitude;
    the two zero modes are the dark states.
    """
    h = np.zeros((4, 4), dtype=np.complex128)
    h[1, 0] = -cp.omega_minus
    h[2, 0] = -cp.omega_plus
    h[3, 0] = -cp.omega_zero
    return h + h.conj().T


def build_two_exciton(cp: ControlPoint, shift: BiexcitonShift) -> np.ndarray:
    """5x5 effective two-photon Hamiltonian coupling |GG> to |E_a E_b>, a,b in {0,+}.

    The coupling element is -(2/delta) * Omega_a * Omega_b (plain product, no
    conjugation; the Hermitian row is added explicitly).  Only the 0 and +
    polarizations enter, so a nonzero Omega_- is rejected.
    """
    if cp.omega_minus != 0:
        raise ValueError("two-photon model defined for {0,+} polarizations only")
    scale = 2.0 / shift.delta
    oz, op = cp.omega_zero, cp.omega_plus
    h = np.zeros((5, 5), dtype=np.complex128)
    h[1, 0] = -scale * oz * oz
    h[2, 0] = -scale * oz * op
    h[3, 0] = -scale * op * oz
    h[4, 0] = -scale * op * op
    return h + h.conj().T


def _normalized_rows(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=1)
    out = np.zeros_like(v)
    nz = norms > 0
    out[nz] = v[nz] / norms[nz, None]
    return out


class SingleExcitonBuilder:
    """Hamiltonian builder for the 4-level single system."""

    basis: Basis = SINGLE_EXCITON
    dim = 4
    dark_dim = 2

    def matrix(self, cp: ControlPoint) -> np.ndarray:
        return build_single(cp)

    def matrix_stack(
        self, omega_minus: np.ndarray, omega_plus: np.ndarray, omega_zero: np.ndarray
    ) -> np.ndarray:
        """(m, 4, 4) Hamiltonians for m control points at once."""
        m = len(omega_zero)
        h = np.zeros((m, 4, 4), dtype=np.complex128)
        h[:, 1, 0] = -omega_minus
        h[:, 2, 0] = -omega_plus
        h[:, 3, 0] = -omega_zero
        return h + np.conj(np.transpose(h, (0, 2, 1)))

    def bright_stack(
        self, omega_minus: np.ndarray, omega_plus: np.ndarray, omega_zero: np.ndarray
    ) -> np.ndarray:
        """(m, 4) unit vectors of the bright excited combination per point.

        The bright direction is sum_mu Omega_mu |E_mu>; together with |G| it
        spans everything outside the dark space.
        """
        m = len(omega_zero)
        v = np.zeros((m, 4), dtype=np.complex128)
        v[:, 1] = omega_minus
        v[:, 2] = omega_plus
        v[:, 3] = omega_zero
        return _normalized_rows(v)


class TwoExcitonBuilder:
    """Hamiltonian builder for the 5-level coupled pair at a fixed shift."""

    basis: Basis = TWO_EXCITON
    dim = 5
    dark_dim = 3

    def __init__(self, shift: BiexcitonShift):
        self.shift = shift

    def matrix(self, cp: ControlPoint) -> np.ndarray:
        return build_two_exciton(cp, self.shift)

    def matrix_stack(
        self, omega_minus: np.ndarray, omega_plus: np.ndarray, omega_zero: np.ndarray
    ) -> np.ndarray:
        if np.any(omega_minus != 0):
            raise ValueError("two-photon model defined for {0,+} polarizations only")
        scale = 2.0 / self.shift.delta
        m = len(omega_zero)
        h = np.zeros((m, 5, 5), dtype=np.complex128)
        h[:, 1, 0] = -scale * omega_zero * omega_zero
        h[:, 2, 0] = -scale * omega_zero * omega_plus
        h[:, 3, 0] = -scale * omega_plus * omega_zero
        h[:, 4, 0] = -scale * omega_plus * omega_plus
        return h + np.conj(np.transpose(h, (0, 2, 1)))

    def bright_stack(
        self, omega_minus: np.ndarray, omega_plus: np.ndarray, omega_zero: np.ndarray
    ) -> np.ndarray:
        m = len(omega_zero)
        v = np.zeros((m, 5), dtype=np.complex128)
        v[:, 1] = omega_zero * omega_zero
        v[:, 2] = omega_zero * omega_plus
        v[:, 3] = omega_plus * omega_zero
        v[:, 4] = omega_plus * omega_plus
        return _normalized_rows(v)
