"""Mach-Zehnder interferometry for an internal (spin-like) degree of freedom.

The beam pair spans a two-dimensional path space {|0~>, |1~>}.  The internal
unitary ``U_i`` acts in arm |1~> while a tunable U(1) shift ``chi`` acts in arm
|0~>.  The intensity measured along |0~> is

    I(chi) = (1/2) [1 + nu cos(chi - phi)],    nu e^{i phi} = Tr(U_i rho0),

normalised so that 0 <= I <= 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    DensityOperator,
    UnitaryOperator,
    _as_density,
    _as_unitary,
    dagger,
    principal_arg,
    spectral,
)
from .errors import DimensionMismatch, InvalidInput, NonStochasticWeights, UndefinedPhase

PHASE_TOL = 1e-9

# Unscaled Hadamard; the 1/sqrt(2) factors of the two beam splitters are
# applied together as an exact 1/4 on the output state.
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class InterferometerElements:
    """Path-space optical elements as 2 x 2 unitaries."""

    mirror: np.ndarray = field(default_factory=lambda: np.array([[0, 1], [1, 0]], dtype=np.complex128))
    beam_splitter: np.ndarray = field(default_factory=lambda: _HADAMARD / np.sqrt(2))

    @staticmethod
    def phase_shifter(chi: float) -> np.ndarray:
        return np.array([[np.exp(1j * chi), 0], [0, 1]], dtype=np.complex128)


ELEMENTS = InterferometerElements()


class PhaseVisibility(NamedTuple):
    phase: float
    visibility: float


@dataclass(frozen=True, eq=False)
class InterferenceProfile:
    """Sampled intensities along |0~> plus the fitted fringe parameters.

    ``phase`` is ``None`` when the visibility is below the phase tolerance.
    """

    chi: np.ndarray
    intensity: np.ndarray
    phase: float | None
    visibility: float

    def rows(self):
        return zip(self.chi.tolist(), self.intensity.tolist())


def branch_unitary(u_i, chi: float) -> UnitaryOperator:
    """Arm-dependent unitary: ``U_i`` along |1~>, ``e^{i chi}`` along |0~>."""
    u = _as_unitary(u_i).matrix
    n = u.shape[0]
    p0 = np.array([[np.exp(1j * chi), 0], [0, 0]], dtype=np.complex128)
    p1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
    return UnitaryOperator(np.kron(p1, u) + np.kron(p0, np.eye(n)))


def mach_zehnder_output(rho0, u_i, chi: float) -> DensityOperator:
    """Output state ``U_B U_M U U_B (|0~><0~| (x) rho0) (...)^+`` on the doubled space."""
    rho0, u_i = _as_density(rho0), _as_unitary(u_i)
    if rho0.dim != u_i.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with unitary of dimension {u_i.dim}")
    n = rho0.dim
    eye = np.eye(n)
    rho_in = np.kron(np.diag([1.0, 0.0]), rho0.matrix)
    b = np.kron(_HADAMARD, eye)
    m = np.kron(ELEMENTS.mirror, eye)
    t = b @ m @ branch_unitary(u_i, chi).matrix @ b
    out = 0.25 * (t @ rho_in @ dagger(t))
    return DensityOperator(0.5 * (out + dagger(out)))


def four_term_output(rho0, u_i, chi: float) -> np.ndarray:
    """Closed-form expansion of the output state into its four Kronecker terms."""
    r = _as_density(rho0).matrix
    u = _as_unitary(u_i).matrix
    ones = np.array([[1, 1], [1, 1]])
    anti = np.array([[1, -1], [-1, 1]])
    up = np.array([[1, 1], [-1, -1]])
    down = np.array([[1, -1], [1, -1]])
    return 0.25 * (
        np.kron(ones, u @ r @ dagger(u))
        + np.kron(anti, r)
        + np.exp(1j * chi) * np.kron(up, r @ dagger(u))
        + np.exp(-1j * chi) * np.kron(down, u @ r)
    )


def intensity_along_0(rho_out) -> float:
    """``Tr[(|0~><0~| (x) 1) rho_out]``; equals (1/2)[1 + nu cos(chi - phi)]."""
    m = rho_out.matrix if isinstance(rho_out, DensityOperator) else np.asarray(rho_out)
    if m.shape[0] % 2:
        raise DimensionMismatch("output state must live on the doubled (path x internal) space")
    n = m.shape[0] // 2
    return float(np.trace(m[:n, :n]).real)


def chi_scan(rho0, u_i, chi_grid) -> np.ndarray:
    """Simulated intensities along |0~> for every ``chi`` in the grid."""
    rho0, u_i = _as_density(rho0), _as_unitary(u_i)
    return np.array([intensity_along_0(mach_zehnder_output(rho0, u_i, c)) for c in chi_grid])


def phase_visibility(rho0, u, phase_tol: float = PHASE_TOL) -> PhaseVisibility:
    """Fringe shift ``arg Tr(U rho0)`` and contrast ``|Tr(U rho0)|``."""
    rho0, u = _as_density(rho0), _as_unitary(u)
    if rho0.dim != u.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with unitary of dimension {u.dim}")
    z = complex(np.trace(u.matrix @ rho0.matrix))
    if abs(z) < phase_tol:
        raise UndefinedPhase(f"visibility {abs(z):.3e} is below {phase_tol:.0e}; phase unobservable")
    return PhaseVisibility(principal_arg(z), abs(z))


def fit_fringe(chi, intensity, phase_tol: float = PHASE_TOL) -> PhaseVisibility:
    """Recover (phase, visibility) from samples of ``a + b cos(chi) + c sin(chi)``.

    Three samples are inverted exactly; more samples are fitted by linear
    least squares.  Visibility is measured relative to the fitted offset, so
    the overall intensity scale does not matter.  The phase is ``None`` when
    the visibility is below ``phase_tol``.
    """
    chi = np.asarray(chi, dtype=float)
    y = np.asarray(intensity, dtype=float)
    if chi.size < 3 or chi.size != y.size:
        raise InvalidInput("need at least three (chi, intensity) samples of equal length")
    basis = np.column_stack([np.ones_like(chi), np.cos(chi), np.sin(chi)])
    if chi.size == 3:
        a, b, c = np.linalg.solve(basis, y)
    else:
        (a, b, c), *_ = np.linalg.lstsq(basis, y, rcond=None)
    nu = float(np.hypot(b, c) / a)
    phase = principal_arg(complex(b, c)) if nu >= phase_tol else None
    return PhaseVisibility(phase, nu)


def simulate_profile(rho0, u_i, chi_grid, phase_tol: float = PHASE_TOL) -> InterferenceProfile:
    """Full interferometer chi-scan plus fitted fringe parameters."""
    chi = np.asarray(chi_grid, dtype=float)
    y = chi_scan(rho0, u_i, chi)
    phase, nu = fit_fringe(chi, y, phase_tol)
    return InterferenceProfile(chi, y, phase, nu)


def eigenstate_fringes(rho0, u_i) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Weights and per-eigenstate (nu_k, phi_k) with ``nu_k e^{i phi_k} = <k|U_i|k>``.

    Degenerate spectra are allowed: any eigenbasis gives the same average.
    """
    dec = spectral(rho0, strict=False)
    u = _as_unitary(u_i).matrix
    diag = np.einsum("ik,ij,jk->k", dec.frame.conj(), u, dec.frame)
    return dec.weights, [(abs(z), principal_arg(z)) for z in diag]


def incoherent_average_profile(weights, pairs, chi_grid, phase_tol: float = PHASE_TOL) -> InterferenceProfile:
    """Weighted average of single-state fringes ``(1/2)[1 + nu_k cos(chi - phi_k)]``.

    The fitted fields hold the closed-form combination
    ``nu e^{i phi} = sum_k w_k nu_k e^{i phi_k}``.
    """
    w = np.asarray(weights, dtype=float)
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if len(w) != len(pairs):
        raise InvalidInput(f"{len(w)} weights for {len(pairs)} fringe pairs")
    if np.any(w < -1e-10) or abs(w.sum() - 1) > 1e-10:
        raise NonStochasticWeights(f"weights {w.tolist()} are not a probability vector")
    nus, phis = pairs[:, 0], pairs[:, 1]
    if np.any(nus < 0) or np.any(nus > 1 + 1e-12):
        raise InvalidInput("single-state visibilities must lie in [0, 1]")
    chi = np.asarray(chi_grid, dtype=float)
    y = 0.5 * (1 + np.sum(w[:, None] * nus[:, None] * np.cos(chi[None, :] - phis[:, None]), axis=0))
    z = complex(np.sum(w * nus * np.exp(1j * phis)))
    nu = abs(z)
    return InterferenceProfile(chi, y, principal_arg(z) if nu >= phase_tol else None, nu)
