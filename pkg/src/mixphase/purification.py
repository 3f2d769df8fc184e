"""Purification oracle.

A state ``rho0 = sum_k w_k |k><k|`` is lifted to
``|Psi> = sum_k sqrt(w_k) |k>_s |k>_a`` with an ancilla of the same
dimension.  The vector is stored as its coefficient matrix ``A`` with
``|Psi> = sum_ij A_ij |i>_s |j>_a``, so that ``Tr_a |Psi><Psi| = A A^+``.

The overlap and transport checks below act on the explicit Kronecker-product
vector, independently of the trace formulas they are compared with.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import _as_density, _as_unitary, max_abs, spectral
from .errors import DimensionMismatch, InvalidDensity
from .transport import UnitaryPath, _derivatives


@dataclass(frozen=True, eq=False)
class PurifiedState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"amplitude matrix must be square, got {a.shape}")
        norm = np.linalg.norm(a)
        if abs(norm - 1) > 1e-12:
            raise InvalidDensity(f"purification has norm {norm:.17g}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def system_dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def ancilla_dim(self) -> int:
        return self.amplitudes.shape[1]

    def vector(self) -> np.ndarray:
        """Flattened ``|Psi>`` in the ordering of ``np.kron(system, ancilla)``."""
        return self.amplitudes.reshape(-1)

    def reduced(self) -> np.ndarray:
        """Partial trace over the ancilla, computed from the full projector."""
        n, m = self.amplitudes.shape
        psi = self.vector()
        full = np.outer(psi, psi.conj()).reshape(n, m, n, m)
        return np.einsum("iaja->ij", full)

    def evolve_local(self, u) -> "PurifiedState":
        """Apply ``U (x) 1`` to the joint state."""
        u = _as_unitary(u).matrix
        if u.shape[0] != self.system_dim:
            raise DimensionMismatch(f"unitary of dimension {u.shape[0]} on system of dimension {self.system_dim}")
        out = np.kron(u, np.eye(self.ancilla_dim)) @ self.vector()
        return PurifiedState(out.reshape(self.amplitudes.shape))


def purify(rho0) -> PurifiedState:
    """Canonical purification in the eigenbasis of ``rho0``."""
    dec = spectral(rho0, strict=False)
    a = dec.frame * np.sqrt(dec.weights)
    return PurifiedState(a / np.linalg.norm(a))


def purified_overlap(rho0, u) -> complex:
    """``<Psi|(U (x) 1)|Psi>``; equals ``Tr(U rho0)``."""
    rho0, u = _as_density(rho0), _as_unitary(u)
    if rho0.dim != u.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with unitary of dimension {u.dim}")
    psi = purify(rho0)
    return complex(np.vdot(psi.vector(), psi.evolve_local(u).vector()))


def purified_transport_check(rho0, path: UnitaryPath) -> float:
    """``max_t |<Psi(t)|Psi'(t)>|`` along the locally evolved purification."""
    rho0 = _as_density(rho0)
    if rho0.dim != path.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with path of dimension {path.dim}")
    psi0 = purify(rho0).vector()
    anc = np.eye(rho0.dim)
    worst = 0.0
    for sl, du in _derivatives(path):
        psi_t = np.kron(path.unitaries[sl], anc) @ psi0
        psi_dot = np.kron(du, anc) @ psi0
        worst = max(worst, float(np.max(np.abs(np.einsum("ti,ti->t", psi_t.conj(), psi_dot)))))
    return worst


def reconstruction_error(rho0) -> float:
    rho0 = _as_density(rho0)
    return max_abs(purify(rho0).reduced() - rho0.matrix)
