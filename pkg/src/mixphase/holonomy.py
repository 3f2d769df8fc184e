"""Geometric phase of a parallel-transported mixed state, by three routes.

* trace route:       ``arg Tr[rho0 U(tau)]``
* gauge route:       line integral of ``i Tr[rho0 W^+ dW]`` with
                     ``W(t) = (Tr[rho0 U^+] / |Tr[rho0 U^+]|) U(t)``
* connection route:  ``sum_k w_k int i <chi_k|d chi_k>`` with ``|chi_k> = W|k>``

plus the pure-state (Bargmann) phase used for the rank-one reduction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import _as_density, dagger, principal_arg, spectral, wrap_phase
from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidInput,
    NodalPoint,
    NotParallelTransported,
    OrthogonalEndpoints,
    PathTooShort,
    StepTooCoarse,
    UndefinedPhase,
)
from .interferometry import PHASE_TOL
from .transport import (
    TransportDefect,
    UnitaryPath,
    _frame_for,
    defect,
    dynamical_phase,
    segment_derivatives,
)

TRANSPORT_TOL = 1e-6
INTEGRAL_TOL = 1e-5
MAX_STEP_INCREMENT = math.pi / 4


def _trace_path(rho0, path: UnitaryPath) -> np.ndarray:
    """``Tr[rho0 U(t)]`` at every grid point."""
    return np.einsum("ij,tji->t", rho0.matrix, path.unitaries)


def geometric_phase_trace(rho0, path: UnitaryPath, transport_tol: float = TRANSPORT_TOL,
                          phase_tol: float = PHASE_TOL, frame=None) -> float:
    """``arg Tr[rho0 U(tau)]`` for a path certified to be parallel transporting."""
    rho0 = _as_density(rho0)
    d = defect(rho0, path, frame)
    if d.global_defect >= transport_tol:
        raise NotParallelTransported(
            f"global transport defect {d.global_defect:.3e} exceeds {transport_tol:.0e}; "
            "the phase would contain a dynamical part"
        )
    z = complex(np.trace(rho0.matrix @ path.final))
    if abs(z) < phase_tol:
        raise UndefinedPhase(f"visibility {abs(z):.3e} below {phase_tol:.0e} at the end of the path")
    return principal_arg(z)


def reference_gauge(rho0, path: UnitaryPath, phase_tol: float = PHASE_TOL) -> np.ndarray:
    """Rephased path ``W(t)`` with ``Tr[rho0 W^+(t)]`` real positive."""
    rho0 = _as_density(rho0)
    if rho0.dim != path.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with path of dimension {path.dim}")
    z = np.conj(_trace_path(rho0, path))
    mag = np.abs(z)
    low = np.flatnonzero(mag < phase_tol)
    if low.size:
        j = int(low[0])
        raise NodalPoint(j, float(path.times[j]), float(mag[j]))
    return (z / mag)[:, None, None] * path.unitaries


def _gauge_integrands(rho0, path: UnitaryPath, phase_tol: float, frame=None):
    """Per segment: ``i <k|W^+ W'|k>`` for every frame column, or ``i Tr[rho0 W^+ W']``."""
    if len(path) < 3:
        raise PathTooShort(f"need at least 3 samples, got {len(path)}")
    w_path = reference_gauge(rho0, path, phase_tol)
    for sl, w_dot in segment_derivatives(w_path, path.times, path.breaks):
        w = w_path[sl]
        if frame is None:
            yield sl, 1j * np.einsum("ij,tlj,tli->t", rho0.matrix, w.conj(), w_dot)
        else:
            yield sl, 1j * np.einsum("ik,tji,tjl,lk->tk", frame.conj(), w.conj(), w_dot, frame)


def _accumulate(parts, times: np.ndarray) -> float:
    """Sum trapezoidal increments, refusing steps too coarse to resolve the phase."""
    total = 0.0
    for sl, f in parts:
        inc = 0.5 * (f[1:] + f[:-1]) * np.diff(times[sl])
        worst = float(np.max(np.abs(inc)))
        if worst >= MAX_STEP_INCREMENT:
            raise StepTooCoarse(f"phase increment {worst:.3f} per step exceeds pi/4; refine the grid")
        total += float(np.sum(inc))
    return total


class ConnectionBreakdown(NamedTuple):
    per_state: tuple
    weighted_sum: float


def average_connection(rho0, path: UnitaryPath, phase_tol: float = PHASE_TOL, frame=None,
                       strict: bool = True) -> ConnectionBreakdown:
    """Per-eigenstate connection integrals ``int i <chi_k|chi_k'> dt`` and their weighted sum.

    A degenerate ``rho0`` needs an explicit ``frame``; ``strict=False`` accepts
    an arbitrary eigenbasis within degenerate groups instead.
    """
    rho0 = _as_density(rho0)
    if frame is None:
        dec = spectral(rho0, strict=False)
        if dec.degenerate_groups and strict:
            raise DegenerateSpectrum(dec.degenerate_groups)
    frame = _frame_for(rho0, frame)
    weights = np.einsum("ik,ij,jk->k", frame.conj(), rho0.matrix, frame).real
    parts = list(_gauge_integrands(rho0, path, phase_tol, frame))
    per = tuple(
        _accumulate([(sl, f[:, k].real) for sl, f in parts], path.times) for k in range(frame.shape[1])
    )
    return ConnectionBreakdown(per, float(np.dot(weights, per)))


def geometric_phase_integral(rho0, path: UnitaryPath, phase_tol: float = PHASE_TOL) -> float:
    """Line integral of ``i Tr[rho0 W^+ W'] dt`` (trapezoidal, unwrapped).

    The result is the accumulated phase, not reduced modulo 2 pi.
    """
    rho0 = _as_density(rho0)
    parts = [(sl, f.real) for sl, f in _gauge_integrands(rho0, path, phase_tol)]
    return _accumulate(parts, path.times)


def pure_state_phase(states, tol: float = 1e-12) -> float:
    """Geometric phase of a sampled pure-state path.

    Returns ``arg <psi(0)|psi(tau)>`` if the samples are already parallel
    transported (every consecutive overlap real positive within ``tol`` in
    phase); otherwise the gauge-invariant Bargmann form
    ``arg[<psi_0|psi_M> prod_j <psi_{j+1}|psi_j>]``.
    """
    psi = np.asarray(states, dtype=np.complex128)
    if psi.ndim != 2 or psi.shape[0] < 2:
        raise InvalidInput("states must be a (samples, dim) array with at least two samples")
    norms = np.linalg.norm(psi, axis=1)
    if np.max(np.abs(norms - 1)) > 1e-10:
        raise InvalidInput("states must be unit vectors")
    ends = complex(np.vdot(psi[0], psi[-1]))
    if abs(ends) < 1e-12:
        raise OrthogonalEndpoints("initial and final states are orthogonal; phase undefined")
    steps = np.einsum("ti,ti->t", psi[1:].conj(), psi[:-1])
    if np.min(np.abs(steps)) < 1e-12:
        raise OrthogonalEndpoints("consecutive samples are orthogonal; refine the path")
    if np.max(np.abs(np.angle(steps))) <= tol:
        return principal_arg(ends)
    return wrap_phase(principal_arg(ends) + float(np.sum(np.angle(steps))))


@dataclass(frozen=True)
class EigenstateTerm:
    weight: float
    visibility: float
    phase: float


@dataclass(frozen=True)
class PhaseReport:
    """Everything measured about one evolution.

    ``gamma_g_*`` fields are ``None`` when the path is not parallel
    transporting (the total phase is then not purely geometric) or when a
    route is unavailable (nodal point).  ``route`` records which
    computations produced the numbers.
    """

    total_phase: float | None
    visibility: float
    gamma_d: float
    gamma_g_trace: float | None
    gamma_g_integral: float | None
    gamma_g_connection: float | None
    per_eigenstate: tuple
    defect: TransportDefect
    route: tuple = field(default=())

    @property
    def parallel_transported(self) -> bool:
        return self.gamma_g_trace is not None

    @property
    def route_gap(self) -> float | None:
        if self.gamma_g_trace is None or self.gamma_g_integral is None:
            return None
        return abs(wrap_phase(self.gamma_g_trace - self.gamma_g_integral))


def analyze(rho0, path: UnitaryPath, *, frame=None, transport_tol: float = TRANSPORT_TOL,
            phase_tol: float = PHASE_TOL, route: tuple = ()) -> PhaseReport:
    """Total phase, visibility, dynamical phase and all geometric-phase routes."""
    rho0 = _as_density(rho0)
    frame = _frame_for(rho0, frame)
    z = complex(np.trace(rho0.matrix @ path.final))
    nu = abs(z)
    total = principal_arg(z) if nu >= phase_tol else None
    d = defect(rho0, path, frame)
    gamma_d = dynamical_phase(rho0, path)
    weights = np.einsum("ik,ij,jk->k", frame.conj(), rho0.matrix, frame).real
    diag = np.einsum("ik,ij,jk->k", frame.conj(), path.final, frame)
    terms = tuple(EigenstateTerm(float(w), float(abs(c)), principal_arg(c)) for w, c in zip(weights, diag))
    g_trace = g_int = g_conn = None
    route = tuple(route)
    if d.global_defect < transport_tol and total is not None:
        g_trace = total
        route += ("trace",)
        try:
            g_int = geometric_phase_integral(rho0, path, phase_tol)
            g_conn = average_connection(rho0, path, phase_tol, frame).weighted_sum
            route += ("gauge-integral", "average-connection")
        except (NodalPoint, StepTooCoarse) as exc:
            route += (f"gauge routes skipped: {exc.code}",)
    else:
        route += ("not parallel transported: geometric phase not assigned",)
    return PhaseReport(total, nu, gamma_d, g_trace, g_int, g_conn, terms, d, route)
