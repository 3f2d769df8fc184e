"""Time-ordered unitary evolution and parallel transport of density operators.

A :class:`GeneratorPath` holds Hermitian generators ``H(t_j)`` (hbar = 1) on a
time grid.  :func:`integrate` produces the plain time-ordered evolution;
:func:`transport_evolution` removes, at every substep, the part of ``H`` that
is diagonal in the instantaneous eigenframe of ``rho(t)``.  That leaves the
trajectory ``rho(t)`` unchanged but fixes the free eigenstate phases so that
``<k(t)|U'U^+|k(t)> = 0`` for every eigenstate, which in turn makes
``Tr[rho U'U^+]`` and the dynamical phase vanish.

The diagnostics (:func:`defect`, :func:`dynamical_phase`) differentiate the
sampled path with finite differences and never look at the generators, so
they check the integrator rather than repeat it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import (
    DEGENERACY_TOL,
    FRAME_TOL,
    UNITARY_TOL,
    _as_density,
    check_orthonormal,
    dagger,
    max_abs,
    spectral,
)
from .errors import (
    DimensionMismatch,
    EmptyPath,
    FrameDiscontinuity,
    InvalidInput,
    NonHermitianInput,
    NonOrthonormalFrame,
    NonUnitaryInput,
    PathTooShort,
)

log = logging.getLogger(__name__)

FRAME_CONTINUITY = 0.9


def _grid(times) -> np.ndarray:
    t = np.asarray(times, dtype=float).reshape(-1)
    if t.size == 0:
        raise EmptyPath("time grid is empty")
    if np.any(np.diff(t) <= 0):
        raise InvalidInput("time grid must be strictly increasing")
    return t


def _stack(mats, n_times: int, what: str) -> np.ndarray:
    m = np.array(mats, dtype=np.complex128)
    if m.ndim != 3 or m.shape[0] != n_times or m.shape[1] != m.shape[2]:
        raise DimensionMismatch(f"{what}: expected {n_times} square matrices, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class GeneratorPath:
    """Hermitian generators sampled on a strictly increasing grid.

    ``interpolation`` controls the generator between samples: ``"linear"``
    interpolates, ``"hold"`` keeps ``H(t_j)`` on ``[t_j, t_{j+1})`` (used for
    piecewise-constant drives such as geodesic polygons).
    """

    times: np.ndarray
    generators: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        t = _grid(self.times)
        h = _stack(self.generators, t.size, "generators")
        herm = max_abs(h - dagger(h))
        if herm > 1e-12:
            raise NonHermitianInput(f"generator deviates from Hermiticity by {herm:.3e}")
        if self.interpolation not in ("linear", "hold"):
            raise InvalidInput(f"unknown interpolation {self.interpolation!r}")
        t.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "generators", h)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def breaks(self) -> tuple:
        """Grid indices where a held generator switches value (derivative kinks of U)."""
        if self.interpolation != "hold":
            return ()
        jumps = np.any(self.generators[1:-1] != self.generators[:-2], axis=(1, 2))
        return tuple(int(j) + 1 for j in np.flatnonzero(jumps))

    @classmethod
    def from_function(cls, hamiltonian, times, interpolation: str = "linear") -> "GeneratorPath":
        t = _grid(times)
        return cls(t, [hamiltonian(s) for s in t], interpolation)

    @classmethod
    def constant(cls, h, duration: float, steps: int) -> "GeneratorPath":
        t = np.linspace(0.0, duration, steps + 1)
        return cls(t, np.repeat(np.asarray(h, dtype=np.complex128)[None], steps + 1, axis=0))

    def interval_generator(self, j: int, frac: float) -> np.ndarray:
        """Generator at ``t_j + frac (t_{j+1} - t_j)`` with ``0 <= frac <= 1``."""
        if self.interpolation == "hold":
            return self.generators[j]
        return (1 - frac) * self.generators[j] + frac * self.generators[j + 1]

    def refined(self, factor: int) -> "GeneratorPath":
        """Split every interval into ``factor`` equal parts without changing the drive."""
        if factor <= 1:
            return self
        frac = np.arange(factor) / factor
        t = self.times
        new_t = np.append((t[:-1, None] + frac[None, :] * np.diff(t)[:, None]).reshape(-1), t[-1])
        h0, h1 = self.generators[:-1], self.generators[1:]
        if self.interpolation == "hold":
            mids = np.repeat(h0, factor, axis=0)
        else:
            f = frac[None, :, None, None]
            mids = ((1 - f) * h0[:, None] + f * h1[:, None]).reshape(-1, self.dim, self.dim)
        return GeneratorPath(new_t, np.concatenate([mids, self.generators[-1:]]), self.interpolation)

    def reparametrized(self, s, ds) -> "GeneratorPath":
        """Same trajectory traversed at a different rate.

        ``s`` maps the new grid (same shape as ``times``) monotonically onto
        the old time interval and ``ds`` is its derivative; the new generator
        is ``ds(t) H(s(t))``.
        """
        from scipy.interpolate import interp1d

        kind = "previous" if self.interpolation == "hold" else "linear"
        h_of = interp1d(self.times, self.generators, axis=0, kind=kind, assume_sorted=True)
        new_t = self.times
        sv = np.clip(s(new_t), self.times[0], self.times[-1])
        return GeneratorPath(new_t, ds(new_t)[:, None, None] * h_of(sv), self.interpolation)


@dataclass(frozen=True, eq=False)
class UnitaryPath:
    """Unitaries ``U(t_j)`` on a time grid with ``U(t_0) = 1``.

    ``breaks`` lists grid indices where ``U'`` may be discontinuous (joints
    of piecewise drives); finite differences never straddle them.
    """

    times: np.ndarray
    unitaries: np.ndarray
    breaks: tuple = ()

    def __post_init__(self):
        t = _grid(self.times)
        u = _stack(self.unitaries, t.size, "unitaries")
        n = u.shape[1]
        err = max_abs(dagger(u) @ u - np.eye(n))
        if err > UNITARY_TOL:
            raise NonUnitaryInput(f"path entry deviates from unitarity by {err:.3e}")
        if max_abs(u[0] - np.eye(n)) > UNITARY_TOL:
            raise InvalidInput("unitary path must start at the identity")
        u[0] = np.eye(n)
        t.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "unitaries", u)
        object.__setattr__(self, "breaks", tuple(sorted({int(b) for b in self.breaks})))

    @property
    def dim(self) -> int:
        return self.unitaries.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.unitaries[-1]

    def __len__(self) -> int:
        return self.times.size

    @classmethod
    def identity(cls, n: int, times) -> "UnitaryPath":
        t = _grid(times)
        return cls(t, np.repeat(np.eye(n, dtype=np.complex128)[None], t.size, axis=0))


@dataclass(frozen=True)
class TransportDefect:
    """Largest violations of the parallel-transport conditions along a path.

    ``global_defect`` is ``max_t |Tr[rho(t) U'U^+]|``; ``eigen_defects[k]`` is
    ``max_t |<k(t)|U'U^+|k(t)>|`` with ``|k(t)> = U(t)|k>``.
    """

    global_defect: float
    eigen_defects: tuple

    def bound(self, weights) -> float:
        return float(np.dot(weights, self.eigen_defects))


def _expi(h: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i h dt)`` for Hermitian ``h``, unitary to rounding."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * vals * dt)) @ dagger(vecs)


def project_generator(h, frame) -> np.ndarray:
    """Remove the frame-diagonal part: ``H - sum_k <k|H|k> |k><k|``."""
    h = np.asarray(h, dtype=np.complex128)
    frame = np.asarray(frame, dtype=np.complex128)
    herm = max_abs(h - dagger(h))
    if herm > 1e-12:
        raise NonHermitianInput(f"generator deviates from Hermiticity by {herm:.3e}")
    if frame.shape != h.shape:
        raise DimensionMismatch(f"frame shape {frame.shape} does not match generator {h.shape}")
    check_orthonormal(frame)
    d = np.einsum("ik,ij,jk->k", frame.conj(), h, frame).real
    hp = h - (frame * d) @ dagger(frame)
    return 0.5 * (hp + dagger(hp))


def _substep_fracs(substeps: int) -> np.ndarray:
    if substeps < 1:
        raise InvalidInput("substeps must be >= 1")
    return np.arange(substeps + 1) / substeps


def integrate(gen: GeneratorPath, substeps: int = 1) -> UnitaryPath:
    """Time-ordered product of midpoint exponentials; second order in the step."""
    fracs = _substep_fracs(substeps)
    t = gen.times
    n = gen.dim
    out = np.empty((t.size, n, n), dtype=np.complex128)
    u = np.eye(n, dtype=np.complex128)
    out[0] = u
    for j in range(t.size - 1):
        dt = (t[j + 1] - t[j]) / substeps
        for s in range(substeps):
            mid = 0.5 * (fracs[s] + fracs[s + 1])
            u = _expi(gen.interval_generator(j, mid), dt) @ u
        out[j + 1] = u
    return UnitaryPath(t, out, gen.breaks)


def transport_evolution(rho0, gen: GeneratorPath, substeps: int = 1,
                        degeneracy_tol: float = DEGENERACY_TOL) -> UnitaryPath:
    """Parallel-transporting evolution along the trajectory generated by ``gen``.

    Each substep uses the generator at the substep midpoint, projected onto
    the eigenframe of the predicted midpoint state.  Under unitary evolution
    the eigenvectors of ``rho(t)`` are the propagated eigenvectors of
    ``rho0``, so the midpoint frame is obtained by a half-step propagation
    instead of a fresh diagonalisation; this keeps eigenvector labels
    continuous without any matching step.

    Raises :class:`~mixphase.errors.DegenerateSpectrum` for degenerate
    ``rho0``: the transport conditions do not fix ``U`` in that case (use
    :func:`frame_transport` with an explicit frame).
    """
    rho0 = _as_density(rho0)
    if rho0.dim != gen.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with generators of dimension {gen.dim}")
    frame0 = spectral(rho0, degeneracy_tol, strict=True).frame
    fracs = _substep_fracs(substeps)
    t = gen.times
    n = gen.dim
    out = np.empty((t.size, n, n), dtype=np.complex128)
    u = np.eye(n, dtype=np.complex128)
    out[0] = u
    for j in range(t.size - 1):
        dt = (t[j + 1] - t[j]) / substeps
        for s in range(substeps):
            h = gen.interval_generator(j, 0.5 * (fracs[s] + fracs[s + 1]))
            frame_mid = _expi(h, 0.5 * dt) @ u @ frame0
            d = np.einsum("ik,ij,jk->k", frame_mid.conj(), h, frame_mid).real
            hp = h - (frame_mid * d) @ dagger(frame_mid)
            u = _expi(0.5 * (hp + dagger(hp)), dt) @ u
        out[j + 1] = u
    return UnitaryPath(t, out, gen.breaks)


def frame_transport(frames, times, breaks=()) -> UnitaryPath:
    """Parallel transport built directly from a path of eigenframes.

    ``frames[j][:, k]`` is the k-th basis vector at ``times[j]``.  Each vector
    is rephased step by step so that consecutive overlaps are real positive,
    and ``U(t_j) = sum_k |k~(t_j)><k(0)|``.  Works for degenerate states as
    long as the caller supplies the frame.  ``breaks`` marks corners of the
    frame path, as for :class:`UnitaryPath`.
    """
    t = _grid(times)
    f = _stack(frames, t.size, "frames")
    for j, fr in enumerate(f):
        try:
            check_orthonormal(fr, FRAME_TOL)
        except NonOrthonormalFrame as exc:
            raise exc.with_context(f"frame at step {j}")
    n = f.shape[1]
    out = np.empty_like(f)
    out[0] = np.eye(n)
    prev = f[0]
    for j in range(1, t.size):
        ov = np.einsum("ik,ik->k", prev.conj(), f[j])
        bad = np.flatnonzero(np.abs(ov) <= FRAME_CONTINUITY)
        if bad.size:
            raise FrameDiscontinuity(
                f"|<k(t_{j-1})|k(t_{j})>| = {abs(ov[bad[0]]):.3f} for vector {bad[0]} at step {j}"
            )
        cur = f[j] * (np.abs(ov) / ov)
        out[j] = cur @ dagger(f[0])
        prev = cur
    return UnitaryPath(t, out, tuple(breaks))


# 4th-order stencils: central for the interior, one-sided for the two
# samples at each end of a segment.  Integer weights (divided by 12 h
# afterwards) keep the derivative of a constant path exactly zero.
_CENTRAL5 = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_FORWARD5 = np.array([[-25.0, 48.0, -36.0, 16.0, -3.0],
                      [-3.0, -10.0, 18.0, -6.0, 1.0]])


def _segment_derivative(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    h = np.diff(t)
    if y.shape[0] < 5 or np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        return np.gradient(y, t, axis=0, edge_order=2)
    h = 12.0 * (t[-1] - t[0]) / (t.size - 1)
    d = np.empty_like(y)
    d[2:-2] = sum(c * y[i:y.shape[0] - 4 + i] for i, c in enumerate(_CENTRAL5) if c) / h
    for k in range(2):
        d[k] = np.tensordot(_FORWARD5[k], y[:5], axes=1) / h
        d[-1 - k] = -np.tensordot(_FORWARD5[k], y[-1:-6:-1], axes=1) / h
    return d


def segments(n_samples: int, breaks=()) -> list[slice]:
    """Sample ranges between consecutive breaks; neighbours share the break sample."""
    cuts = [0] + sorted(b for b in set(breaks) if 0 < b < n_samples - 1) + [n_samples - 1]
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 2:
            raise PathTooShort(f"segment between breaks {a} and {b} has fewer than 3 samples")
        out.append(slice(a, b + 1))
    return out


def segment_derivatives(y, times, breaks=()):
    """Yield ``(slice, dy/dt)`` per smooth segment of a sampled path.

    Central differences in the interior, one-sided differences at the ends
    (4th order on uniform segments of at least 5 samples, 2nd order
    otherwise).  Derivatives never straddle a break, so a break sample gets
    one value from each side.
    """
    y = np.asarray(y)
    t = np.asarray(times, dtype=float)
    if y.shape[0] < 3:
        raise PathTooShort(f"need at least 3 samples, got {y.shape[0]}")
    for sl in segments(t.size, breaks):
        yield sl, _segment_derivative(y[sl], t[sl])


def piecewise_trapezoid(values_by_segment, times) -> float:
    """Trapezoidal integral of per-segment samples as yielded alongside :func:`segments`."""
    t = np.asarray(times, dtype=float)
    return float(sum(np.trapezoid(v, t[sl]) for sl, v in values_by_segment))


def _derivatives(path: UnitaryPath):
    if len(path) < 3:
        raise PathTooShort(f"need at least 3 samples, got {len(path)}")
    return segment_derivatives(path.unitaries, path.times, path.breaks)


def _frame_for(rho0, frame):
    if frame is not None:
        frame = np.asarray(frame, dtype=np.complex128)
        check_orthonormal(frame)
        return frame
    return spectral(rho0, strict=False).frame


def defect(rho0, path: UnitaryPath, frame=None) -> TransportDefect:
    """Finite-difference check of the transport conditions.

    ``frame`` fixes the eigenbasis of ``rho0`` used for the per-eigenstate
    defects; by default the eigenbasis from :func:`~mixphase.core.spectral`
    (arbitrary within degenerate groups).
    """
    rho0 = _as_density(rho0)
    if rho0.dim != path.dim:
        raise DimensionMismatch(f"state of dimension {rho0.dim} with path of dimension {path.dim}")
    frame = _frame_for(rho0, frame)
    g_max, e_max = 0.0, np.zeros(rho0.dim)
    for sl, udot in _derivatives(path):
        u = path.unitaries[sl]
        gen = udot @ dagger(u)
        rho_t = u @ rho0.matrix @ dagger(u)
        g_max = max(g_max, float(np.max(np.abs(np.einsum("tij,tji->t", rho_t, gen)))))
        k_t = u @ frame
        e = np.abs(np.einsum("tik,tij,tjk->tk", k_t.conj(), gen, k_t))
        e_max = np.maximum(e_max, e.max(axis=0))
    return TransportDefect(g_max, tuple(float(x) for x in e_max))


def dynamical_phase(rho0, path: UnitaryPath) -> float:
    """``-i int Tr[rho0 U^+ U'] dt`` by the trapezoidal rule."""
    rho0 = _as_density(rho0)
    parts, stray = [], 0.0
    for sl, udot in _derivatives(path):
        integrand = -1j * np.einsum("ij,tkj,tki->t", rho0.matrix, path.unitaries[sl].conj(), udot)
        stray = max(stray, float(np.max(np.abs(integrand.imag))))
        parts.append((sl, integrand.real))
    if stray > 1e-10:
        log.debug("discarding imaginary part %.3e of dynamical-phase integrand", stray)
    return piecewise_trapezoid(parts, path.times)
