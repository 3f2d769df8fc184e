"""Density operators, unitaries and spectral decompositions.

All objects are immutable: constructors validate and copy their input and
mark the stored arrays read-only.  Matrices are dense ``complex128`` arrays.

Frames are stored the way :func:`numpy.linalg.eigh` returns them, as a square
matrix whose *columns* are the basis vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidDensity,
    NonOrthonormalFrame,
    NonStochasticWeights,
    NonUnitaryInput,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12
UNITARY_TOL = 1e-10
FRAME_TOL = 1e-10
WEIGHT_TOL = 1e-10
DEGENERACY_TOL = 1e-8


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def _square(a, what: str) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"{what} must be a nonempty square matrix, got shape {arr.shape}")
    return arr


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def principal_arg(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi]."""
    z = complex(z)
    a = math.atan2(z.imag, z.real)
    return math.pi if a == -math.pi else a + 0.0  # + 0.0 turns -0.0 into 0.0


def wrap_phase(x: float) -> float:
    """Map an angle to (-pi, pi]."""
    y = math.remainder(float(x), 2 * math.pi)
    return math.pi if y == -math.pi else y + 0.0


def fix_frame_phases(frame: np.ndarray) -> np.ndarray:
    """Rephase every column so that its largest-magnitude entry is real positive."""
    frame = np.array(frame, dtype=np.complex128, copy=True)
    for k in range(frame.shape[1]):
        col = frame[:, k]
        j = int(np.argmax(np.abs(col)))
        if abs(col[j]) > 0:
            frame[:, k] = col * (abs(col[j]) / col[j])
            frame[j, k] = abs(col[j])
    return frame


def check_orthonormal(frame: np.ndarray, tol: float = FRAME_TOL) -> float:
    frame = _square(frame, "frame")
    err = max_abs(dagger(frame) @ frame - np.eye(frame.shape[0]))
    if err > tol:
        raise NonOrthonormalFrame(f"frame deviates from orthonormality by {err:.3e} (tol {tol:.0e})")
    return err


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite N x N matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix, "density matrix")
        herm = max_abs(m - dagger(m))
        if herm > HERMITIAN_TOL:
            raise InvalidDensity(f"matrix is not Hermitian (max |rho - rho^+| = {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidDensity(f"trace is {tr.real:.17g}, expected 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_TOL:
            raise InvalidDensity(f"matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def expectation(self, op) -> complex:
        return complex(np.trace(self.matrix @ np.asarray(op)))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix, "unitary")
        err = max_abs(dagger(m) @ m - np.eye(m.shape[0]))
        if err > UNITARY_TOL:
            raise NonUnitaryInput(f"matrix is not unitary (max |U^+U - 1| = {err:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def identity(cls, n: int) -> "UnitaryOperator":
        return cls(np.eye(n))

    def adjoint(self) -> "UnitaryOperator":
        return UnitaryOperator(dagger(self.matrix))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-decomposition of a density operator.

    ``weights`` are sorted in descending order and ``frame[:, k]`` is the
    eigenvector belonging to ``weights[k]``.  ``degenerate_groups`` is empty
    unless the decomposition was requested with ``strict=False`` on a
    degenerate spectrum, in which case the frame within each group is
    arbitrary.
    """

    weights: np.ndarray
    frame: np.ndarray
    degenerate_groups: tuple = field(default=())

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "frame", _frozen(self.frame))

    @property
    def dim(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        return (self.frame * self.weights) @ dagger(self.frame)


def _as_density(rho) -> DensityOperator:
    return rho if isinstance(rho, DensityOperator) else DensityOperator(rho)


def _as_unitary(u) -> UnitaryOperator:
    return u if isinstance(u, UnitaryOperator) else UnitaryOperator(u)


def make_density(weights, frame) -> DensityOperator:
    """Build ``sum_k w_k |k><k|``.

    Parameters
    ----------
    weights : sequence of float
        Probabilities; nonnegative and summing to one within 1e-10.
    frame : (N, N) array_like
        Orthonormal basis, one vector per *column*.
    """
    w = np.asarray(weights, dtype=float).reshape(-1)
    f = np.asarray(frame, dtype=np.complex128)
    if f.ndim == 1 and w.size == 1:
        f = f.reshape(1, 1)
    f = _square(f, "frame")
    if f.shape[0] != w.size:
        raise DimensionMismatch(f"{w.size} weights for a frame of dimension {f.shape[0]}")
    if np.any(w < -WEIGHT_TOL) or abs(w.sum() - 1) > WEIGHT_TOL:
        raise NonStochasticWeights(f"weights {w.tolist()} are not a probability vector")
    check_orthonormal(f)
    w = np.clip(w, 0.0, 1.0)
    m = (f * w) @ dagger(f)
    return DensityOperator(0.5 * (m + dagger(m)))


def degenerate_groups(values, tol: float) -> list[list[int]]:
    """Group indices of (sorted) values whose consecutive gaps are below ``tol``."""
    groups, current = [], [0]
    for i in range(1, len(values)):
        if abs(values[i - 1] - values[i]) < tol:
            current.append(i)
        else:
            if len(current) > 1:
                groups.append(current)
            current = [i]
    if len(current) > 1:
        groups.append(current)
    return groups


def spectral(rho, tol: float = DEGENERACY_TOL, strict: bool = True) -> SpectralDecomposition:
    """Eigen-decomposition with descending weights and a deterministic phase convention.

    Raises :class:`DegenerateSpectrum` when any two eigenvalues are closer than
    ``tol`` unless ``strict`` is false, in which case the groups are recorded on
    the result instead.
    """
    rho = _as_density(rho)
    vals, vecs = np.linalg.eigh(rho.matrix)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    groups = degenerate_groups(vals, tol)
    if groups and strict:
        raise DegenerateSpectrum(groups)
    w = np.clip(vals, 0.0, 1.0)
    return SpectralDecomposition(w, fix_frame_phases(vecs), tuple(tuple(g) for g in groups))


def evolve(rho, u) -> DensityOperator:
    """Return ``U rho U^+``."""
    rho, u = _as_density(rho), _as_unitary(u)
    if rho.dim != u.dim:
        raise DimensionMismatch(f"state of dimension {rho.dim} with unitary of dimension {u.dim}")
    m = u.matrix @ rho.matrix @ dagger(u.matrix)
    return DensityOperator(0.5 * (m + dagger(m)))
