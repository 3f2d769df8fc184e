"""Qubit specialisation: Bloch vectors, geodesic polygons and closed forms.

Conventions
-----------
* ``rho = (1 + r n.sigma) / 2`` with ``0 <= r <= 1`` and ``|n| = 1``.
* Solid angles are signed by traversal order: a loop running counterclockwise
  when seen from outside the sphere encloses a positive solid angle.  With
  this orientation the "+" eigenstate picks up the phase ``-Omega/2``.
* Each geodesic arc of a :class:`SpherePath` is traversed in unit time by the
  constant generator ``(theta/2) m.sigma`` where ``theta`` is the arc length
  and ``m`` the normalised cross product of its endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import DensityOperator, fix_frame_phases, principal_arg
from .errors import AntipodalWaypoints, InvalidBlochVector, InvalidInput, UndefinedPhase
from .interferometry import PHASE_TOL, InterferenceProfile
from .transport import GeneratorPath

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

_ANTIPODAL_TOL = 1e-12
_SAME_POINT_TOL = 1e-12


def _unit(v, what="direction") -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise InvalidBlochVector(f"{what} must be a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if n == 0:
        raise InvalidBlochVector(f"{what} has zero length")
    return v / n


def sigma_dot(n) -> np.ndarray:
    return np.tensordot(np.asarray(n, dtype=float), PAULI, axes=1)


@dataclass(frozen=True, eq=False)
class BlochState:
    r: float
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(-1)
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1) > 1e-12:
            raise InvalidBlochVector(f"direction must be a unit 3-vector, got {d.tolist()}")
        if not 0.0 <= self.r <= 1.0:
            raise InvalidBlochVector(f"purity radius r = {self.r} outside [0, 1]")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @classmethod
    def from_vector(cls, r: float, direction) -> "BlochState":
        return cls(float(r), _unit(direction))


def bloch_density(state: BlochState) -> DensityOperator:
    return DensityOperator(0.5 * (np.eye(2) + state.r * sigma_dot(state.direction)))


def eigenframe(n) -> np.ndarray:
    """Columns ``|+; n.sigma>`` and ``|-; n.sigma>`` with the package phase convention."""
    x, y, z = _unit(n)
    # two algebraically equivalent forms; pick the better-conditioned one
    plus = np.array([1 + z, x + 1j * y]) if z >= 0 else np.array([x - 1j * y, 1 - z])
    plus = plus / np.linalg.norm(plus)
    minus = np.array([-np.conj(plus[1]), np.conj(plus[0])])
    return fix_frame_phases(np.column_stack([plus, minus]))


@dataclass(frozen=True, eq=False)
class SpherePath:
    """Waypoints joined by great-circle arcs.

    ``closed`` appends the arc from the last waypoint back to the first (if
    they differ).  ``samples_per_arc`` is the number of time steps per arc.
    """

    waypoints: np.ndarray
    closed: bool = True
    samples_per_arc: int = 2000

    def __post_init__(self):
        pts = np.asarray(self.waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise InvalidInput("need at least two 3-vector waypoints")
        pts = np.array([_unit(p, "waypoint") for p in pts])
        if self.samples_per_arc < 1:
            raise InvalidInput("samples_per_arc must be >= 1")
        pts.setflags(write=False)
        object.__setattr__(self, "waypoints", pts)
        for a, b in self.arcs():
            if np.dot(a, b) < -1 + _ANTIPODAL_TOL:
                raise AntipodalWaypoints(f"waypoints {a.tolist()} and {b.tolist()} are antipodal")

    def arcs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        pts = list(self.waypoints)
        if self.closed and np.linalg.norm(pts[-1] - pts[0]) > _SAME_POINT_TOL:
            pts.append(pts[0])
        return [(a, b) for a, b in zip(pts[:-1], pts[1:]) if np.linalg.norm(b - a) > _SAME_POINT_TOL]


def _triangle_excess(a, b, c) -> float:
    # signed area of a geodesic triangle (Van Oosterom & Strackee)
    num = float(np.dot(a, np.cross(b, c)))
    den = 1.0 + float(np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
    return 2.0 * math.atan2(num, den)


def solid_angle(path: SpherePath) -> float:
    """Signed solid angle of the geodesic polygon, in (-2 pi, 2 pi].

    Open paths are closed by the geodesic between their endpoints.  The
    polygon is fanned out from the direction of its vector area, which lies
    inside small loops and on the enclosed side of great circles.
    """
    verts = [a for a, _ in SpherePath(path.waypoints, True, path.samples_per_arc).arcs()]
    if len(verts) < 3:
        return 0.0
    area = sum(np.cross(a, b) for a, b in zip(verts, verts[1:] + verts[:1]))
    norm = np.linalg.norm(area)
    if norm < 1e-12:
        return 0.0
    p = area / norm
    omega = sum(_triangle_excess(p, a, b) for a, b in zip(verts, verts[1:] + verts[:1]))
    if omega > 2 * math.pi + 1e-9:
        omega -= 4 * math.pi
    elif omega <= -2 * math.pi - 1e-9:
        omega += 4 * math.pi
    return float(omega)


def qubit_phase_closed_form(r: float, omega: float, phase_tol: float = PHASE_TOL) -> float:
    """Mixed-qubit geometric phase ``arg[cos(Omega/2) - i r sin(Omega/2)]``.

    Branch-resolved version of ``-arctan(r tan(Omega/2))``, valid for every
    ``Omega``.
    """
    z = complex(math.cos(omega / 2), -r * math.sin(omega / 2))
    if abs(z) < phase_tol:
        raise UndefinedPhase(f"Tr[rho0 U] vanishes for r = {r}, Omega = {omega}")
    return principal_arg(z)


def qubit_visibility_closed_form(r: float, omega: float, eta: float = 1.0) -> float:
    """``eta sqrt(cos^2(Omega/2) + r^2 sin^2(Omega/2))``; ``eta = 1`` for cyclic paths."""
    return eta * math.sqrt(math.cos(omega / 2) ** 2 + r**2 * math.sin(omega / 2) ** 2)


def unpolarized_profile(omega: float, chi_grid, phase_tol: float = PHASE_TOL) -> InterferenceProfile:
    """Fringes of a maximally mixed qubit: ``(1/2)[1 + cos(Omega/2) cos chi]``."""
    chi = np.asarray(chi_grid, dtype=float)
    c = math.cos(omega / 2)
    phase = (0.0 if c > 0 else math.pi) if abs(c) >= phase_tol else None
    return InterferenceProfile(chi, 0.5 * (1 + c * np.cos(chi)), phase, abs(c))


def rotate(v, axis, angle: float) -> np.ndarray:
    """Rodrigues rotation of ``v`` about the unit ``axis`` (right-handed)."""
    v, k = np.asarray(v, dtype=float), np.asarray(axis, dtype=float)
    return v * math.cos(angle) + np.cross(k, v) * math.sin(angle) + k * np.dot(k, v) * (1 - math.cos(angle))


class GeodesicDrive(NamedTuple):
    generators: GeneratorPath
    frames: np.ndarray
    directions: np.ndarray
    rho0: DensityOperator

    @property
    def breaks(self) -> tuple:
        """Grid indices of the polygon corners."""
        return self.generators.breaks


def geodesic_generator_path(path: SpherePath, r: float = 1.0) -> GeodesicDrive:
    """Piecewise-constant generators that drag the Bloch vector along ``path``.

    Returns the generator path (``interpolation="hold"``), the eigenframes
    ``|+-; n(t).sigma>`` at every grid point, the Bloch directions ``n(t)``,
    and the initial state of purity ``r``.
    """
    arcs = path.arcs()
    if not arcs:
        raise InvalidInput("path has no arcs of nonzero length")
    s = path.samples_per_arc
    times, gens, dirs = [], [], []
    for i, (a, b) in enumerate(arcs):
        c = np.cross(a, b)
        theta = math.atan2(np.linalg.norm(c), float(np.dot(a, b)))
        m = c / np.linalg.norm(c)
        h = 0.5 * theta * sigma_dot(m)
        for j in range(s):
            times.append(i + j / s)
            gens.append(h)
            dirs.append(rotate(a, m, theta * j / s))
    times.append(float(len(arcs)))
    gens.append(gens[-1])
    dirs.append(arcs[-1][1])
    dirs = np.array([d / np.linalg.norm(d) for d in dirs])
    frames = np.array([eigenframe(d) for d in dirs])
    rho0 = bloch_density(BlochState(float(r), dirs[0]))
    return GeodesicDrive(GeneratorPath(np.array(times), np.array(gens), "hold"), frames, dirs, rho0)


class EtaCheck(NamedTuple):
    """Pure-path visibilities of the two eigenstate paths of a qubit."""

    eta_plus: float
    eta_minus: float
    tol: float = 1e-9

    @property
    def gap(self) -> float:
        return abs(self.eta_plus - self.eta_minus)

    @property
    def consistent(self) -> bool:
        return self.gap <= self.tol


def eigenpath_visibilities(report, tol: float = 1e-9) -> EtaCheck:
    """Compare ``|<+|U|+>|`` and ``|<-|U|->|`` from a qubit :class:`PhaseReport`.

    The two are expected to coincide for paths of the form used here; a gap
    above ``tol`` is reported through :attr:`EtaCheck.consistent` rather than
    silently averaged away.
    """
    terms = report.per_eigenstate
    if len(terms) != 2:
        raise InvalidInput(f"expected a qubit report, got {len(terms)} eigenstates")
    return EtaCheck(terms[0].visibility, terms[1].visibility, tol)
