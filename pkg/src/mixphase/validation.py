"""Randomized property batches.

Each batch draws its inputs from a seeded generator, runs the pipeline, and
records the worst deviation for every property it checks.  The results are
plain records so that the CLI, the test-suite and the demos can all print or
assert on them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import holonomy, interferometry, purification, transport
from .core import principal_arg, wrap_phase
from .sampling import random_density, random_generator_path, random_unitary

CHI_SAMPLES = 64
MIN_VISIBILITY = 1e-3


@dataclass(frozen=True)
class Check:
    name: str
    worst: float
    tol: float
    cases: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.worst < self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = f" ({self.note})" if self.note else ""
        return f"{status} {self.name}: worst {self.worst:.3e} < {self.tol:.0e} over {self.cases} cases{note}"


@dataclass(frozen=True)
class TransportCase:
    dim: int
    gamma_d: float
    global_defect: float
    eigen_bound: float
    min_visibility: float
    trace: float | None
    integral: float | None
    connection: float | None


def transport_case(dim: int, rng: np.random.Generator, steps: int = 2000, substeps: int = 1) -> TransportCase:
    """One random state driven by a random smooth generator path under transport."""
    rho0 = random_density(dim, rng)
    gen = random_generator_path(dim, rng, steps)
    path = transport.transport_evolution(rho0, gen, substeps)
    d = transport.defect(rho0, path)
    gd = transport.dynamical_phase(rho0, path)
    nu_min = float(np.min(np.abs(np.einsum("ij,tji->t", rho0.matrix, path.unitaries))))
    trace = integral = connection = None
    if nu_min > MIN_VISIBILITY:
        trace = holonomy.geometric_phase_trace(rho0, path, transport_tol=math.inf)
        integral = holonomy.geometric_phase_integral(rho0, path)
        connection = holonomy.average_connection(rho0, path).weighted_sum
    w = np.sort(np.linalg.eigvalsh(rho0.matrix))[::-1]
    return TransportCase(dim, gd, d.global_defect, d.bound(w), nu_min, trace, integral, connection)


def transport_batch(seed: int = 0, qubits: int = 20, qutrits: int = 10, steps: int = 2000) -> list[TransportCase]:
    rng = np.random.default_rng(seed)
    return [transport_case(n, rng, steps) for n in [2] * qubits + [3] * qutrits]


def transport_checks(cases: list[TransportCase], transport_tol: float = holonomy.TRANSPORT_TOL,
                     integral_tol: float = holonomy.INTEGRAL_TOL) -> list[Check]:
    n = len(cases)
    routed = [c for c in cases if c.trace is not None]
    skipped = n - len(routed)
    note = f"{skipped} skipped for visibility <= {MIN_VISIBILITY:g}" if skipped else ""
    return [
        Check("dynamical phase |gamma_d|", max(abs(c.gamma_d) for c in cases), transport_tol, n),
        Check("global transport defect", max(c.global_defect for c in cases), transport_tol, n),
        Check("trace vs gauge integral", max((abs(wrap_phase(c.trace - c.integral)) for c in routed),
                                              default=0.0), integral_tol, len(routed), note),
        Check("gauge integral vs average connection", max((abs(c.integral - c.connection) for c in routed),
                                                           default=0.0), 1e-9, len(routed), note),
    ]


@dataclass(frozen=True)
class PurificationCase:
    dim: int
    overlap_error: float
    transport_gap: float


def purification_batch(seed: int = 0, count: int = 50, steps: int = 400) -> list[PurificationCase]:
    """Random (rho0, U) with dimensions cycling through 2, 3, 4."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = 2 + i % 3
        rho0 = random_density(n, rng)
        u = random_unitary(n, rng)
        err = abs(purification.purified_overlap(rho0, u) - complex(np.trace(u.matrix @ rho0.matrix)))
        path = transport.transport_evolution(rho0, random_generator_path(n, rng, steps))
        gap = abs(purification.purified_transport_check(rho0, path) - transport.defect(rho0, path).global_defect)
        out.append(PurificationCase(n, float(err), float(gap)))
    return out


def purification_checks(cases: list[PurificationCase]) -> list[Check]:
    n = len(cases)
    return [
        Check("purified overlap vs Tr(U rho0)", max(c.overlap_error for c in cases), 1e-12, n),
        Check("purified transport check vs defect", max(c.transport_gap for c in cases), 1e-9, n),
    ]


@dataclass(frozen=True)
class InterferenceCase:
    dim: int
    phase_error: float
    visibility_error: float
    average_phase_error: float
    average_visibility_error: float


def interference_case(rho0, u, chi_samples: int = CHI_SAMPLES) -> InterferenceCase:
    exact = interferometry.phase_visibility(rho0, u)
    chi = 2 * np.pi * np.arange(chi_samples) / chi_samples
    sim = interferometry.simulate_profile(rho0, u, chi)
    weights, pairs = interferometry.eigenstate_fringes(rho0, u)
    avg = interferometry.incoherent_average_profile(weights, pairs, chi)
    return InterferenceCase(
        rho0.dim,
        abs(wrap_phase(sim.phase - exact.phase)),
        abs(sim.visibility - exact.visibility),
        abs(wrap_phase(avg.phase - exact.phase)),
        abs(avg.visibility - exact.visibility),
    )


def interference_batch(seed: int = 0, count: int = 30, chi_samples: int = CHI_SAMPLES) -> list[InterferenceCase]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = 2 + len(out) % 3
        rho0, u = random_density(n, rng), random_unitary(n, rng)
        if abs(np.trace(u.matrix @ rho0.matrix)) < MIN_VISIBILITY:
            continue  # phase of a near-nodal fringe is not a meaningful comparison
        out.append(interference_case(rho0, u, chi_samples))
    return out


def interference_checks(cases: list[InterferenceCase]) -> list[Check]:
    n = len(cases)
    return [
        Check("fitted scan vs (arg, |Tr(U rho0)|)",
              max(max(c.phase_error, c.visibility_error) for c in cases), 1e-9, n),
        Check("eigenstate average vs (arg, |Tr(U rho0)|)",
              max(max(c.average_phase_error, c.average_visibility_error) for c in cases), 1e-9, n),
    ]


@dataclass(frozen=True)
class ConeStudy:
    """Precession of a tilted Bloch vector about z under projected transport."""

    polar: float
    r: float
    steps: tuple
    errors: tuple = field(default=())

    @property
    def ratios(self) -> tuple:
        e = self.errors
        return tuple(a / b for a, b in zip(e[:-1], e[1:]))


def cone_closed_form(polar: float, r: float) -> float:
    omega = 2 * math.pi * (1 - math.cos(polar))
    return principal_arg(complex(math.cos(omega / 2), -r * math.sin(omega / 2)))


def cone_error(polar: float, r: float, steps: int) -> float:
    from .bloch import BlochState, bloch_density

    n = [math.sin(polar), 0.0, math.cos(polar)]
    rho0 = bloch_density(BlochState.from_vector(r, n))
    h = 0.5 * np.diag([1.0, -1.0]).astype(np.complex128)
    gen = transport.GeneratorPath.constant(h, 2 * math.pi, steps)
    path = transport.transport_evolution(rho0, gen)
    phase = principal_arg(complex(np.trace(rho0.matrix @ path.final)))
    return abs(wrap_phase(phase - cone_closed_form(polar, r)))


CONE_CASES = ((math.pi / 3, 0.5), (math.pi / 4, 0.8), (5 * math.pi / 9, 0.3))


def convergence_studies(base_steps: int = 50, levels: int = 3, cases=CONE_CASES) -> list[ConeStudy]:
    steps = tuple(base_steps * 2**k for k in range(levels))
    return [ConeStudy(p, r, steps, tuple(cone_error(p, r, s) for s in steps)) for p, r in cases]


def run_all(seed: int = 0, steps: int = 2000) -> list[Check]:
    """Every randomized batch at its default size, in a fixed order."""
    checks = transport_checks(transport_batch(seed, steps=steps))
    checks += purification_checks(purification_batch(seed))
    checks += interference_checks(interference_batch(seed))
    return checks
