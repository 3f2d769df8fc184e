import math

import numpy as np
import pytest
from hypothesis import given, settings

from mixphase.bloch import SpherePath, eigenframe, geodesic_generator_path
from mixphase.core import dagger, make_density, principal_arg
from mixphase.errors import (
    DegenerateSpectrum,
    NodalPoint,
    NotParallelTransported,
    OrthogonalEndpoints,
    StepTooCoarse,
)
from mixphase.holonomy import (
    PhaseReport,
    analyze,
    average_connection,
    geometric_phase_integral,
    geometric_phase_trace,
    pure_state_phase,
    reference_gauge,
)
from mixphase.sampling import random_density, random_generator_path
from mixphase.transport import GeneratorPath, UnitaryPath, frame_transport, integrate, transport_evolution

from strategies import dims, seeds

OCTANT = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
EQUATOR = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float)


def octant_run(r, steps=2000):
    drive = geodesic_generator_path(SpherePath(OCTANT, True, steps), r)
    return drive, transport_evolution(drive.rho0, drive.generators)


def test_mixed_octant_reference_value():
    drive, path = octant_run(0.5)
    rep = analyze(drive.rho0, path)
    # arg(cos(pi/4) - 0.5 i sin(pi/4)) = -arctan(0.5)
    assert rep.gamma_g_trace == pytest.approx(-0.46364760900080615, abs=1e-12)
    assert rep.gamma_g_integral == pytest.approx(-0.46364760900080615, abs=1e-6)
    assert rep.gamma_g_connection == pytest.approx(rep.gamma_g_integral, abs=1e-9)
    assert rep.visibility == pytest.approx(math.sqrt(0.5 + 0.25 * 0.5), abs=1e-9)
    assert abs(rep.gamma_d) < 1e-9
    assert rep.parallel_transported
    assert rep.route_gap < 1e-5
    assert rep.route[-2:] == ("gauge-integral", "average-connection")


def test_pure_octant_is_minus_quarter_pi():
    drive, path = octant_run(1.0)
    assert geometric_phase_trace(drive.rho0, path) == pytest.approx(-math.pi / 4, abs=1e-12)


def test_unprojected_drive_is_not_labelled_geometric():
    rho = make_density([0.75, 0.25], eigenframe([math.sin(1), 0, math.cos(1)]))
    path = integrate(GeneratorPath.constant(0.5 * np.diag([1.0, -1.0]), 2 * math.pi, 400))
    with pytest.raises(NotParallelTransported):
        geometric_phase_trace(rho, path)
    rep = analyze(rho, path)
    assert rep.gamma_g_trace is None and rep.gamma_g_integral is None
    assert rep.total_phase is not None
    assert abs(rep.gamma_d) > 0.1
    assert not rep.parallel_transported
    assert rep.route_gap is None


def test_nodal_point_is_located():
    # maximally mixed state, frame transported round the equator: Tr U(t)
    # vanishes exactly halfway (a half turn about the pole)
    drive = geodesic_generator_path(SpherePath(EQUATOR, True, 200), 0.0)
    path = frame_transport(drive.frames, drive.generators.times, drive.breaks)
    with pytest.raises(NodalPoint) as info:
        reference_gauge(drive.rho0, path)
    assert info.value.index == 400
    assert info.value.time == pytest.approx(2.0)
    rep = analyze(drive.rho0, path, frame=drive.frames[0])
    assert rep.gamma_g_trace == pytest.approx(math.pi, abs=1e-9)
    assert rep.gamma_g_integral is None
    assert any("NodalPoint" in r for r in rep.route)


def test_coarse_grid_is_refused():
    rho = make_density([0.6, 0.4], np.eye(2))
    t = np.linspace(0, 16, 17)
    u = np.array([np.diag([np.exp(-0.3j * s), np.exp(0.3j * s)]) for s in t])
    with pytest.raises(StepTooCoarse):
        geometric_phase_integral(rho, UnitaryPath(t, u))


def test_connection_needs_frame_for_degenerate_state():
    rho = make_density([0.5, 0.5], np.eye(2))
    path = UnitaryPath.identity(2, np.linspace(0, 1, 17))
    with pytest.raises(DegenerateSpectrum):
        average_connection(rho, path)
    assert average_connection(rho, path, frame=np.eye(2)).weighted_sum == 0.0


def test_pure_state_phase_latitude_circle(rng):
    theta = math.pi / 3
    phi = np.linspace(0, 2 * math.pi, 4001)
    states = np.column_stack([np.full_like(phi, math.cos(theta / 2)),
                              math.sin(theta / 2) * np.exp(1j * phi)]).astype(complex)
    states *= np.exp(1j * rng.uniform(0, 2 * math.pi, phi.size))[:, None]  # arbitrary gauge
    omega = 2 * math.pi * (1 - math.cos(theta))
    assert pure_state_phase(states) == pytest.approx(-omega / 2, abs=1e-6)


def test_pure_state_phase_of_geodesic_is_zero_in_any_gauge():
    a = np.linspace(0, 1.0, 50)
    states = np.column_stack([np.cos(a), np.sin(a)]).astype(complex)  # already transported
    assert pure_state_phase(states) == 0.0
    rephased = states * np.exp(1j * np.linspace(0, 2.5, 50))[:, None]
    assert pure_state_phase(rephased) == pytest.approx(0.0, abs=1e-14)


def test_pure_state_phase_orthogonal_endpoints():
    with pytest.raises(OrthogonalEndpoints):
        pure_state_phase(np.array([[1, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)], [0, 1]], dtype=complex))


def test_report_fields_are_complete():
    drive, path = octant_run(0.25, steps=200)
    rep = analyze(drive.rho0, path, route=("transport_evolution",))
    assert isinstance(rep, PhaseReport)
    assert rep.route[0] == "transport_evolution"
    assert len(rep.per_eigenstate) == 2
    assert [t.weight for t in rep.per_eigenstate] == pytest.approx([0.625, 0.375], abs=1e-12)


@settings(max_examples=8)
@given(dims, seeds)
def test_eigenstate_decomposition_of_trace(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(n, rng)
    path = transport_evolution(rho, random_generator_path(n, rng, steps=100))
    rep = analyze(rho, path)
    z = sum(t.weight * t.visibility * np.exp(1j * t.phase) for t in rep.per_eigenstate)
    assert abs(z - np.trace(rho.matrix @ path.final)) < 1e-12


@settings(max_examples=6)
@given(dims, seeds)
def test_gauge_invariance_under_diagonal_terms(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(n, rng)
    gen = random_generator_path(n, rng, steps=2000)
    raw = integrate(gen)
    # f(t) rho(t) is diagonal in the instantaneous eigenframe
    f = 3.0 * np.sin(5 * gen.times) + 1.0
    rho_t = raw.unitaries @ rho.matrix @ dagger(raw.unitaries)
    d = f[:, None, None] * rho_t
    d = 0.5 * (d + dagger(d))
    gauged = GeneratorPath(gen.times, gen.generators + d)
    g1 = geometric_phase_trace(rho, transport_evolution(rho, gen))
    g2 = geometric_phase_trace(rho, transport_evolution(rho, gauged))
    assert abs(math.remainder(g1 - g2, 2 * math.pi)) < 1e-6


def test_reference_gauge_makes_trace_real_positive():
    drive, path = octant_run(0.5, steps=300)
    w = reference_gauge(drive.rho0, path)
    z = np.array([np.trace(drive.rho0.matrix @ dagger(wt)) for wt in w])
    assert np.max(np.abs(z.imag)) < 1e-14 and np.min(z.real) > 0
    np.testing.assert_array_equal(w[0], np.eye(2))


def test_identity_path_routes_are_zero():
    rho = make_density([0.7, 0.3], np.eye(2))
    path = UnitaryPath.identity(2, np.linspace(0, 1, 33))
    assert geometric_phase_trace(rho, path) == 0.0
    assert geometric_phase_integral(rho, path) == 0.0
    assert average_connection(rho, path).per_state == (0.0, 0.0)


def test_pure_state_reductions_agree():
    drive, path = octant_run(1.0)
    states = path.unitaries[:, :, 0]
    trace = geometric_phase_trace(drive.rho0, path)
    assert pure_state_phase(states) == pytest.approx(trace, abs=1e-8)
    conn = average_connection(drive.rho0, path, frame=drive.frames[0])
    assert conn.per_state[0] == pytest.approx(-math.pi / 4, abs=1e-8)
    # the reference section of the pure state is W|psi(0)>
    w = reference_gauge(drive.rho0, path)
    chi = w[:, :, 0]
    overlaps = np.einsum("ti,ti->t", chi[:1].conj(), chi)
    assert np.max(np.abs(overlaps.imag)) < 1e-12
