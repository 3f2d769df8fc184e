import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixphase.core import DensityOperator, dagger, make_density
from mixphase.errors import DimensionMismatch, InvalidInput, NonStochasticWeights, UndefinedPhase
from mixphase.interferometry import (
    ELEMENTS,
    branch_unitary,
    chi_scan,
    eigenstate_fringes,
    fit_fringe,
    four_term_output,
    incoherent_average_profile,
    intensity_along_0,
    mach_zehnder_output,
    phase_visibility,
    simulate_profile,
)
from mixphase.sampling import random_density, random_unitary

from strategies import density_and_unitary

SIGMA_Z = np.diag([1.0, -1.0])
PURE_UP = make_density([1.0, 0.0], np.eye(2))
MIXED = make_density([0.75, 0.25], np.eye(2))


def test_identity_gives_full_bright_port():
    assert intensity_along_0(mach_zehnder_output(MIXED, np.eye(2), 0.0)) == 1.0


def test_identity_profile_is_one_plus_cos():
    chi = np.linspace(0, 2 * np.pi, 9)
    np.testing.assert_allclose(chi_scan(MIXED, np.eye(2), chi), 0.5 * (1 + np.cos(chi)), atol=1e-15)


def test_sigma_z_on_mixed_state():
    # Tr(sigma_z rho) = 0.75 - 0.25 = 0.5
    pv = phase_visibility(MIXED, SIGMA_Z)
    assert pv.phase == 0.0
    assert pv.visibility == pytest.approx(0.5, abs=1e-15)


def test_pi_shift_of_pure_state():
    pv = phase_visibility(PURE_UP, np.diag([-1.0, 1.0]))
    assert pv.phase == math.pi
    assert pv.visibility == pytest.approx(1.0, abs=1e-15)


def test_unpolarized_sigma_z_is_nodal():
    rho = make_density([0.5, 0.5], np.eye(2))
    with pytest.raises(UndefinedPhase):
        phase_visibility(rho, SIGMA_Z)
    prof = simulate_profile(rho, SIGMA_Z, np.linspace(0, 2 * np.pi, 16, endpoint=False))
    assert prof.phase is None
    np.testing.assert_allclose(prof.intensity, 0.5, atol=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mach_zehnder_output(MIXED, np.eye(3), 0.0)


def test_elements_are_unitary():
    for m in (ELEMENTS.mirror, ELEMENTS.beam_splitter, ELEMENTS.phase_shifter(0.3)):
        np.testing.assert_allclose(dagger(m) @ m, np.eye(2), atol=1e-15)


def test_branch_unitary_blocks(rng):
    u = random_unitary(3, rng).matrix
    b = branch_unitary(u, 0.7).matrix
    np.testing.assert_allclose(b[:3, :3], np.exp(0.7j) * np.eye(3), atol=1e-15)
    np.testing.assert_allclose(b[3:, 3:], u, atol=1e-15)
    assert np.all(b[:3, 3:] == 0)


def test_fit_fringe_three_point_exact():
    chi = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    y = 0.5 * (1 + 0.4 * np.cos(chi - 1.1))
    phase, nu = fit_fringe(chi, y)
    assert phase == pytest.approx(1.1, abs=1e-14)
    assert nu == pytest.approx(0.4, abs=1e-14)


def test_fit_fringe_is_scale_free():
    chi = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    phase, nu = fit_fringe(chi, 7.0 * (1 + 0.3 * np.cos(chi + 2.0)))
    assert phase == pytest.approx(-2.0, abs=1e-13)
    assert nu == pytest.approx(0.3, abs=1e-13)


def test_fit_fringe_needs_three_samples():
    with pytest.raises(InvalidInput):
        fit_fringe([0.0, 1.0], [1.0, 0.5])


def test_incoherent_average_validation():
    with pytest.raises(NonStochasticWeights):
        incoherent_average_profile([0.6, 0.6], [(1, 0), (1, 0)], [0.0])
    with pytest.raises(InvalidInput):
        incoherent_average_profile([0.5, 0.5], [(1.5, 0), (1, 0)], [0.0])


def test_eigenstate_fringes_accept_degenerate_state(rng):
    u = random_unitary(2, rng)
    rho = make_density([0.5, 0.5], np.eye(2))
    w, pairs = eigenstate_fringes(rho, u)
    z = sum(wk * nu * np.exp(1j * ph) for wk, (nu, ph) in zip(w, pairs))
    assert abs(z - np.trace(u.matrix) / 2) < 1e-14


@given(density_and_unitary(), st.floats(0, 2 * math.pi))
def test_output_is_density_and_matches_expansion(pair, chi):
    rho, u = pair
    out = mach_zehnder_output(rho, u, chi)
    assert isinstance(out, DensityOperator)
    np.testing.assert_allclose(out.matrix, four_term_output(rho, u, chi), atol=1e-14)
    z = np.trace(u.matrix @ rho.matrix)
    expected = 0.5 * (1 + abs(z) * math.cos(chi - np.angle(z)))
    assert intensity_along_0(out) == pytest.approx(expected, abs=1e-14)


@given(density_and_unitary())
def test_conjugation_identity(pair):
    rho, u = pair
    a = np.trace(rho.matrix @ dagger(u.matrix))
    b = np.conj(np.trace(u.matrix @ rho.matrix))
    assert abs(a - b) < 1e-14


@given(density_and_unitary(), st.floats(-math.pi, math.pi))
def test_global_phase_shifts_profile_rigidly(pair, alpha):
    rho, u = pair
    chi = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    shifted = chi_scan(rho, np.exp(1j * alpha) * u.matrix, chi + alpha)
    np.testing.assert_allclose(shifted, chi_scan(rho, u, chi), atol=1e-13)


@given(density_and_unitary())
def test_consistency_triangle(pair):
    rho, u = pair
    z = np.trace(u.matrix @ rho.matrix)
    if abs(z) < 1e-3:
        return
    exact = phase_visibility(rho, u)
    chi = 2 * np.pi * np.arange(64) / 64
    sim = simulate_profile(rho, u, chi)
    avg = incoherent_average_profile(*eigenstate_fringes(rho, u), chi)
    for other in (sim, avg):
        assert abs(math.remainder(other.phase - exact.phase, 2 * math.pi)) < 1e-9
        assert abs(other.visibility - exact.visibility) < 1e-9
    np.testing.assert_allclose(avg.intensity, sim.intensity, atol=1e-12)
