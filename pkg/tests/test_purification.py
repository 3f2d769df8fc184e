import math

import numpy as np
import pytest
from hypothesis import given, settings

from mixphase.core import make_density
from mixphase.errors import DimensionMismatch, InvalidDensity
from mixphase.interferometry import phase_visibility
from mixphase.purification import (
    PurifiedState,
    purified_overlap,
    purified_transport_check,
    purify,
    reconstruction_error,
)
from mixphase.sampling import random_density, random_generator_path, random_unitary
from mixphase.transport import defect, transport_evolution

from strategies import density_and_unitary, dims, seeds


def test_pure_state_purification_is_product():
    psi = purify(make_density([1.0, 0.0], np.eye(2)))
    np.testing.assert_array_equal(psi.vector(), [1, 0, 0, 0])


def test_maximally_mixed_qubit_gives_maximally_entangled_state():
    a = purify(make_density([0.5, 0.5], np.eye(2))).amplitudes
    # both marginals maximally mixed; the basis within the degenerate pair is arbitrary
    np.testing.assert_allclose(a @ a.conj().T, np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(a.conj().T @ a, np.eye(2) / 2, atol=1e-15)


def test_sigma_z_overlap_on_mixed_state():
    rho = make_density([0.75, 0.25], np.eye(2))
    assert purified_overlap(rho, np.diag([1.0, -1.0])) == pytest.approx(0.5, abs=1e-15)


def test_amplitudes_must_be_normalised():
    with pytest.raises(InvalidDensity):
        PurifiedState(np.eye(2))
    with pytest.raises(DimensionMismatch):
        PurifiedState(np.ones((2, 3)) / np.sqrt(6))


def test_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        purified_overlap(random_density(2, rng), random_unitary(3, rng))


def test_degenerate_states_are_purified(rng):
    rho = make_density([0.4, 0.4, 0.2], random_unitary(3, rng).matrix)
    assert reconstruction_error(rho) < 1e-14


@given(density_and_unitary())
def test_overlap_oracle(pair):
    rho, u = pair
    assert abs(purified_overlap(rho, u) - np.trace(u.matrix @ rho.matrix)) < 1e-12


@given(density_and_unitary())
def test_local_evolution_preserves_norm_and_reduced_state(pair):
    rho, u = pair
    psi = purify(rho)
    out = psi.evolve_local(u)
    assert abs(np.linalg.norm(out.vector()) - 1) < 1e-12
    np.testing.assert_allclose(out.reduced(), u.matrix @ rho.matrix @ u.matrix.conj().T, atol=1e-12)
    np.testing.assert_allclose(psi.reduced(), rho.matrix, atol=1e-12)


@given(density_and_unitary())
def test_overlap_phase_and_modulus_match_interferometry(pair):
    rho, u = pair
    z = purified_overlap(rho, u)
    if abs(z) < 1e-6:
        return
    pv = phase_visibility(rho, u)
    assert abs(math.remainder(np.angle(z) - pv.phase, 2 * math.pi)) < 1e-12
    assert abs(abs(z) - pv.visibility) < 1e-12


@settings(max_examples=10)
@given(dims, seeds)
def test_transport_check_equals_density_defect(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(n, rng)
    path = transport_evolution(rho, random_generator_path(n, rng, steps=300))
    assert abs(purified_transport_check(rho, path) - defect(rho, path).global_defect) < 1e-9
