import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixphase.core import (
    DensityOperator,
    UnitaryOperator,
    dagger,
    degenerate_groups,
    evolve,
    fix_frame_phases,
    make_density,
    principal_arg,
    spectral,
    wrap_phase,
)
from mixphase.errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidDensity,
    NonOrthonormalFrame,
    NonStochasticWeights,
    NonUnitaryInput,
    NumericalAbort,
)
from mixphase.sampling import random_density, random_unitary

from strategies import density_and_unitary, dims, seeds


def test_make_density_pure_z():
    rho = make_density([1.0, 0.0], np.eye(2))
    np.testing.assert_array_equal(rho.matrix, np.diag([1.0, 0.0]))


def test_make_density_maximally_mixed_qutrit():
    rho = make_density([1 / 3] * 3, np.eye(3))
    np.testing.assert_allclose(rho.matrix, np.eye(3) / 3, atol=1e-15)


def test_make_density_rejects_bad_weights():
    with pytest.raises(NonStochasticWeights):
        make_density([0.7, 0.7], np.eye(2))
    with pytest.raises(NonStochasticWeights):
        make_density([1.2, -0.2], np.eye(2))


def test_make_density_rejects_nonorthonormal_frame():
    with pytest.raises(NonOrthonormalFrame):
        make_density([0.5, 0.5], [[1, 1], [0, 1]])


def test_make_density_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        make_density([0.5, 0.3, 0.2], np.eye(2))


def test_density_validation():
    with pytest.raises(InvalidDensity):
        DensityOperator(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(InvalidDensity):
        DensityOperator(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidDensity):
        DensityOperator(np.diag([1.1, -0.1]))
    # tiny negative round-off within the PSD tolerance is accepted
    DensityOperator(np.diag([1 + 5e-13, -5e-13]))


def test_density_is_read_only():
    rho = make_density([0.75, 0.25], np.eye(2))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_unitary_validation():
    with pytest.raises(NonUnitaryInput):
        UnitaryOperator(np.array([[1, 0], [0, 1.001]]))
    u = UnitaryOperator.identity(3)
    np.testing.assert_array_equal(u.adjoint().matrix, np.eye(3))


def test_spectral_half_x_example():
    rho = DensityOperator(0.5 * (np.eye(2) + 0.5 * np.array([[0, 1], [1, 0]])))
    dec = spectral(rho)
    np.testing.assert_allclose(dec.weights, [0.75, 0.25], atol=1e-15)
    np.testing.assert_allclose(dec.frame[:, 0], np.array([1, 1]) / math.sqrt(2), atol=1e-15)


def test_spectral_refuses_degenerate():
    with pytest.raises(DegenerateSpectrum) as info:
        spectral(make_density([0.4, 0.4, 0.2], np.eye(3)))
    assert info.value.groups == ((0, 1),)
    assert isinstance(info.value, NumericalAbort)
    dec = spectral(make_density([0.4, 0.4, 0.2], np.eye(3)), strict=False)
    assert dec.degenerate_groups == ((0, 1),)


def test_degenerate_groups():
    assert degenerate_groups([0.5, 0.5, 0.3, 0.1, 0.1], 1e-8) == [[0, 1], [3, 4]]
    assert degenerate_groups([0.6, 0.4], 1e-8) == []


def test_phase_convention_largest_component_real_positive(rng):
    f = fix_frame_phases(random_unitary(4, rng).matrix)
    for k in range(4):
        j = np.argmax(np.abs(f[:, k]))
        assert f[j, k].imag == 0 and f[j, k].real > 0


def test_evolve_pure_x_flip():
    x = np.array([[0, 1], [1, 0]])
    out = evolve(make_density([1.0, 0.0], np.eye(2)), x)
    np.testing.assert_allclose(out.matrix, np.diag([0.0, 1.0]), atol=1e-15)


def test_evolve_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        evolve(random_density(2, rng), random_unitary(3, rng))


def test_principal_branch():
    assert principal_arg(-1 + 0j) == math.pi
    assert principal_arg(complex(-1, -0.0)) == math.pi
    assert math.copysign(1, principal_arg(complex(1, -0.0))) == 1
    assert wrap_phase(-math.pi) == math.pi
    assert wrap_phase(3 * math.pi) == math.pi
    assert wrap_phase(2 * math.pi + 0.25) == pytest.approx(0.25, abs=1e-15)


@given(density_and_unitary())
def test_evolve_preserves_trace_hermiticity_spectrum(pair):
    rho, u = pair
    out = evolve(rho, u)
    assert abs(np.trace(out.matrix) - 1) < 1e-10
    assert np.max(np.abs(out.matrix - dagger(out.matrix))) < 1e-10
    np.testing.assert_allclose(out.eigenvalues(), rho.eigenvalues(), atol=1e-10)


@given(dims, seeds)
def test_spectral_roundtrip(n, seed):
    rng = np.random.default_rng(seed)
    rho = random_density(n, rng)
    dec = spectral(rho)
    np.testing.assert_allclose(dec.weights, np.sort(np.linalg.eigvalsh(rho.matrix))[::-1], atol=1e-10)
    np.testing.assert_allclose(dec.reconstruct(), rho.matrix, atol=1e-10)


@given(dims, seeds, st.lists(st.floats(-math.pi, math.pi), min_size=4, max_size=4))
def test_make_density_frame_phase_invariance(n, seed, angles):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(n))
    f = random_unitary(n, rng).matrix
    g = f * np.exp(1j * np.array(angles[:n]))
    np.testing.assert_allclose(make_density(w, f).matrix, make_density(w, g).matrix, atol=1e-14)
