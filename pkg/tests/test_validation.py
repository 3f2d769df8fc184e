import numpy as np
import pytest

from mixphase import validation
from mixphase.core import dagger, wrap_phase
from mixphase.sampling import random_hermitian, random_unitary, random_weights


def test_random_unitary_is_unitary(rng):
    u = random_unitary(4, rng).matrix
    np.testing.assert_allclose(dagger(u) @ u, np.eye(4), atol=1e-14)


def test_random_hermitian_scale(rng):
    h = random_hermitian(3, rng, scale=2.5)
    assert np.linalg.norm(h, 2) == pytest.approx(2.5, rel=1e-14)
    np.testing.assert_array_equal(h, dagger(h))


def test_random_weights_gap(rng):
    for _ in range(20):
        w = random_weights(4, rng, min_gap=0.05)
        assert abs(w.sum() - 1) < 1e-14 and np.min(np.diff(np.sort(w))) > 0.05


def test_batches_are_reproducible():
    a = validation.interference_batch(7, count=5)
    b = validation.interference_batch(7, count=5)
    assert a == b


def test_check_line_format():
    ok = validation.Check("thing", 1e-12, 1e-9, 3)
    bad = validation.Check("thing", 1e-3, 1e-9, 3, "note")
    assert ok.passed and ok.line().startswith("PASS thing:")
    assert not bad.passed and bad.line().endswith("(note)")


def test_small_transport_batch_passes():
    checks = validation.transport_checks(validation.transport_batch(1, qubits=2, qutrits=1, steps=1000))
    assert all(c.passed for c in checks), [c.line() for c in checks]


def test_cone_closed_form_matches_hemisphere():
    # polar angle pi/2: Omega = 2 pi, pure state picks up -pi, i.e. pi
    assert abs(wrap_phase(validation.cone_closed_form(np.pi / 2, 1.0) - np.pi)) < 1e-15
    assert validation.cone_closed_form(np.pi / 3, 0.5) == pytest.approx(-np.pi / 2, abs=1e-15)
