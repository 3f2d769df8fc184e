"""Random states, unitaries and smooth generator paths for validation batches."""
from __future__ import annotations

import math

import numpy as np

from .core import DensityOperator, UnitaryOperator, dagger, make_density
from .transport import GeneratorPath


def random_unitary(n: int, rng: np.random.Generator) -> UnitaryOperator:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryOperator(q * (d / np.abs(d)))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (a + dagger(a))
    return scale * h / np.linalg.norm(h, 2)


def random_weights(n: int, rng: np.random.Generator, min_gap: float = 0.05) -> np.ndarray:
    """Dirichlet weights, redrawn until all pairwise gaps exceed ``min_gap``."""
    while True:
        w = rng.dirichlet(np.ones(n))
        if n == 1 or np.min(np.diff(np.sort(w))) > min_gap:
            return w


def random_density(n: int, rng: np.random.Generator, min_gap: float = 0.05) -> DensityOperator:
    return make_density(random_weights(n, rng, min_gap), random_unitary(n, rng).matrix)


def random_generator_path(n: int, rng: np.random.Generator, steps: int = 2000,
                          duration: float = 1.0, scale: float = 1.0) -> GeneratorPath:
    """Smooth drive ``A + sin(2 pi t / tau) B + (t / tau) C`` with random Hermitian terms."""
    a, b, c = (random_hermitian(n, rng, scale) for _ in range(3))
    t = np.linspace(0.0, duration, steps + 1)
    s = t / duration
    gens = a[None] + np.sin(2 * np.pi * s)[:, None, None] * b[None] + s[:, None, None] * c[None]
    return GeneratorPath(t, gens)


def cone_generator_path(steps: int, turns: float = 1.0, omega: float = 2 * math.pi) -> GeneratorPath:
    """Constant precession ``(omega/2) sigma_z`` for ``turns`` revolutions."""
    h = 0.5 * omega * np.diag([1.0, -1.0]).astype(np.complex128)
    return GeneratorPath.constant(h, turns * 2 * math.pi / omega, steps)
