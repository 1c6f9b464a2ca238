"""Seeded random generators for tests, the check suite and benchmarks."""

import numpy as np

from .multipole import Skeleton
from .operator import observable_from_polynomials
from .spinstate import Constellation, SpinState
from .symtensor import SymTensor, n_coeffs


def rng_from(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def unit_vectors(rng, count):
    v = rng.normal(size=(count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_tensor(rng, rank, complex_=False):
    c = rng.normal(size=n_coeffs(rank))
    if complex_:
        c = c + 1j * rng.normal(size=n_coeffs(rank))
    return SymTensor(rank, c)


def random_skeleton(rng, order):
    return Skeleton.from_axes(unit_vectors(rng, order), rng.uniform(0.2, 3.0), rng.choice([-1, 1]))


def random_state(rng, two_j):
    amps = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState(two_j, amps)


def random_constellation(rng, two_j):
    return Constellation(two_j, unit_vectors(rng, two_j))


def random_observable(rng, degree):
    """Real polynomial observable with homogeneous parts of every degree 0..degree."""
    return observable_from_polynomials([random_tensor(rng, d) for d in range(degree + 1)])


def random_rotation(rng):
    axis = unit_vectors(rng, 1)[0]
    angle = rng.uniform(0.0, np.pi)
    return axis, angle
