"""Product quadrature on the unit sphere.

Gauss-Legendre in cos(theta) times the trapezoid rule in phi integrates every
polynomial of total degree <= ``degree`` in the Cartesian components exactly
(up to round-off).  Weights are normalised to the sphere *mean*, i.e. they sum
to 1 and approximate ``(1/4pi) * integral``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class SphereRule:
    degree: int
    points: np.ndarray  # (N, 3) unit vectors
    weights: np.ndarray  # (N,), sum to 1
    n_theta: int
    n_phi: int

    def mean(self, values):
        """Sphere mean of sampled values (first axis runs over nodes)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@lru_cache(maxsize=None)
def sphere_rule(degree):
    """Rule exact for polynomials of total degree ``degree`` on the sphere."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    n_theta = -(-degree // 2) + 1
    n_phi = degree + 1
    cos_t, w_t = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - cos_t**2)
    points = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(cos_t, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(w_t / 2.0, n_phi) / n_phi
    points.flags.writeable = False
    weights.flags.writeable = False
    return SphereRule(degree, points, weights, n_theta, n_phi)
