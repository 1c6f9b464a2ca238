"""Pure spin-J states and their geometry on the sphere.

Amplitudes are indexed ``m = J, J-1, ..., -J``.  Spin coherent states use
the gauge in which ``<z|n>`` is real and non-negative::

    <J,m|n> = sqrt(C(2J, J+m)) cos(t/2)**(J+m) sin(t/2)**(J-m) exp(i (J-m) phi)

so that ``<n|psi> = cos(t/2)**(2J) * sum_m psi_m sqrt(C(2J, J+m)) zeta**(J-m)``
with ``zeta = tan(t/2) exp(-i phi) = (x - i y) / (1 + z)``.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import AntipodalDegeneracy, OrderExceedsSpin, SchemaError, ZeroState
from .harmonic import project_function
from .roots import binary_form_roots

NORM_TOL = 1e-12


def _sqrt_binomials(two_j):
    return np.sqrt([comb(two_j, k) for k in range(two_j + 1)])


@dataclass(frozen=True)
class SpinState:
    """Normalised pure state of a spin J = two_j / 2.

    Parameters
    ----------
    two_j : int
    amplitudes : ndarray of complex, length two_j + 1, ordered m = J .. -J
    """

    two_j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.two_j < 0:
            raise ValueError("two_j must be non-negative")
        if amps.shape[0] != self.two_j + 1:
            raise ValueError(f"spin {self.two_j}/2 needs {self.two_j + 1} amplitudes")
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ZeroState("state vector is zero")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def spin(self):
        return self.two_j / 2

    @property
    def dim(self):
        return self.two_j + 1

    @classmethod
    def basis(cls, two_j, m):
        """|J, m> with ``m`` given as a float or half-integer."""
        k = int(round(two_j / 2 - m))
        if not 0 <= k <= two_j:
            raise ValueError(f"m={m} outside the spin-{two_j}/2 multiplet")
        amps = np.zeros(two_j + 1, dtype=np.complex128)
        amps[k] = 1.0
        return cls(two_j, amps)

    def fidelity(self, other):
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def to_json(self):
        return {
            "two_j": self.two_j,
            "amplitudes": [{"re": float(a.real), "im": float(a.imag)} for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, doc):
        try:
            two_j = doc["two_j"]
            entries = doc["amplitudes"]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad state document: {exc}") from None
        if not isinstance(two_j, int) or isinstance(two_j, bool) or two_j < 0:
            raise SchemaError("two_j must be a non-negative integer")
        if not isinstance(entries, list) or len(entries) != two_j + 1:
            raise SchemaError(f"expected {two_j + 1} amplitudes")
        amps = []
        for e in entries:
            if not isinstance(e, dict):
                raise SchemaError("amplitude entries must be objects")
            re, im = e.get("re", 0.0), e.get("im", 0.0)
            if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
                raise SchemaError("amplitude values must be numbers")
            amps.append(complex(re, im))
        return cls(two_j, amps)


@dataclass(frozen=True)
class Constellation:
    """Majorana stars: 2J unit vectors (with repetition)."""

    two_j: int
    stars: np.ndarray

    def __post_init__(self):
        stars = np.asarray(self.stars, dtype=np.float64).reshape(-1, 3)
        if stars.shape[0] != self.two_j:
            raise ValueError(f"need {self.two_j} stars, got {stars.shape[0]}")
        stars = stars / np.linalg.norm(stars, axis=1, keepdims=True)
        stars.flags.writeable = False
        object.__setattr__(self, "stars", stars)

    def to_json(self):
        return {"two_j": self.two_j, "stars": self.stars.tolist()}


# ---------------------------------------------------------- coherent states

def _half_angles(points):
    """cos(t/2), sin(t/2) and exp(i phi) for an (N, 3) array of unit vectors."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    z = np.clip(pts[:, 2], -1.0, 1.0)
    c = np.sqrt((1.0 + z) / 2.0)
    s = np.sqrt((1.0 - z) / 2.0)
    w = pts[:, 0] + 1j * pts[:, 1]
    rho = np.abs(w)
    phase = np.where(rho > 0, w / np.where(rho > 0, rho, 1.0), 1.0)
    return c, s, phase


def coherent_amplitudes(two_j, points):
    """Rows of coherent-state amplitudes for an (N, 3) array of directions."""
    c, s, phase = _half_angles(points)
    k = np.arange(two_j + 1)  # k = J - m
    return (
        _sqrt_binomials(two_j)[None, :]
        * c[:, None] ** (two_j - k)[None, :]
        * s[:, None] ** k[None, :]
        * phase[:, None] ** k[None, :]
    )


def coherent_state(two_j, n):
    """Spin coherent state |n>, the +J eigenvector of J . n."""
    return SpinState(two_j, coherent_amplitudes(two_j, [n])[0])


def spherical_triangle_area(a, b, c):
    """Oriented area of the spherical triangle (a, b, c), in (-2pi, 2pi].

    Positive when ``a . (b x c) > 0``.
    """
    a, b, c = (np.asarray(v, dtype=np.float64) for v in (a, b, c))
    for u, v in ((a, b), (b, c), (c, a)):
        if np.linalg.norm(u + v) < 1e-12:
            raise AntipodalDegeneracy("two vertices are antipodal")
    w = complex(1.0 + a @ b + b @ c + c @ a, a @ np.cross(b, c))
    return 2.0 * np.angle(w)


_ZHAT = np.array([0.0, 0.0, 1.0])


def overlap_geometric(two_j, n1, n2):
    """<n1|n2> = ((1 + n1.n2)/2)**J * exp(i J Omega(z, n1, n2)).

    Omega is the oriented area of the triangle spanned by the north pole and
    the two directions.  When either direction is the south pole the gauge
    is set by convention (phi = 0) and the phase follows from the
    amplitudes directly.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    n1 = n1 / np.linalg.norm(n1)
    n2 = n2 / np.linalg.norm(n2)
    spin = two_j / 2
    cos_half = (1.0 + n1 @ n2) / 2.0
    if cos_half <= 1e-15:
        return 0j
    try:
        area = spherical_triangle_area(_ZHAT, n1, n2)
    except AntipodalDegeneracy:
        a1 = coherent_amplitudes(1, [n1])[0]
        a2 = coherent_amplitudes(1, [n2])[0]
        return complex(np.vdot(a1, a2) ** two_j)
    return complex(cos_half**spin * np.exp(1j * spin * area))


def overlap(psi, phi):
    """Plain inner product <psi|phi>."""
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


# ------------------------------------------------------------------- Husimi

def husimi_many(psi, points):
    """|<n|psi>|**2 at an (N, 3) array of directions."""
    rows = coherent_amplitudes(psi.two_j, points)
    return np.abs(rows.conj() @ psi.amplitudes) ** 2


def husimi(psi, n):
    return float(husimi_many(psi, [n])[0])


def husimi_harmonic_component(psi, order):
    """Order-l harmonic component of the Husimi function (l <= 2J)."""
    if order > psi.two_j or order < 0:
        raise OrderExceedsSpin(f"the Husimi function of spin {psi.two_j}/2 has no order-{order} part")
    return project_function(lambda pts: husimi_many(psi, pts), order, 2 * psi.two_j)


def husimi_harmonic_components(psi):
    """[Q_0, Q_1, ..., Q_2J]; their sum is the Husimi function on the sphere."""
    return [husimi_harmonic_component(psi, ell) for ell in range(psi.two_j + 1)]


# ------------------------------------------------------------------ Majorana

def majorana_polynomial(psi):
    """Ascending coefficients in zeta of <n|psi> / cos(t/2)**(2J)."""
    return psi.amplitudes * _sqrt_binomials(psi.two_j)


def _zero_to_star(pair):
    """Star (antipode of the zero) for a root zeta = a / b."""
    a, b = pair
    norm = abs(a) ** 2 + abs(b) ** 2
    w = -2.0 * np.conj(a) * b / norm
    return np.array([w.real, w.imag, (abs(a) ** 2 - abs(b) ** 2) / norm])


def _star_to_zero(star):
    """Homogeneous pair (a : b) of zeta at the antipode of ``star``."""
    x, y, z = -np.asarray(star, dtype=np.float64)
    # zeta = (x - i y)/(1 + z) = (1 - z)/(x + i y); pick the better-conditioned form.
    if z >= 0:
        pair = np.array([x - 1j * y, 1.0 + z])
    else:
        pair = np.array([1.0 - z, x + 1j * y])
    return pair / np.linalg.norm(pair)


def majorana_stars(psi):
    """The 2J Majorana stars of a state."""
    if psi.two_j == 0:
        return Constellation(0, np.zeros((0, 3)))
    coeffs = majorana_polynomial(psi)
    if not np.any(coeffs):
        raise ZeroState("state vector is zero")
    roots = binary_form_roots(coeffs)
    return Constellation(psi.two_j, np.array([_zero_to_star(p) for p in roots.pairs]))


def state_from_stars(constellation):
    """State whose Majorana stars are the given ones (global phase fixed arbitrarily)."""
    two_j = constellation.two_j
    poly = np.zeros(two_j + 1, dtype=np.complex128)
    poly[0] = 1.0
    for used, star in enumerate(constellation.stars):
        a, b = _star_to_zero(star)
        nxt = np.zeros_like(poly)
        nxt[1 : used + 2] += b * poly[: used + 1]
        nxt[: used + 1] -= a * poly[: used + 1]
        poly = nxt
    return SpinState(two_j, poly / _sqrt_binomials(two_j))


def rotate_state(psi, rotation):
    """State rotated by the SU(2) lift of a proper rotation matrix."""
    from .oracle import rotation_operator

    rot = np.asarray(rotation, dtype=np.float64)
    angle = np.arccos(np.clip((np.trace(rot) - 1.0) / 2.0, -1.0, 1.0))
    axis = np.array([rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]])
    if np.linalg.norm(axis) < 1e-12:
        if angle < 1e-12:
            return psi
        # Half-turn: the axis is the +1 eigenvector of R.
        w, v = np.linalg.eigh((rot + rot.T) / 2.0)
        axis = v[:, np.argmax(w)]
    axis = axis / np.linalg.norm(axis)
    return SpinState(psi.two_j, rotation_operator(psi.two_j, axis, angle) @ psi.amplitudes)
