"""Matrix-mechanics reference implementation.

Nothing here uses the geometric machinery beyond reading polynomial
coefficients, so it serves as ground truth for the tensor routes.
Matrices are indexed ``m = J, J-1, ..., -J``.
"""

from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch, NotHermitian, OrderOutOfRange
from .quadrature import sphere_rule
from .symtensor import _as_sym, multi_indices, multinomials

MAX_QUANTIZE_RANK = 8


@lru_cache(maxsize=None)
def _ladder(two_j):
    spin = two_j / 2
    m = spin - np.arange(two_j + 1)
    jp = np.zeros((two_j + 1, two_j + 1), dtype=np.complex128)
    for k in range(1, two_j + 1):
        # <m+1| J+ |m> with |m> at index k and |m+1> at index k-1
        jp[k - 1, k] = np.sqrt(spin * (spin + 1) - m[k] * (m[k] + 1))
    return jp, m


def angular_momentum_matrices(two_j):
    """(Jx, Jy, Jz) for spin two_j / 2."""
    if two_j < 0:
        raise ValueError("two_j must be non-negative")
    jp, m = _ladder(two_j)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(m).astype(np.complex128)
    return jx, jy, jz


def _symmetrized_products(two_j, rank):
    """T[(p, q, s)] = sum over distinct words with p Jx, q Jy, s Jz."""
    jx, jy, jz = angular_momentum_matrices(two_j)
    table = {(0, 0, 0): np.eye(two_j + 1, dtype=np.complex128)}
    for n in range(1, rank + 1):
        for p, q, s in multi_indices(n).tolist():
            acc = 0
            if p:
                acc = acc + jx @ table[(p - 1, q, s)]
            if q:
                acc = acc + jy @ table[(p, q - 1, s)]
            if s:
                acc = acc + jz @ table[(p, q, s - 1)]
            table[(p, q, s)] = acc
    return table


def quantize_symmetrized(apoly, two_j):
    """Replace x, y, z by Jx, Jy, Jz, averaging over all orderings of each monomial."""
    a = _as_sym(apoly).to_float()
    if a.rank > MAX_QUANTIZE_RANK:
        raise OrderOutOfRange(f"quantisation limited to rank {MAX_QUANTIZE_RANK}")
    if a.kind == "complex":
        raise ValueError("only real polynomials give Hermitian operators")
    table = _symmetrized_products(two_j, a.rank)
    out = np.zeros((two_j + 1, two_j + 1), dtype=np.complex128)
    for (p, q, s), c, w in zip(multi_indices(a.rank).tolist(), a.coeffs, multinomials(a.rank)):
        if c != 0:
            out += (c / w) * table[(p, q, s)]
    return out


def quantize_observable(obs, two_j):
    """Sum of the quantised harmonic components of an observable.

    Each order-l component is quantised as a homogeneous degree-l polynomial.
    """
    out = np.zeros((two_j + 1, two_j + 1), dtype=np.complex128)
    for comp in obs.components.values():
        out += quantize_symmetrized(comp, two_j)
    return out


def expectation_matrix(psi, mat, herm_tol=1e-10):
    """<psi|M|psi> for a Hermitian matrix M."""
    mat = np.asarray(mat)
    amps = psi.amplitudes
    if mat.shape != (amps.shape[0], amps.shape[0]):
        raise DimensionMismatch(f"matrix {mat.shape} does not act on dimension {amps.shape[0]}")
    if np.max(np.abs(mat - mat.conj().T), initial=0.0) > herm_tol:
        raise NotHermitian("observable matrix is not Hermitian")
    return float(np.vdot(amps, mat @ amps).real)


def rotation_operator(two_j, axis, angle):
    """exp(-i angle J . axis)."""
    jx, jy, jz = angular_momentum_matrices(two_j)
    n = np.asarray(axis, dtype=np.float64)
    n = n / np.linalg.norm(n)
    return expm(-1j * angle * (n[0] * jx + n[1] * jy + n[2] * jz))


def rotation_matrix(axis, angle):
    """3x3 rotation about ``axis`` by ``angle`` (right-handed)."""
    n = np.asarray(axis, dtype=np.float64)
    n = n / np.linalg.norm(n)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)


def coherent_vector(two_j, n):
    """|n> built by rotating |J, J> about the axis (-sin phi, cos phi, 0)."""
    n = np.asarray(n, dtype=np.float64)
    n = n / np.linalg.norm(n)
    theta = np.arccos(np.clip(n[2], -1.0, 1.0))
    phi = np.arctan2(n[1], n[0])
    top = np.zeros(two_j + 1, dtype=np.complex128)
    top[0] = 1.0
    return rotation_operator(two_j, [-np.sin(phi), np.cos(phi), 0.0], theta) @ top


def coherent_projector_sum(two_j, band_limit):
    """(2J+1) * sphere mean of |n><n| by product quadrature."""
    rule = sphere_rule(band_limit)
    vecs = np.array([coherent_vector(two_j, p) for p in rule.points])
    return (two_j + 1) * np.einsum("k,ki,kj->ij", rule.weights, vecs, vecs.conj())


def resolution_of_unity_check(two_j, band_limit=None):
    """Largest entry of |(2J+1) mean |n><n| - 1|."""
    band_limit = 2 * two_j if band_limit is None else band_limit
    total = coherent_projector_sum(two_j, band_limit)
    return float(np.max(np.abs(total - np.eye(two_j + 1))))


def p_symbol_operator(two_j, symbol, band_limit):
    """(2J+1) * sphere mean of A_P(n) |n><n| for a vectorised P symbol."""
    rule = sphere_rule(band_limit)
    vecs = np.array([coherent_vector(two_j, p) for p in rule.points])
    vals = np.asarray(symbol(rule.points))
    return (two_j + 1) * np.einsum("k,k,ki,kj->ij", rule.weights, vals, vecs, vecs.conj())


def q_symbol(two_j, mat, points):
    """<n|M|n> at an (N, 3) array of directions."""
    vecs = np.array([coherent_vector(two_j, p) for p in np.asarray(points).reshape(-1, 3)])
    return np.einsum("ki,ij,kj->k", vecs.conj(), np.asarray(mat), vecs).real
