"""Roots of binary forms on the Riemann sphere.

A degree-d binary form is passed as its ascending coefficients
``c_0 .. c_d`` of ``p(z) = sum c_k z**k``; vanishing leading coefficients
stand for roots at infinity.  Roots come back as normalised homogeneous
pairs ``(a, b)`` with ``z = a / b``, so infinity is simply ``(1, 0)``.

Multiple roots are found by Aberth-Ehrlich iteration, which scatters a
k-fold root into a small cluster of radius ~ eps**(1/k).  Such clusters are
merged into their centroid whenever the merged factorisation still
reproduces the input coefficients (backward-error test).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

STRIP_TOL = 1e-13
BACKWARD_TOL = 1e-10
_MERGE_LADDER = (1e-9, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2)


@dataclass(frozen=True)
class RootSet:
    """Roots of a binary form.

    Attributes
    ----------
    pairs : ndarray, shape (d, 2)
        Homogeneous coordinates, each row of unit norm.
    multiplicities : tuple of int
        Size of the cluster each root was merged from (1 for simple roots).
    method : str
        ``"aberth"``, ``"companion"`` or ``"trivial"``.
    """

    pairs: np.ndarray
    multiplicities: tuple
    method: str

    def __len__(self):
        return self.pairs.shape[0]


def chordal(p, q):
    """Chordal distance between two homogeneous pairs (Euclidean on the unit sphere)."""
    num = abs(p[0] * q[1] - p[1] * q[0])
    den = np.sqrt((abs(p[0]) ** 2 + abs(p[1]) ** 2) * (abs(q[0]) ** 2 + abs(q[1]) ** 2))
    return 2.0 * num / den


def _pair(z):
    """Homogeneous unit pair for a finite complex number."""
    if abs(z) <= 1.0:
        v = np.array([z, 1.0], dtype=np.complex128)
    else:
        v = np.array([1.0, 1.0 / z], dtype=np.complex128)
    return v / np.linalg.norm(v)


def _initial_guesses(coeffs):
    deg = len(coeffs) - 1
    radius = abs(coeffs[0] / coeffs[-1]) ** (1.0 / deg)
    angles = 2.0 * np.pi * np.arange(deg) / deg + 0.4
    return radius * np.exp(1j * angles)


def _finite_roots(coeffs):
    """Roots of a polynomial with non-zero leading and constant terms."""
    monic = coeffs / coeffs[-1]
    z, _, ok = _kernels.aberth(monic, _initial_guesses(monic), tol=1e-14, maxiter=500)
    if ok:
        return z, "aberth"
    return np.roots(monic[::-1]), "companion"


def _from_pairs(pairs, degree):
    """Ascending coefficients of prod_i (b_i z - a_i), length degree + 1."""
    poly = np.zeros(degree + 1, dtype=np.complex128)
    poly[0] = 1.0
    used = 0
    for a, b in pairs:
        nxt = np.zeros_like(poly)
        nxt[1 : used + 2] += b * poly[: used + 1]
        nxt[: used + 1] -= a * poly[: used + 1]
        poly = nxt
        used += 1
    return poly


def _clusters(pairs, threshold):
    """Single-linkage clusters under the chordal metric."""
    n = len(pairs)
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if chordal(pairs[i], pairs[j]) <= threshold:
                label[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _centroid(pairs):
    """Cluster centre, averaged in whichever chart keeps it bounded."""
    pairs = np.asarray(pairs)
    if np.mean(np.abs(pairs[:, 1])) >= np.mean(np.abs(pairs[:, 0])):
        z = np.mean(pairs[:, 0] / pairs[:, 1])
        return _pair(z)
    w = np.mean(pairs[:, 1] / pairs[:, 0])
    v = np.array([1.0, w], dtype=np.complex128)
    return v / np.linalg.norm(v)


def _polish(pair, target, mult, steps=8):
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    if mult == 1:
        return pair
    a, b = pair
    # Work in whichever chart keeps the root bounded.
    flip = abs(a) > abs(b)
    poly = np.polynomial.Polynomial(target[::-1] if flip else target)
    z = b / a if flip else a / b
    g = poly.deriv(mult - 1)
    dg = g.deriv()
    for _ in range(steps):
        d = dg(z)
        if d == 0:
            break
        step = g(z) / d
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    v = np.array([1.0, z] if flip else [z, 1.0], dtype=np.complex128)
    return v / np.linalg.norm(v)


def _backward_error(pairs, target):
    rec = _from_pairs(pairs, len(target) - 1)
    # Fit the single free scalar before comparing.
    lam = np.vdot(rec, target) / np.vdot(rec, rec)
    return np.max(np.abs(lam * rec - target)) / np.max(np.abs(target))


def _merge(pairs, target):
    """Replace root clusters by centroids while the backward error allows."""
    base = _backward_error(pairs, target)
    accept = max(BACKWARD_TOL, 10.0 * base)
    best = (list(pairs), [1] * len(pairs))
    for threshold in _MERGE_LADDER:
        groups = _clusters(pairs, threshold)
        if len(groups) == len(pairs):
            continue
        merged, mult = [], []
        for g in groups:
            c = _polish(_centroid([pairs[i] for i in g]), target, len(g))
            merged.extend([c] * len(g))
            mult.extend([len(g)] * len(g))
        if _backward_error(merged, target) <= accept:
            best = (merged, mult)
    return best


def binary_form_roots(coeffs, strip_tol=STRIP_TOL):
    """All d roots of a degree-d binary form.

    Parameters
    ----------
    coeffs : array_like
        Ascending coefficients ``c_0 .. c_d``; trailing (leading-degree)
        zeros mean roots at infinity.
    strip_tol : float
        Coefficients below ``strip_tol * max|c|`` at either end are treated
        as exact zeros (roots at infinity or at the origin).

    Returns
    -------
    RootSet
    """
    c = np.asarray(coeffs, dtype=np.complex128).ravel()
    degree = c.shape[0] - 1
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        raise ValueError("the zero form has no well-defined roots")
    small = np.abs(c) <= strip_tol * scale
    n_inf = 0
    while small[degree - n_inf]:
        n_inf += 1
    n_zero = 0
    while small[n_zero]:
        n_zero += 1
    core = c[n_zero : degree - n_inf + 1]
    inf_pair = np.array([1.0, 0.0], dtype=np.complex128)
    zero_pair = np.array([0.0, 1.0], dtype=np.complex128)
    pairs = [inf_pair] * n_inf + [zero_pair] * n_zero
    mult = [n_inf] * n_inf + [n_zero] * n_zero
    method = "trivial"
    if core.shape[0] > 1:
        z, method = _finite_roots(core)
        finite = [_pair(v) for v in z]
        finite, fmult = _merge(finite, core)
        pairs += finite
        mult += fmult
    out = np.array(pairs, dtype=np.complex128).reshape(-1, 2)
    out.flags.writeable = False
    return RootSet(out, tuple(mult), method)


def form_from_roots(pairs, degree=None, lead=1.0):
    """Ascending coefficients of ``lead * prod (b_i z - a_i)``."""
    pairs = [np.asarray(p, dtype=np.complex128) for p in pairs]
    degree = len(pairs) if degree is None else degree
    return lead * _from_pairs(pairs, degree)
