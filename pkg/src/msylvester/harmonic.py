"""Harmonic (traceless) tensors and the canonical decomposition.

Every symmetric rank-n tensor splits uniquely as
``A = sum_k A_(n-2k) (.) delta^k`` with traceless ``A_(n-2k)``.  The
components are obtained in closed form from the p-fold traces of ``A``,
using exact rational weights built from the Legendre tables.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from . import _kernels
from .errors import (
    BandLimitTooHigh,
    NotTraceless,
    OrderOutOfRange,
    RankMismatch,
    SchemaError,
    SingularOrigin,
    max_order,
)
from .legendre import double_factorial, legendre_coeffs, monomial_coeffs
from .quadrature import sphere_rule
from .symtensor import (
    SymTensor,
    _as_sym,
    _scale,
    delta,
    full_contraction,
    multi_indices,
    multinomials,
    sym_product,
    tensor_from_json,
    trace,
)

MAX_BAND_LIMIT = 32


class HarmonicTensor:
    """Traceless symmetric tensor of order l.

    Doubles as the regular solid harmonic ``H(r)``, the spherical harmonic
    ``H(n)`` on the unit sphere and the irregular solid harmonic
    ``H(r) / r**(2l+1)``.

    Parameters
    ----------
    base : SymTensor
        The underlying tensor.
    check : bool
        Verify that the trace vanishes (relative tolerance ``atol``).
    """

    __slots__ = ("base",)

    def __init__(self, base, check=True, atol=1e-12):
        base = _as_sym(base)
        if check and base.rank >= 2:
            tr = trace(base, 1)
            if base.exact:
                if any(c != 0 for c in tr.coeffs):
                    raise NotTraceless("exact tensor has a non-zero trace")
            elif tr.norm() > atol * max(1.0, base.norm()):
                raise NotTraceless(f"trace norm {tr.norm():.3e} exceeds tolerance")
        self.base = base

    @property
    def order(self):
        return self.base.rank

    @property
    def rank(self):
        return self.base.rank

    @property
    def coeffs(self):
        return self.base.coeffs

    @property
    def kind(self):
        return self.base.kind

    @property
    def real(self):
        return HarmonicTensor(self.base.real, check=False)

    @property
    def imag(self):
        return HarmonicTensor(self.base.imag, check=False)

    def norm(self):
        return self.base.norm()

    def allclose(self, other, atol=1e-12, rtol=0.0):
        return self.base.allclose(_as_sym(other), atol=atol, rtol=rtol)

    def __add__(self, other):
        return HarmonicTensor(self.base + _as_sym(other), check=False)

    def __sub__(self, other):
        return HarmonicTensor(self.base - _as_sym(other), check=False)

    def __neg__(self):
        return HarmonicTensor(-self.base, check=False)

    def __mul__(self, factor):
        return HarmonicTensor(self.base * factor, check=False)

    __rmul__ = __mul__

    def __truediv__(self, factor):
        return HarmonicTensor(self.base / factor, check=False)

    def __repr__(self):
        return f"Harmonic{self.base!r}"

    def evaluate(self, r):
        return eval_regular(self, r)

    def evaluate_many(self, points):
        return self.base.evaluate_many(points)

    def to_json(self):
        doc = self.base.to_json()
        doc["order"] = self.order
        return doc

    @classmethod
    def from_json(cls, doc, atol=1e-9):
        base = tensor_from_json(doc)
        if "order" in doc and doc["order"] != base.rank:
            raise SchemaError("'order' disagrees with 'rank'")
        return cls(base, atol=atol)


def zero_harmonic(order, dtype=np.float64):
    return HarmonicTensor(SymTensor.zeros(order, dtype), check=False)


# ------------------------------------------------------- canonical decomposition

@lru_cache(maxsize=None)
def _component_weights(n):
    """w[k][p] = q_{n,k} p_{n-2k,p-k}: weight of delta^(p-k) (.) A^(n,p) in A_(n-2k)."""
    q = monomial_coeffs(n)
    table = []
    for k in range(n // 2 + 1):
        pl = legendre_coeffs(n - 2 * k)
        table.append({p: q[k] * pl[p - k] for p in range(k, n // 2 + 1)})
    return table


def _all_traces(a):
    """[A^(n,0), A^(n,1), ...] via repeated exact Laplacians."""
    n = a.rank
    out = [a]
    lap = a
    for p in range(1, n // 2 + 1):
        lap = lap.laplacian()
        out.append(SymTensor(lap.rank, _scale(lap.coeffs, Fraction(factorial(n - 2 * p), factorial(n)))))
    return out


def _check_rank(rank):
    cap = max_order()
    if rank > cap:
        raise OrderOutOfRange(f"rank {rank} exceeds cap {cap}")


def _combine(weights, traces, k):
    n = traces[0].rank
    total = SymTensor.zeros(n - 2 * k, traces[0].coeffs.dtype)
    for p, w in weights[k].items():
        term = sym_product(delta(p - k), traces[p])
        if term.exact:
            term = SymTensor(term.rank, _scale(term.coeffs, w))
        else:
            term = term * float(w)
        total = total + term
    return total


def harmonic_components(a):
    """Traceless components ``[A_(n), A_(n-2), ...]`` of a symmetric tensor.

    Examples
    --------
    >>> import numpy as np
    >>> from msylvester.symtensor import from_vectors
    >>> top, iso = harmonic_components(from_vectors([[0, 0, 1], [0, 0, 1]]))
    >>> iso.coeffs[0]
    Fraction(1, 3)
    """
    a = _as_sym(a)
    _check_rank(a.rank)
    weights = _component_weights(a.rank)
    traces = _all_traces(a)
    return [
        HarmonicTensor(_combine(weights, traces, k), check=False)
        for k in range(a.rank // 2 + 1)
    ]


def harmonic_part(a):
    """Top-order traceless component ``A_(n)`` only."""
    a = _as_sym(a)
    _check_rank(a.rank)
    return HarmonicTensor(_combine(_component_weights(a.rank), _all_traces(a), 0), check=False)


def reconstruct(components):
    """Inverse of :func:`harmonic_components`: ``sum_k H_k (.) delta^k``."""
    comps = [_as_sym(c) for c in components]
    if not comps:
        raise RankMismatch("no components given")
    top = comps[0].rank
    for k, c in enumerate(comps):
        if c.rank != top - 2 * k:
            raise RankMismatch(f"component {k} has rank {c.rank}, expected {top - 2 * k}")
    total = comps[0]
    for k, c in enumerate(comps[1:], start=1):
        total = total + sym_product(c, delta(k))
    return total


# ----------------------------------------------------------------- evaluation

def eval_spherical(h, n):
    """Spherical harmonic value at the direction of ``n`` (normalised first)."""
    n = np.asarray(n, dtype=np.float64)
    return _as_sym(h).evaluate(n / np.linalg.norm(n))


def eval_regular(h, r):
    return _as_sym(h).evaluate(r)


def eval_irregular(h, r):
    """Irregular solid harmonic H(r) / |r|**(2l+1)."""
    h = _as_sym(h)
    r = np.asarray(r, dtype=np.float64)
    dist = np.linalg.norm(r)
    if dist == 0.0:
        raise SingularOrigin("irregular harmonic is singular at the origin")
    return h.evaluate(r) / dist ** (2 * h.rank + 1)


# -------------------------------------------------------------- sphere means

def monomial_sphere_integral(p, q, r):
    """Exact mean of nx^(2p) ny^(2q) nz^(2r) over the unit sphere."""
    s = p + q + r
    return Fraction(
        factorial(2 * p) * factorial(2 * q) * factorial(2 * r) * factorial(s),
        factorial(p) * factorial(q) * factorial(r) * factorial(2 * s + 1),
    )


def monomial_sphere_mean(a, b, c):
    """Mean of nx^a ny^b nz^c; zero unless every exponent is even."""
    if a % 2 or b % 2 or c % 2:
        return Fraction(0)
    return monomial_sphere_integral(a // 2, b // 2, c // 2)


def sphere_average(a):
    """Mean of the polynomial of ``a`` over the unit sphere, term by term."""
    a = _as_sym(a)
    total = Fraction(0) if a.exact else 0.0
    for (p, q, s), c in zip(multi_indices(a.rank).tolist(), a.coeffs):
        if c == 0:
            continue
        m = monomial_sphere_mean(p, q, s)
        total += c * m if a.exact else c * float(m)
    return total


def _hafnian(gram):
    """Sum over perfect matchings of prod gram[i, j] (subset DP)."""
    n = gram.shape[0]
    memo = {0: 1.0}

    def solve(mask):
        if mask in memo:
            return memo[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = 0.0
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            total = total + gram[i, j] * solve(rest & ~(1 << j))
            m &= m - 1
        memo[mask] = total
        return total

    return solve((1 << n) - 1)


def sphere_average_product(vectors):
    """Mean over the unit sphere of prod_i (a_i . n).

    Zero for an odd count; for 2m vectors it is the average over the
    (2m-1)!! pairings of the products of pair dot products, divided by 2m+1.
    """
    vecs = np.asarray(vectors)
    if vecs.size == 0:
        return 1.0
    vecs = vecs.reshape(-1, 3)
    n = vecs.shape[0]
    if n % 2:
        return 0.0
    gram = vecs @ vecs.T
    m = n // 2
    return _hafnian(gram) / ((2 * m + 1) * double_factorial(2 * m - 1))


# ------------------------------------------------------------ inner products

def harmonic_inner_product(a, b):
    """Sphere mean of A(n) B(n) for two order-l harmonics: l!/(2l+1)!! A:B.

    Bilinear: complex inputs are not conjugated.
    """
    a, b = _as_sym(a), _as_sym(b)
    if a.rank != b.rank:
        raise RankMismatch(f"orders {a.rank} and {b.rank} differ")
    n = a.rank
    weight = Fraction(factorial(n), double_factorial(2 * n + 1))
    value = full_contraction(a, b)
    if isinstance(value, Fraction):
        return weight * value
    return float(weight) * value


@lru_cache(maxsize=None)
def _trace_pair_weights(n):
    """p_{n,p} / p_{n,0} for p = 0..n//2."""
    pl = legendre_coeffs(n)
    return tuple(c / pl[0] for c in pl.coeffs)


def harmonic_contraction_via_traces(a, b):
    """A_(n) : B_(n) from the contractions of the p-fold traces of A and B."""
    a, b = _as_sym(a), _as_sym(b)
    if a.rank != b.rank:
        raise RankMismatch(f"ranks {a.rank} and {b.rank} differ")
    _check_rank(a.rank)
    total = None
    for p, w in enumerate(_trace_pair_weights(a.rank)):
        value = full_contraction(trace(a, p), trace(b, p))
        term = w * value if isinstance(value, Fraction) else float(w) * value
        total = term if total is None else total + term
    return total


# ------------------------------------------------------------------ projection

def _moment_tensor(points, values, rank):
    """sum_i values_i * (u_i . r)**rank as a SymTensor."""
    idx = multi_indices(rank)
    table = _kernels.monomial_values(points, idx)
    mult = np.array(multinomials(rank), dtype=np.float64)
    return SymTensor(rank, mult * (table.T @ values))


def project_function(f, order, band_limit):
    """Order-l harmonic component of a band-limited function on the sphere.

    Parameters
    ----------
    f : callable
        Vectorised evaluator: takes an (N, 3) array of unit vectors and
        returns N real or complex values.
    order : int
        Harmonic order l.
    band_limit : int
        Upper bound on the polynomial degree of ``f``; the quadrature is
        exact for degree ``band_limit + order``.

    Returns
    -------
    HarmonicTensor
        ``H`` with ``H(n) = (2l+1)/(4pi) * integral f(u) P_l(u . n) du``.
    """
    if band_limit > MAX_BAND_LIMIT:
        raise BandLimitTooHigh(f"band limit {band_limit} exceeds {MAX_BAND_LIMIT}")
    if band_limit < 0:
        raise ValueError("band limit must be non-negative")
    _check_rank(order)
    rule = sphere_rule(band_limit + order)
    values = np.asarray(f(rule.points))
    if values.shape != (rule.points.shape[0],):
        raise ValueError("evaluator must return one value per point")
    weighted = values * rule.weights
    pl = legendre_coeffs(order)
    out = None
    for k, c in enumerate(pl.coeffs):
        moment = _moment_tensor(rule.points, weighted, order - 2 * k)
        term = sym_product(delta(k), moment) * float((2 * order + 1) * c)
        out = term if out is None else out + term
    # Strip round-off trace so the result is harmonic to working precision.
    return harmonic_part(out)


def project_all(f, band_limit):
    """All harmonic components ``[f_0, f_1, ..., f_band_limit]``."""
    return [project_function(f, ell, band_limit) for ell in range(band_limit + 1)]
