"""Fully symmetric tensors over R^3 stored as homogeneous polynomials.

A rank-n symmetric tensor ``A`` is identified with the polynomial
``A(r) = A(r, ..., r)``.  The coefficient of ``x**p y**q z**s`` equals the
Cartesian entry for any index multiset with those counts, times the
multinomial ``n! / (p! q! s!)``.  Coefficients live in a flat vector ordered
by ``(p, q, s)`` in descending lexicographic order.

Three scalar flavours share the representation: ``float64``, ``complex128``
and ``object`` arrays of :class:`fractions.Fraction` (exact arithmetic).
"""

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from . import _kernels
from .errors import (
    FoldTooLarge,
    OrderOutOfRange,
    RankMismatch,
    SchemaError,
    max_order,
)


# ------------------------------------------------------------------ indexing

def n_coeffs(rank):
    return (rank + 1) * (rank + 2) // 2


def index_of(p, q, s):
    """Position of ``x**p y**q z**s`` inside a rank ``p+q+s`` coefficient vector."""
    m = q + s
    return m * (m + 1) // 2 + m - q


@lru_cache(maxsize=None)
def multi_indices(rank):
    """(p, q, s) exponent triples in storage order, as a read-only int array."""
    out = np.array(
        [(p, q, rank - p - q) for p in range(rank, -1, -1) for q in range(rank - p, -1, -1)],
        dtype=np.int64,
    ).reshape(-1, 3)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def multinomials(rank):
    """Integer multinomials n!/(p!q!s!) in storage order (Python ints)."""
    return tuple(
        factorial(rank) // (factorial(p) * factorial(q) * factorial(s))
        for p, q, s in multi_indices(rank).tolist()
    )


@lru_cache(maxsize=None)
def _product_table(n, m):
    a = multi_indices(n)
    b = multi_indices(m)
    tot = a[:, None, :] + b[None, :, :]
    q, s = tot[..., 1], tot[..., 2]
    mm = q + s
    table = mm * (mm + 1) // 2 + mm - q
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def _derivative_table(rank, axis):
    """Source positions, target positions and integer factors for d/dx_axis."""
    idx = multi_indices(rank)
    src = np.nonzero(idx[:, axis] > 0)[0]
    shifted = idx[src].copy()
    shifted[:, axis] -= 1
    tgt = np.array([index_of(*t) for t in shifted.tolist()], dtype=np.int64)
    fac = idx[src, axis].copy()
    return src, tgt, fac


@lru_cache(maxsize=None)
def _laplacian_table(rank):
    idx = multi_indices(rank)
    src, tgt, fac = [], [], []
    for axis in range(3):
        sel = np.nonzero(idx[:, axis] > 1)[0]
        shifted = idx[sel].copy()
        shifted[:, axis] -= 2
        src.append(sel)
        tgt.append(np.array([index_of(*t) for t in shifted.tolist()], dtype=np.int64))
        e = idx[sel, axis]
        fac.append(e * (e - 1))
    return np.concatenate(src), np.concatenate(tgt), np.concatenate(fac)


# ------------------------------------------------------------------- dtypes

def _is_exact(arr):
    return arr.dtype == object


def _coerce(values):
    """Normalise an input coefficient array to float64, complex128 or object."""
    arr = np.asarray(values)
    if arr.dtype == object:
        if all(isinstance(v, (int, Fraction)) for v in arr.flat):
            return np.array([Fraction(v) for v in arr.flat], dtype=object).reshape(arr.shape)
        if any(isinstance(v, complex) or np.iscomplexobj(v) for v in arr.flat):
            return arr.astype(np.complex128)
        return arr.astype(np.float64)
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    if arr.dtype.kind in "biuf":
        return arr.astype(np.float64)
    raise TypeError(f"unsupported coefficient dtype {arr.dtype}")


def _common(*arrays):
    """Promote coefficient arrays to a shared flavour."""
    kinds = {a.dtype for a in arrays}
    if kinds == {np.dtype(object)}:
        return arrays
    target = np.complex128 if any(a.dtype == np.complex128 for a in arrays) else np.float64
    return tuple(
        np.array([complex(v) if target == np.complex128 else float(v) for v in a], dtype=target)
        if a.dtype == object
        else a.astype(target, copy=False)
        for a in arrays
    )


def _scale(arr, factor):
    """Multiply by an int/Fraction factor without leaving the exact flavour."""
    if _is_exact(arr):
        factor = Fraction(factor)
        return np.array([v * factor for v in arr], dtype=object)
    return arr * float(factor)


def _zeros(size, dtype):
    if dtype == object:
        return np.array([Fraction(0)] * size, dtype=object)
    return np.zeros(size, dtype=dtype)


# ------------------------------------------------------------------ the type

class SymTensor:
    """Rank-n fully symmetric tensor over R^3 (or C^3).

    Parameters
    ----------
    rank : int
        Tensor rank, at most the current order cap (16 by default).
    coeffs : array_like
        ``(rank+1)(rank+2)/2`` homogeneous-polynomial coefficients in storage
        order (see :func:`multi_indices`).
    """

    __slots__ = ("rank", "coeffs")

    def __init__(self, rank, coeffs):
        rank = int(rank)
        if rank < 0:
            raise ValueError("rank must be non-negative")
        cap = max_order()
        if rank > cap:
            raise OrderOutOfRange(f"rank {rank} exceeds cap {cap}")
        arr = _coerce(coeffs).reshape(-1)
        if arr.shape[0] != n_coeffs(rank):
            raise ValueError(f"rank {rank} needs {n_coeffs(rank)} coefficients, got {arr.shape[0]}")
        arr = arr.copy()
        arr.flags.writeable = False
        self.rank = rank
        self.coeffs = arr

    # constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, rank, dtype=np.float64):
        return cls(rank, _zeros(n_coeffs(rank), dtype))

    @classmethod
    def scalar(cls, value):
        return cls(0, np.array([value], dtype=object if isinstance(value, (int, Fraction)) else None))

    @classmethod
    def from_terms(cls, rank, terms):
        """Build from a mapping ``{(p, q, s): coefficient}``."""
        values = list(terms.values())
        exact = all(isinstance(v, (int, Fraction)) for v in values)
        cplx = any(isinstance(v, complex) or np.iscomplexobj(v) for v in values)
        dtype = object if exact else (np.complex128 if cplx else np.float64)
        arr = _zeros(n_coeffs(rank), dtype)
        for (p, q, s), c in terms.items():
            if p + q + s != rank or min(p, q, s) < 0:
                raise ValueError(f"exponents {(p, q, s)} do not match rank {rank}")
            arr[index_of(p, q, s)] += Fraction(c) if exact else c
        return cls(rank, arr)

    # flavour ------------------------------------------------------------
    @property
    def kind(self):
        return "complex" if self.coeffs.dtype == np.complex128 else "real"

    @property
    def exact(self):
        return _is_exact(self.coeffs)

    def to_float(self):
        if self.exact:
            return SymTensor(self.rank, np.array([float(v) for v in self.coeffs]))
        return self

    def to_complex(self):
        return SymTensor(self.rank, _common(self.coeffs, np.zeros(1, np.complex128))[0])

    @property
    def real(self):
        if self.kind == "complex":
            return SymTensor(self.rank, self.coeffs.real)
        return self

    @property
    def imag(self):
        if self.kind == "complex":
            return SymTensor(self.rank, self.coeffs.imag)
        return SymTensor.zeros(self.rank)

    def conj(self):
        return SymTensor(self.rank, np.conj(self.coeffs)) if self.kind == "complex" else self

    # arithmetic ---------------------------------------------------------
    def _binary(self, other, op):
        if not isinstance(other, SymTensor):
            return NotImplemented
        if other.rank != self.rank:
            raise RankMismatch(f"ranks {self.rank} and {other.rank} differ")
        a, b = _common(self.coeffs, other.coeffs)
        return SymTensor(self.rank, op(a, b))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return SymTensor(self.rank, -self.coeffs)

    def __mul__(self, factor):
        if isinstance(factor, SymTensor):
            return sym_product(self, factor)
        if self.exact and isinstance(factor, (int, Fraction)):
            return SymTensor(self.rank, _scale(self.coeffs, factor))
        return SymTensor(self.rank, self.to_float().coeffs * factor)

    __rmul__ = __mul__

    def __truediv__(self, factor):
        if self.exact and isinstance(factor, (int, Fraction)):
            return SymTensor(self.rank, _scale(self.coeffs, Fraction(1) / Fraction(factor)))
        return self * (1.0 / factor)

    # inspection ---------------------------------------------------------
    def __getitem__(self, pqs):
        return self.coeffs[index_of(*pqs)]

    def terms(self):
        """Non-zero ``{(p, q, s): coefficient}`` entries."""
        return {
            tuple(e): c for e, c in zip(multi_indices(self.rank).tolist(), self.coeffs) if c != 0
        }

    def norm(self):
        """Largest coefficient magnitude (0 for the zero tensor)."""
        if self.coeffs.size == 0:
            return 0.0
        return float(max(abs(complex(v)) for v in self.coeffs)) if self.exact else float(
            np.max(np.abs(self.coeffs))
        )

    def allclose(self, other, atol=1e-12, rtol=0.0):
        if self.rank != other.rank:
            return False
        a, b = _common(self.to_float().coeffs, other.to_float().coeffs)
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    def __repr__(self):
        terms = self.terms()
        if not terms:
            return f"SymTensor(rank={self.rank}, 0)"
        names = "xyz"
        parts = []
        for exps, c in terms.items():
            mono = "*".join(
                f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(exps) if e
            )
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"SymTensor(rank={self.rank}, {' + '.join(parts)})"

    # calculus -----------------------------------------------------------
    def derivative(self, axis):
        """Partial derivative of the polynomial, a rank n-1 tensor (zero for rank 0)."""
        if self.rank == 0:
            return SymTensor.zeros(0, self.coeffs.dtype)
        src, tgt, fac = _derivative_table(self.rank, axis)
        out = _zeros(n_coeffs(self.rank - 1), self.coeffs.dtype)
        if self.exact:
            for i, j, f in zip(src.tolist(), tgt.tolist(), fac.tolist()):
                out[j] += self.coeffs[i] * f
        else:
            out[tgt] = self.coeffs[src] * fac
        return SymTensor(self.rank - 1, out)

    def directional(self, vector):
        """(v . grad) applied to the polynomial."""
        v = np.asarray(vector)
        parts = [self.derivative(axis) * _exactify(v[axis]) for axis in range(3)]
        return parts[0] + parts[1] + parts[2]

    def laplacian(self):
        if self.rank < 2:
            raise FoldTooLarge("Laplacian needs rank >= 2")
        src, tgt, fac = _laplacian_table(self.rank)
        out = _zeros(n_coeffs(self.rank - 2), self.coeffs.dtype)
        if self.exact:
            for i, j, f in zip(src.tolist(), tgt.tolist(), fac.tolist()):
                out[j] += self.coeffs[i] * f
        else:
            np.add.at(out, tgt, self.coeffs[src] * fac)
        return SymTensor(self.rank - 2, out)

    # evaluation ---------------------------------------------------------
    def evaluate(self, r):
        return evaluate(self, r)

    def evaluate_many(self, points):
        """Polynomial values at an (N, 3) array of points."""
        pts = np.asarray(points)
        coeffs = self.to_float().coeffs
        if pts.dtype == object:
            pts = pts.astype(np.complex128 if any(isinstance(v, complex) for v in pts.flat) else float)
        if np.iscomplexobj(coeffs) or np.iscomplexobj(pts):
            pts = pts.astype(np.complex128)
        else:
            pts = pts.astype(np.float64)
        table = _kernels.monomial_values(pts, multi_indices(self.rank))
        return table @ coeffs

    # serialisation ------------------------------------------------------
    def to_json(self):
        entries = []
        for exps, c in zip(multi_indices(self.rank).tolist(), self.coeffs):
            if c == 0:
                continue
            c = complex(c)
            entry = {"pqs": exps, "re": c.real}
            if self.kind == "complex":
                entry["im"] = c.imag
            entries.append(entry)
        return {"rank": self.rank, "kind": self.kind, "coeffs": entries}

    @classmethod
    def from_json(cls, doc):
        return tensor_from_json(doc)


def _exactify(value):
    """Keep integers exact; everything else becomes a Python scalar."""
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, np.integer):
        return int(value)
    return complex(value) if np.iscomplexobj(value) else float(value)


def _as_sym(t):
    return t.base if hasattr(t, "base") else t


# ---------------------------------------------------------------- operations

def from_vectors(vectors):
    """Symmetrised product of vectors, i.e. the polynomial prod_i (v_i . r).

    Vectors are multiplied in a canonical sorted order, so the result does
    not depend on the input ordering, bit for bit.
    """
    vecs = [np.asarray(v) for v in vectors]
    if not vecs:
        return SymTensor(0, [1.0])
    exact = all(v.dtype == object or v.dtype.kind in "iu" for v in vecs) and all(
        isinstance(_exactify(c), (int, Fraction)) for v in vecs for c in v
    )
    if exact:
        linear = [SymTensor(1, np.array([Fraction(_exactify(c)) for c in v], dtype=object)) for v in vecs]
        keyed = sorted(linear, key=lambda t: tuple(t.coeffs))
    else:
        cplx = any(np.iscomplexobj(v) for v in vecs)
        dtype = np.complex128 if cplx else np.float64
        arrs = [np.asarray(v, dtype=dtype).reshape(3) for v in vecs]
        keyed = [
            SymTensor(1, a)
            for a in sorted(arrs, key=lambda a: tuple(np.concatenate([a.real, np.imag(a)])))
        ]
    out = keyed[0]
    for t in keyed[1:]:
        out = sym_product(out, t)
    return out


def sym_product(a, b):
    """Fully symmetrised tensor product; as polynomials, a plain product."""
    a, b = _as_sym(a), _as_sym(b)
    ca, cb = _common(a.coeffs, b.coeffs)
    rank = a.rank + b.rank
    table = _product_table(a.rank, b.rank)
    if ca.dtype == object:
        out = _zeros(n_coeffs(rank), object)
        for i, x in enumerate(ca):
            if x == 0:
                continue
            for j, y in enumerate(cb):
                out[table[i, j]] += x * y
    else:
        out = _kernels.poly_product(ca, cb, table, n_coeffs(rank))
    return SymTensor(rank, out)


@lru_cache(maxsize=None)
def _delta_power(k):
    terms = {}
    for a in range(k + 1):
        for b in range(k - a + 1):
            c = k - a - b
            terms[(2 * a, 2 * b, 2 * c)] = factorial(k) // (factorial(a) * factorial(b) * factorial(c))
    return SymTensor.from_terms(2 * k, terms)


def delta(k=1):
    """k-th symmetrised power of the metric tensor: polynomial (x^2+y^2+z^2)^k.

    Coefficients are exact integers.
    """
    if k < 0:
        raise ValueError("power must be non-negative")
    return _delta_power(k)


def _falling_ratio(n, p):
    """(n - 2p)! / n! as a Fraction."""
    return Fraction(factorial(n - 2 * p), factorial(n))


def trace(a, p=1):
    """p-fold trace; a rank n-2p tensor equal to ((n-2p)!/n!) Laplacian^p A."""
    a = _as_sym(a)
    if p < 0 or 2 * p > a.rank:
        raise FoldTooLarge(f"cannot take {p} traces of a rank-{a.rank} tensor")
    out = a
    for _ in range(p):
        out = out.laplacian()
    return SymTensor(out.rank, _scale(out.coeffs, _falling_ratio(a.rank, p)))


def _all_derivatives(t, order):
    """Map exponent triple gamma (|gamma| = order) -> d^gamma t."""
    cache = {(0, 0, 0): t}
    frontier = [(0, 0, 0)]
    for _ in range(order):
        nxt = []
        for g in frontier:
            for axis in range(3):
                h = list(g)
                h[axis] += 1
                h = tuple(h)
                if h not in cache:
                    cache[h] = cache[g].derivative(axis)
                    nxt.append(h)
        frontier = nxt
    return {g: cache[g] for g in frontier}


def contract(a, b, p):
    """p-fold contraction of two symmetric tensors, symmetrised.

    Uses ``C(r) = (n-p)!(m-p)!/(n! m!) * sum_gamma p!/gamma! d^gamma A(r) d^gamma B(r)``,
    which is the Cartesian index sum over p shared slots with the ordered
    index tuples grouped by their multiset.
    """
    a, b = _as_sym(a), _as_sym(b)
    n, m = a.rank, b.rank
    if p < 0 or p > min(n, m):
        raise FoldTooLarge(f"cannot contract {p} index pairs of ranks {n} and {m}")
    if p == n == m:
        return SymTensor(0, [full_contraction(a, b)])
    da = _all_derivatives(a, p)
    db = _all_derivatives(b, p)
    prefactor = Fraction(factorial(n - p) * factorial(m - p), factorial(n) * factorial(m))
    total = None
    for g, dag in da.items():
        weight = Fraction(factorial(p), factorial(g[0]) * factorial(g[1]) * factorial(g[2]))
        term = sym_product(dag, db[g])
        term = SymTensor(term.rank, _scale(term.coeffs, weight * prefactor))
        total = term if total is None else total + term
    return total


def full_contraction(a, b):
    """A : B for equal ranks: sum_alpha c^A_alpha c^B_alpha / multinomial(alpha)."""
    a, b = _as_sym(a), _as_sym(b)
    if a.rank != b.rank:
        raise RankMismatch(f"ranks {a.rank} and {b.rank} differ")
    ca, cb = _common(a.coeffs, b.coeffs)
    mult = multinomials(a.rank)
    if ca.dtype == object:
        return sum((x * y / w for x, y, w in zip(ca, cb, mult)), Fraction(0))
    return (ca * cb / np.array(mult, dtype=np.float64)).sum()


def apply_polarization(a, vectors):
    """Multilinear value A(v_1, ..., v_n) = (1/n!) prod_k (v_k . grad) A(r)."""
    a = _as_sym(a)
    if len(vectors) != a.rank:
        raise RankMismatch(f"rank {a.rank} tensor needs {a.rank} vectors, got {len(vectors)}")
    out = a
    for v in vectors:
        out = out.directional(v)
    value = out.coeffs[0]
    if out.exact:
        return value / factorial(a.rank)
    return value / float(factorial(a.rank))


def evaluate(a, r):
    """Homogeneous polynomial value A(r)."""
    a = _as_sym(a)
    r = list(r)
    if a.exact and all(isinstance(_exactify(c), (int, Fraction)) for c in r):
        r = [Fraction(_exactify(c)) for c in r]
        total = Fraction(0)
        for (p, q, s), c in zip(multi_indices(a.rank).tolist(), a.coeffs):
            total += c * r[0] ** p * r[1] ** q * r[2] ** s
        return total
    return a.evaluate_many(np.asarray([r]))[0]


def rotate(a, rotation):
    """Rotated tensor, A'(r) = A(R^T r)."""
    a = _as_sym(a)
    rot = np.asarray(rotation, dtype=np.float64)
    forms = [SymTensor(1, rot[:, i]) for i in range(3)]
    powers = [[SymTensor(0, [1.0])] for _ in range(3)]
    for i in range(3):
        for _ in range(a.rank):
            powers[i].append(sym_product(powers[i][-1], forms[i]))
    coeffs = a.to_float().coeffs
    out = SymTensor.zeros(a.rank, coeffs.dtype)
    for (p, q, s), c in zip(multi_indices(a.rank).tolist(), coeffs):
        if c == 0:
            continue
        out = out + sym_product(sym_product(powers[0][p], powers[1][q]), powers[2][s]) * c
    return out


def to_cartesian(a):
    """Dense Cartesian component array of shape (3,) * rank (rank <= 8)."""
    a = _as_sym(a)
    if a.rank > 8:
        raise OrderOutOfRange("dense Cartesian form limited to rank 8")
    coeffs = a.to_float().coeffs
    out = np.zeros((3,) * a.rank, dtype=coeffs.dtype)
    mult = multinomials(a.rank)
    for idx in itertools.product(range(3), repeat=a.rank):
        counts = (idx.count(0), idx.count(1), idx.count(2))
        k = index_of(*counts)
        out[idx] = coeffs[k] / mult[k]
    return out


def from_cartesian(arr):
    """Symmetric tensor from a dense array; the array is symmetrised first."""
    arr = np.asarray(arr)
    rank = arr.ndim
    sym = np.zeros_like(arr, dtype=np.result_type(arr, np.float64))
    perms = list(itertools.permutations(range(rank)))
    for perm in perms:
        sym = sym + np.transpose(arr, perm)
    sym = sym / len(perms)
    coeffs = np.zeros(n_coeffs(rank), dtype=sym.dtype)
    mult = multinomials(rank)
    for k, (p, q, s) in enumerate(multi_indices(rank).tolist()):
        idx = (0,) * p + (1,) * q + (2,) * s
        coeffs[k] = sym[idx] * mult[k]
    return SymTensor(rank, coeffs)


# ----------------------------------------------------------------------- JSON

def tensor_from_json(doc):
    """Parse the tensor JSON format; raises :class:`SchemaError` when malformed."""
    if not isinstance(doc, dict):
        raise SchemaError("tensor document must be an object")
    try:
        rank = doc["rank"]
        kind = doc.get("kind", "real")
        entries = doc["coeffs"]
    except KeyError as exc:
        raise SchemaError(f"missing field {exc}") from None
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 0:
        raise SchemaError("rank must be a non-negative integer")
    if kind not in ("real", "complex"):
        raise SchemaError(f"unknown kind {kind!r}")
    if not isinstance(entries, list):
        raise SchemaError("coeffs must be a list")
    if rank > max_order():
        raise OrderOutOfRange(f"rank {rank} exceeds cap {max_order()}")
    dtype = np.complex128 if kind == "complex" else np.float64
    coeffs = np.zeros(n_coeffs(rank), dtype=dtype)
    seen = set()
    for entry in entries:
        if not isinstance(entry, dict) or "pqs" not in entry:
            raise SchemaError("each coefficient needs a 'pqs' field")
        pqs = entry["pqs"]
        if (
            not isinstance(pqs, list)
            or len(pqs) != 3
            or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in pqs)
            or sum(pqs) != rank
        ):
            raise SchemaError(f"bad exponent triple {pqs!r} for rank {rank}")
        if tuple(pqs) in seen:
            raise SchemaError(f"duplicate exponent triple {pqs!r}")
        seen.add(tuple(pqs))
        re, im = entry.get("re", 0.0), entry.get("im", 0.0)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            raise SchemaError("coefficient values must be numbers")
        if not (np.isfinite(re) and np.isfinite(im)):
            raise SchemaError("coefficient values must be finite")
        if kind == "real" and im != 0:
            raise SchemaError("real tensor with non-zero imaginary part")
        coeffs[index_of(*pqs)] = complex(re, im) if kind == "complex" else re
    return SymTensor(rank, coeffs)
