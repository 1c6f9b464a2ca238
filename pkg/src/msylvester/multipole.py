"""Maxwell multipole vectors and their recovery from a harmonic tensor.

A real order-l harmonic ``H`` is the traceless part of ``c * u_1 (.) ... (.) u_l``
for unit axes ``u_i`` that are unique up to pairwise sign flips.  The axes
are recovered by restricting ``H`` to the isotropic cone: on the null vector
``m(z)`` every trace term drops out, so ``H(m(z)) = c * prod_i (u_i . m(z))``
and each axis contributes an antipodal pair of roots.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import (
    NonOrthonormalFrame,
    NotTraceless,
    PairingFailure,
    RankMismatch,
    SingularOrigin,
    ZeroTensor,
)
from .harmonic import (
    HarmonicTensor,
    harmonic_inner_product,
    harmonic_part,
)
from .legendre import double_factorial
from .roots import binary_form_roots
from .symtensor import SymTensor, _as_sym, delta, from_vectors, full_contraction, sym_product, trace

MAX_SYLVESTER_ORDER = 12
PAIR_TOL = 1e-6
TRACE_TOL = 1e-9


def canonical_axis(u):
    """Return (axis, flipped) with the sign fixed by z > 0, then x > 0, then y > 0."""
    u = np.asarray(u, dtype=np.float64)
    for comp in (2, 0, 1):
        if u[comp] > 0:
            return u, False
        if u[comp] < 0:
            return -u, True
    return u, False


@dataclass(frozen=True, eq=False)
class Skeleton:
    """Multipole vectors of an order-l harmonic.

    Use :meth:`from_axes` to build one; it normalises and canonicalises.

    Attributes
    ----------
    order : int
    axes : ndarray, shape (order, 3)
        Canonical unit axes sorted lexicographically.
    scale : float
        Non-negative magnitude.
    sign : int
        +1 or -1.
    multiplicities : tuple of int
        Root-cluster sizes reported by the decomposer (empty when built by hand).
    """

    order: int
    axes: np.ndarray
    scale: float
    sign: int = 1
    multiplicities: tuple = field(default=(), compare=False)

    @classmethod
    def from_axes(cls, axes, scale=1.0, sign=1, multiplicities=()):
        axes = np.asarray(axes, dtype=np.float64).reshape(-1, 3)
        sign = 1 if sign >= 0 else -1
        if scale < 0:
            scale, sign = -scale, -sign
        canon = []
        for u in axes:
            norm = np.linalg.norm(u)
            if norm == 0.0:
                raise ValueError("axes must be non-zero")
            v, flipped = canonical_axis(u / norm)
            if flipped:
                sign = -sign
            canon.append(v)
        canon.sort(key=tuple)
        out = np.array(canon, dtype=np.float64).reshape(-1, 3)
        out.flags.writeable = False
        return cls(len(canon), out, float(scale), sign, tuple(multiplicities))

    def __eq__(self, other):
        if not isinstance(other, Skeleton):
            return NotImplemented
        return (
            self.order == other.order
            and self.scale == other.scale
            and self.sign == other.sign
            and np.array_equal(self.axes, other.axes)
        )

    __hash__ = None

    @property
    def charge(self):
        """Signed scale."""
        return self.sign * self.scale

    def tensor(self):
        """The (non-traceless) skeleton tensor ``charge * u_1 (.) ... (.) u_l``."""
        return from_vectors(list(self.axes)) * self.charge

    def to_json(self):
        return {
            "order": self.order,
            "scale": self.scale,
            "sign": self.sign,
            "axes": self.axes.tolist(),
        }

    @classmethod
    def from_json(cls, doc):
        from .errors import SchemaError

        try:
            order, axes = doc["order"], doc["axes"]
            scale, sign = doc.get("scale", 1.0), doc.get("sign", 1)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"bad skeleton document: {exc}") from None
        if len(axes) != order:
            raise SchemaError("axis count differs from order")
        return cls.from_axes(axes, scale, sign)


def skeleton_to_harmonic(s):
    """Traceless part of the skeleton tensor."""
    return harmonic_part(s.tensor())


# ------------------------------------------------------------------ potential

def maxwell_potential(s, r):
    """q (-1)^l / l! prod_i (u_i . grad) (1/r), differentiated symbolically.

    After k derivatives the potential is ``N_k(r) / |r|**(2k+1)`` with a
    degree-k polynomial ``N_k``; one more derivative along ``u`` gives
    ``N_{k+1} = |r|**2 (u . grad) N_k - (2k+1) (u . r) N_k``.
    """
    r = np.asarray(r, dtype=np.float64)
    dist = np.linalg.norm(r)
    if dist == 0.0:
        raise SingularOrigin("the potential is singular at the origin")
    num = SymTensor(0, [1.0])
    for k, u in enumerate(s.axes):
        lin = SymTensor(1, u)
        nxt = sym_product(lin, num) * float(-(2 * k + 1))
        if k:
            nxt = nxt + sym_product(delta(1), num.directional(u))
        num = nxt
    ell = s.order
    return s.charge * (-1) ** ell / factorial(ell) * num.evaluate(r) / dist ** (2 * ell + 1)


def maxwell_ratio(order):
    """Constant (2l-1)!!/l! linking the Maxwell potential and the irregular harmonic."""
    return double_factorial(2 * order - 1) / factorial(order)


# ------------------------------------------------------------------ Sylvester

def null_vectors(z):
    """Isotropic vectors m(z) = ((1 - z^2)/2, -i(1 + z^2)/2, z)."""
    z = np.asarray(z, dtype=np.complex128)
    return np.stack([(1 - z**2) / 2, -1j * (1 + z**2) / 2, z], axis=-1)


def sylvester_polynomial(h):
    """Ascending coefficients of H(m(z)), a polynomial of nominal degree 2l.

    Obtained by sampling on the unit circle and a discrete Fourier transform.
    """
    h = _as_sym(h)
    npts = 2 * h.rank + 1
    z = np.exp(2j * np.pi * np.arange(npts) / npts)
    values = h.to_complex().evaluate_many(null_vectors(z))
    return np.fft.fft(values) / npts


def pair_to_point(pair):
    """Unit vector attached to a root (a : b) of the Sylvester polynomial."""
    a, b = pair
    norm = abs(a) ** 2 + abs(b) ** 2
    w = 2.0 * np.conj(a) * b / norm
    return np.array([w.real, w.imag, (abs(a) ** 2 - abs(b) ** 2) / norm])


def point_to_roots(u):
    """The two roots (homogeneous pairs) contributed by axis ``u``."""
    u = np.asarray(u, dtype=np.float64)
    w = complex(u[0], u[1])
    return (
        np.array([1 + u[2], w]) if u[2] > -1 else np.array([0.0, 1.0]),
        np.array([u[2] - 1, w]) if u[2] < 1 else np.array([1.0, 0.0]),
    )


def _pair_antipodes(points, tol):
    """Match points into antipodal pairs; returns axes and matched distances."""
    n = len(points)
    pts = np.asarray(points)
    cost = np.linalg.norm(pts[:, None, :] + pts[None, :, :], axis=-1)
    np.fill_diagonal(cost, np.inf)
    free = set(range(n))
    axes = []
    worst = 0.0
    order = np.argsort(cost, axis=None, kind="stable")
    for flat in order:
        i, j = divmod(int(flat), n)
        if i not in free or j not in free:
            continue
        if cost[i, j] > tol:
            break
        free -= {i, j}
        worst = max(worst, cost[i, j])
        axis = pts[i] - pts[j]
        axes.append(axis / np.linalg.norm(axis))
        if not free:
            break
    if free:
        raise PairingFailure(
            f"{len(free)} roots have no antipodal partner within chordal distance {tol:g}"
        )
    return axes, worst


def sylvester_decompose(h, pair_tol=PAIR_TOL):
    """Multipole vectors and scale of a real harmonic tensor.

    Parameters
    ----------
    h : HarmonicTensor or SymTensor
        Real, traceless, non-zero, order <= 12.

    Returns
    -------
    Skeleton
        Whose :func:`skeleton_to_harmonic` reproduces ``h``.

    Raises
    ------
    NotTraceless, ZeroTensor, PairingFailure
    """
    base = _as_sym(h).to_float()
    ell = base.rank
    if ell > MAX_SYLVESTER_ORDER:
        raise RankMismatch(f"Sylvester decomposition limited to order {MAX_SYLVESTER_ORDER}")
    if base.kind == "complex":
        if np.max(np.abs(base.coeffs.imag)) > 1e-12 * max(1.0, base.norm()):
            raise PairingFailure("complex tensors have no real multipole vectors")
        base = base.real
    size = base.norm()
    if size == 0.0:
        raise ZeroTensor("cannot decompose the zero tensor")
    if ell >= 2 and trace(base, 1).norm() > TRACE_TOL * max(1.0, size):
        raise NotTraceless(f"trace norm {trace(base, 1).norm():.3e} exceeds {TRACE_TOL:g}")
    if ell == 0:
        value = float(base.coeffs[0])
        return Skeleton.from_axes(np.zeros((0, 3)), abs(value), 1 if value > 0 else -1)
    roots = binary_form_roots(sylvester_polynomial(base))
    points = [pair_to_point(p) for p in roots.pairs]
    axes, _ = _pair_antipodes(points, pair_tol)
    trial = Skeleton.from_axes(axes, 1.0, 1)
    unit = skeleton_to_harmonic(trial)
    # Least-squares fit of the single real factor.
    charge = full_contraction(base, unit) / full_contraction(unit, unit)
    mult = tuple(sorted(roots.multiplicities, reverse=True)[::2])
    return Skeleton.from_axes(trial.axes, abs(charge), trial.sign * (1 if charge >= 0 else -1), mult)


def axes_match(a, b):
    """Largest angle (rad) between matched axes of two skeletons, up to sign and order."""
    a = np.asarray(a).reshape(-1, 3)
    b = np.asarray(b).reshape(-1, 3)
    if a.shape != b.shape:
        return np.inf
    free = list(range(len(b)))
    worst = 0.0
    for u in a:
        angles = [np.arctan2(np.linalg.norm(np.cross(u, b[j])), abs(u @ b[j])) for j in free]
        k = int(np.argmin(angles))
        worst = max(worst, angles[k])
        free.pop(k)
    return worst


# ------------------------------------------------------------------ sectorial

def _check_frame(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if abs(np.linalg.norm(a) - 1) > 1e-10 or abs(np.linalg.norm(b) - 1) > 1e-10 or abs(a @ b) > 1e-10:
        raise NonOrthonormalFrame("sectorial frame vectors must be orthonormal")
    return a, b


def sectorial(a, b, phi, order):
    """Complex sectorial harmonic ``((a + i b) e^{i phi})^{(.) l}`` with axis a x b."""
    a, b = _check_frame(a, b)
    v = (a + 1j * b) * np.exp(1j * phi)
    return HarmonicTensor(from_vectors([v] * order), check=False)


def real_sectorial(a, b, phi, order):
    return sectorial(a, b, phi, order).real


def frame_for_axis(n):
    """Orthonormal (a, b) with a x b = n."""
    n = np.asarray(n, dtype=np.float64)
    n = n / np.linalg.norm(n)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    a = np.cross(helper, n)
    a /= np.linalg.norm(a)
    return a, np.cross(n, a)


def interaction_energy(a, b):
    """Cross term of the electrostatic energy of two order-l multipoles."""
    a, b = _as_sym(a), _as_sym(b)
    if a.rank != b.rank:
        raise RankMismatch(f"orders {a.rank} and {b.rank} differ")
    ell = a.rank
    if ell == 0:
        raise RankMismatch("interaction energy needs order >= 1")
    return harmonic_inner_product(a, b) / (ell * (ell + 1))


# ------------------------------------------------------------------ plot data

@dataclass(frozen=True)
class CircleSamples:
    """Nodal great circles of a skeleton plus a coarse sign map."""

    circles: list
    grid_points: np.ndarray
    signs: np.ndarray

    def __len__(self):
        return len(self.circles)

    def __iter__(self):
        return iter(self.circles)

    def csv_rows(self):
        for k, pts in enumerate(self.circles):
            for x, y, z in pts:
                yield k, x, y, z


def great_circle_samples(s, count, grid=8):
    """Points on the great circle orthogonal to each axis.

    The skeleton polynomial vanishes on these circles.  ``signs`` holds the
    sign of the polynomial at the cell centres of a ``grid x 2*grid``
    latitude-longitude grid.
    """
    if count < 3:
        raise ValueError("need at least 3 samples per circle")
    t = 2.0 * np.pi * np.arange(count) / count
    circles = []
    for u in s.axes:
        e1, e2 = frame_for_axis(u)
        circles.append(np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2))
    theta = (np.arange(grid) + 0.5) * np.pi / grid
    phi = (np.arange(2 * grid) + 0.5) * np.pi / grid
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
    signs = np.sign(s.tensor().evaluate_many(pts)).astype(int)
    return CircleSamples(circles, pts, signs)
