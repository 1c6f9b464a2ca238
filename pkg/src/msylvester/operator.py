"""Spin observables as harmonic tensors and their expectation values.

A classical observable is a function on the unit sphere, stored as its
harmonic components ``A_l``.  The Q symbol (coherent-state expectation) and
the P symbol (coherent-state integral kernel) of the quantised operator are
``alpha_{J,l} A_l`` and ``beta_{J,l} A_l``; both vanish above ``l = 2J``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import factorial

import numpy as np

from . import _kernels
from .errors import OrderExceedsSpin, SchemaError, ZeroTensor
from .harmonic import (
    HarmonicTensor,
    _hafnian,
    harmonic_components,
    harmonic_inner_product,
)
from .legendre import double_factorial, legendre_coeffs
from .multipole import sylvester_decompose
from .spinstate import husimi_harmonic_component
from .symtensor import SymTensor, _as_sym, tensor_from_json

KINDS = ("classical", "Q", "P")
ZERO_TOL = 1e-14


def alpha(two_j, order):
    """Q-symbol factor (2J)! / (2^l (2J - l)!), zero for l > 2J."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > two_j:
        return Fraction(0)
    return Fraction(factorial(two_j), 2**order * factorial(two_j - order))


def beta(two_j, order):
    """P-symbol factor (2J + l + 1)! / (2^l (2J + 1)!), zero for l > 2J."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > two_j:
        return Fraction(0)
    return Fraction(factorial(two_j + order + 1), 2**order * factorial(two_j + 1))


@dataclass(frozen=True)
class ClassicalObservable:
    """Harmonic components ``{l: A_l}`` of a symbol on the unit sphere.

    ``kind`` records whether the components are the classical symbol or
    already scaled to a Q or P symbol.
    """

    components: dict = field(default_factory=dict)
    kind: str = "classical"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        comps = {}
        for ell, comp in self.components.items():
            h = comp if isinstance(comp, HarmonicTensor) else HarmonicTensor(comp)
            if h.order != ell:
                raise ValueError(f"component stored under order {ell} has order {h.order}")
            comps[int(ell)] = h
        object.__setattr__(self, "components", dict(sorted(comps.items())))

    @property
    def orders(self):
        return list(self.components)

    def max_order(self):
        """Highest order carrying a non-zero component (-1 if none)."""
        live = [ell for ell, c in self.components.items() if c.norm() > ZERO_TOL]
        return max(live, default=-1)

    def __add__(self, other):
        if other.kind != self.kind:
            raise ValueError("cannot add symbols of different kinds")
        comps = dict(self.components)
        for ell, c in other.components.items():
            comps[ell] = comps[ell] + c if ell in comps else c
        return ClassicalObservable(comps, self.kind)

    def __mul__(self, factor):
        return ClassicalObservable({ell: c * factor for ell, c in self.components.items()}, self.kind)

    __rmul__ = __mul__

    def evaluate_many(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        total = np.zeros(pts.shape[0])
        for comp in self.components.values():
            total = total + np.real(comp.evaluate_many(pts))
        return total

    def to_json(self):
        return {
            "kind": self.kind,
            "components": [{"order": ell, "tensor": c.to_json()} for ell, c in self.components.items()],
        }

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict) or "components" not in doc:
            raise SchemaError("observable document needs 'components'")
        kind = doc.get("kind", "classical")
        if kind not in KINDS:
            raise SchemaError(f"unknown observable kind {kind!r}")
        comps = {}
        for entry in doc["components"]:
            if not isinstance(entry, dict) or "order" not in entry or "tensor" not in entry:
                raise SchemaError("each component needs 'order' and 'tensor'")
            tensor = tensor_from_json(entry["tensor"])
            if tensor.rank != entry["order"]:
                raise SchemaError("component order disagrees with tensor rank")
            if tensor.kind != "real":
                raise SchemaError("observable components must be real")
            h = HarmonicTensor(tensor, atol=1e-9)
            ell = entry["order"]
            comps[ell] = comps[ell] + h if ell in comps else h
        return cls(comps, kind)


def classical_from_polynomial(apoly):
    """Observable whose symbol is the polynomial restricted to the unit sphere.

    Every factor r.r of the canonical decomposition becomes 1, so equal
    orders coming from different source ranks add up.
    """
    a = _as_sym(apoly)
    if a.kind == "complex":
        raise ValueError("observables must be real")
    comps = {}
    for k, h in enumerate(harmonic_components(a)):
        ell = a.rank - 2 * k
        comps[ell] = comps[ell] + h if ell in comps else h
    return ClassicalObservable(comps)


def observable_from_polynomials(polys):
    """Sum of :func:`classical_from_polynomial` over several homogeneous parts."""
    out = ClassicalObservable({})
    for p in polys:
        out = out + classical_from_polynomial(p)
    return out


def _factor(kind, two_j, ell):
    if kind == "Q":
        return alpha(two_j, ell)
    if kind == "P":
        return beta(two_j, ell)
    return Fraction(1)


def to_symbol(obs, two_j, kind):
    """Rescale a classical observable into its Q or P symbol; orders above 2J drop out."""
    if kind == "classical":
        raise ValueError("target kind must be 'Q' or 'P'")
    if obs.kind != "classical":
        obs = to_classical(obs, two_j)
    comps = {
        ell: c * _factor(kind, two_j, ell) for ell, c in obs.components.items() if ell <= two_j
    }
    return ClassicalObservable(comps, kind)


def to_classical(obs, two_j):
    """Undo the Q/P scaling (orders above 2J cannot be recovered and must be absent)."""
    if obs.kind == "classical":
        return obs
    comps = {}
    for ell, c in obs.components.items():
        f = _factor(obs.kind, two_j, ell)
        if f == 0:
            if c.norm() > ZERO_TOL:
                raise OrderExceedsSpin(f"order {ell} exceeds 2J = {two_j}")
            continue
        comps[ell] = c / f
    return ClassicalObservable(comps)


def _check_orders(obs, two_j):
    top = obs.max_order()
    if top > two_j:
        raise OrderExceedsSpin(f"observable has order {top} > 2J = {two_j}")


def expectation_tensor(psi, obs):
    """<psi|A|psi> = (2J+1) sum_l <Q_l beta_l A_l>_sphere."""
    obs = to_classical(obs, psi.two_j)
    _check_orders(obs, psi.two_j)
    total = 0.0
    for ell, comp in obs.components.items():
        if comp.norm() <= ZERO_TOL:
            continue
        q = husimi_harmonic_component(psi, ell)
        total += float(beta(psi.two_j, ell)) * harmonic_inner_product(q, comp)
    return float((psi.two_j + 1) * np.real(total))


# ------------------------------------------------------------ skeleton route

def skeleton_vectors(h):
    """Multipole vectors carrying the scale: ``|c|**(1/l) u_i``, sign on the first."""
    skel = sylvester_decompose(h)
    ell = skel.order
    vecs = np.array(skel.axes) * skel.scale ** (1.0 / ell)
    vecs[0] *= skel.sign
    return vecs


def _subset_hafnians(gram, size):
    """{subset: hafnian of gram restricted to it} for all subsets of a given size."""
    n = gram.shape[0]
    return {
        s: _hafnian(gram[np.ix_(s, s)]) if s else 1.0 for s in combinations(range(n), size)
    }


def trace_pair_contraction(qv, av, p):
    """U^(l,p) : V^(l,p) for U = (.) qv and V = (.) av, from dot products only.

    Averages, over the ways of pairing 2p of the q's and 2p of the a's, the
    product of the paired dot products times the permanent of the cross
    Gram matrix of the leftover vectors, divided by (l - 2p)!.
    """
    ell = len(qv)
    gqq, gaa, gqa = qv @ qv.T, av @ av.T, qv @ av.T
    hq = _subset_hafnians(gqq, 2 * p)
    ha = _subset_hafnians(gaa, 2 * p)
    full = set(range(ell))
    total = 0.0
    for sq, wq in hq.items():
        rq = sorted(full - set(sq))
        for sa, wa in ha.items():
            ra = sorted(full - set(sa))
            total += wq * wa * _kernels.permanent(np.ascontiguousarray(gqa[np.ix_(rq, ra)]))
    n_match = len(hq) * double_factorial(2 * p - 1)
    return total / (n_match**2 * factorial(ell - 2 * p))


def skeleton_inner_product(qh, ah):
    """Sphere mean of Q(n) A(n) for two order-l harmonics from their multipole vectors."""
    ell = qh.order
    if ell == 0:
        return float(np.real(qh.coeffs[0] * ah.coeffs[0]))
    qv, av = skeleton_vectors(qh), skeleton_vectors(ah)
    pl = legendre_coeffs(ell)
    total = sum(
        float(c / pl[0]) * trace_pair_contraction(qv, av, p) for p, c in enumerate(pl.coeffs)
    )
    return float(factorial(ell)) / double_factorial(2 * ell + 1) * total


def expectation_skeleton(psi, obs):
    """Same value as :func:`expectation_tensor`, computed from multipole vectors."""
    obs = to_classical(obs, psi.two_j)
    _check_orders(obs, psi.two_j)
    total = 0.0
    for ell, comp in obs.components.items():
        if comp.norm() <= ZERO_TOL:
            continue
        q = husimi_harmonic_component(psi, ell)
        a = comp * float(beta(psi.two_j, ell))
        try:
            total += skeleton_inner_product(q, a)
        except ZeroTensor:
            continue
    return float((psi.two_j + 1) * total)


def constant_observable(value):
    return ClassicalObservable({0: HarmonicTensor(SymTensor(0, [float(value)]), check=False)})
