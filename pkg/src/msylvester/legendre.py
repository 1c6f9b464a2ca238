"""Exact-rational Legendre coefficient tables.

Everything here is computed with :class:`fractions.Fraction` and Python
integers; floats only appear in :func:`eval_legendre`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import OrderOutOfRange, max_order


def double_factorial(n):
    """n!! with the conventions 0!! = (-1)!! = 1."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def _check(order, what):
    cap = max_order()
    if not 0 <= order <= cap:
        raise OrderOutOfRange(f"{what} {order} outside [0, {cap}]")


@dataclass(frozen=True)
class LegendreCoeffs:
    """Coefficients of P_l(x) = sum_k coeffs[k] * x**(l - 2k)."""

    order: int
    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def dense(self):
        """Monomial coefficients in ascending powers of x (length order + 1)."""
        out = [Fraction(0)] * (self.order + 1)
        for k, c in enumerate(self.coeffs):
            out[self.order - 2 * k] = c
        return out


@lru_cache(maxsize=None)
def _legendre_table(order):
    return tuple(
        Fraction(
            (-1) ** k * double_factorial(2 * order - 2 * k - 1),
            2**k * factorial(k) * factorial(order - 2 * k),
        )
        for k in range(order // 2 + 1)
    )


def legendre_coeffs(order):
    """Exact coefficients p_{l,k}, k = 0..floor(l/2), of the Legendre polynomial.

    Examples
    --------
    >>> [str(c) for c in legendre_coeffs(2)]
    ['3/2', '-1/2']
    """
    _check(order, "order")
    return LegendreCoeffs(order, _legendre_table(order))


@lru_cache(maxsize=None)
def _monomial_table(degree):
    n = degree
    return tuple(
        Fraction(
            (2 * n - 4 * k + 1) * factorial(n),
            2**k * factorial(k) * double_factorial(2 * n - 2 * k + 1),
        )
        for k in range(n // 2 + 1)
    )


def monomial_coeffs(degree):
    """Coefficients q_{n,k} with x**n = sum_k q_{n,k} P_{n-2k}(x)."""
    _check(degree, "degree")
    return list(_monomial_table(degree))


def eval_legendre(order, x):
    """P_l(x) from the coefficient table, with x clamped to [-1, 1]."""
    if abs(x) > 1 + 1e-12:
        raise ValueError(f"x={x} outside [-1, 1]")
    x = min(1.0, max(-1.0, float(x)))
    coeffs = legendre_coeffs(order)
    # Horner in x**2; coeffs[0] multiplies the highest power.
    x2 = x * x
    acc = 0.0
    for c in coeffs.coeffs:
        acc = acc * x2 + float(c)
    return acc * (x if order % 2 else 1.0)


def binomial_legendre_coeffs(degree):
    """Coefficients c_l with (1 + x)**n = sum_{l=0}^{n} c_l P_l(x)."""
    _check(degree, "degree")
    n = degree
    return [
        Fraction(
            2**n * factorial(n) ** 2 * (2 * ell + 1),
            factorial(n + ell + 1) * factorial(n - ell),
        )
        for ell in range(n + 1)
    ]


def legendre_dense_float(order):
    """Ascending monomial coefficients of P_l as floats (for numpy evaluation)."""
    return [float(c) for c in legendre_coeffs(order).dense()]
