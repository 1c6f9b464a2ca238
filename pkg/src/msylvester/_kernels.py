"""Numeric inner loops, each in a numba and a pure-numpy flavour.

The public names (``monomial_values``, ``poly_product``, ``aberth``,
``permanent``) are bound at import time to the numba versions unless
``MSYLVESTER_DISABLE_NUMBA`` is set to a non-empty value other than ``0``
or numba cannot be imported.  Both flavours stay importable as
``*_np`` / ``*_nb`` so tests and the benchmark can compare them.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _numba_requested():
    flag = os.environ.get("MSYLVESTER_DISABLE_NUMBA", "")
    return flag in ("", "0")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------- monomials

def monomial_values_np(points, exps):
    """Table ``out[i, j] = x_i**p_j * y_i**q_j * z_i**s_j``."""
    points = np.asarray(points)
    exps = np.asarray(exps, dtype=np.int64)
    top = int(exps.max()) if exps.size else 0
    # powers[k, i, c] = points[i, c] ** k
    powers = np.empty((top + 1,) + points.shape, dtype=points.dtype)
    powers[0] = 1
    for k in range(1, top + 1):
        powers[k] = powers[k - 1] * points
    n = points.shape[0]
    rows = np.arange(n)[:, None]
    return (
        powers[exps[None, :, 0], rows, 0]
        * powers[exps[None, :, 1], rows, 1]
        * powers[exps[None, :, 2], rows, 2]
    )


def _monomial_values_nb_impl(points, exps):
    n = points.shape[0]
    m = exps.shape[0]
    top = 0
    for j in range(m):
        for c in range(3):
            if exps[j, c] > top:
                top = exps[j, c]
    out = np.empty((n, m), dtype=points.dtype)
    pw = np.empty((top + 1, 3), dtype=points.dtype)
    for i in range(n):
        for c in range(3):
            pw[0, c] = 1
            for k in range(1, top + 1):
                pw[k, c] = pw[k - 1, c] * points[i, c]
        for j in range(m):
            out[i, j] = pw[exps[j, 0], 0] * pw[exps[j, 1], 1] * pw[exps[j, 2], 2]
    return out


# ---------------------------------------------------------- polynomial product

def poly_product_np(a, b, table, size):
    """Accumulate ``out[table[i, j]] += a[i] * b[j]``."""
    dtype = np.result_type(a, b)
    out = np.zeros(size, dtype=dtype)
    np.add.at(out, table.ravel(), np.multiply.outer(a, b).ravel())
    return out


def _poly_product_nb_impl(a, b, table, size):
    out = np.zeros(size, dtype=a.dtype)
    for i in range(a.shape[0]):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(b.shape[0]):
            out[table[i, j]] += ai * b[j]
    return out


# ------------------------------------------------------------- Aberth-Ehrlich

def _horner_np(coeffs, z):
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def aberth_np(coeffs, z0, tol, maxiter):
    """Simultaneous Aberth-Ehrlich iteration (Jacobi sweep).

    ``coeffs`` are ascending monomial coefficients with non-zero leading term;
    ``z0`` the starting guesses.  Returns ``(roots, iterations, converged)``.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.array(z0, dtype=np.complex128)
    nroots = z.shape[0]
    eye = np.eye(nroots, dtype=bool)
    for it in range(1, maxiter + 1):
        p, dp = _horner_np(coeffs, z)
        diff = z[:, None] - z[None, :]
        diff[eye] = 1.0
        inv = 1.0 / diff
        inv[eye] = 0.0
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p == 0, 0.0, p / dp)
            step = np.where(ratio == 0, 0.0, ratio / (1.0 - ratio * s))
        if not np.all(np.isfinite(step)):
            return z, it, False
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            return z, it, True
    return z, maxiter, False


def _aberth_nb_impl(coeffs, z0, tol, maxiter):
    z = z0.copy()
    n = z.shape[0]
    deg = coeffs.shape[0] - 1
    for it in range(1, maxiter + 1):
        done = True
        for k in range(n):
            zk = z[k]
            p = coeffs[deg]
            dp = 0j
            for i in range(deg - 1, -1, -1):
                dp = dp * zk + p
                p = p * zk + coeffs[i]
            if p == 0:
                continue
            ratio = p / dp
            s = 0j
            for j in range(n):
                if j != k:
                    s += 1.0 / (zk - z[j])
            step = ratio / (1.0 - ratio * s)
            if not (np.isfinite(step.real) and np.isfinite(step.imag)):
                return z, it, False
            # Gauss-Seidel update: later roots see the corrected z[k].
            z[k] = zk - step
            if abs(step) > tol * max(1.0, abs(z[k])):
                done = False
        if done:
            return z, it, True
    return z, maxiter, False


# ----------------------------------------------------------------- permanent

def permanent_np(mat):
    """Ryser's formula, O(2**n * n); exact enough for n <= 16."""
    mat = np.asarray(mat)
    n = mat.shape[0]
    if n == 0:
        return mat.dtype.type(1)
    total = 0
    for mask in range(1, 1 << n):
        cols = [j for j in range(n) if mask >> j & 1]
        rowsums = mat[:, cols].sum(axis=1)
        term = np.prod(rowsums)
        total += -term if (n - len(cols)) % 2 else term
    return total


def _permanent_nb_impl(mat):
    n = mat.shape[0]
    zero = mat[0, 0] * 0
    rowsums = np.zeros(n, dtype=mat.dtype)
    total = zero
    gray = 0
    for k in range(1, 1 << n):
        # Gray-code walk: flip exactly one column per step.
        bit = 0
        while not (k >> bit) & 1:
            bit += 1
        gray_new = gray ^ (1 << bit)
        sign = 1.0 if gray_new & (1 << bit) else -1.0
        for i in range(n):
            rowsums[i] += sign * mat[i, bit]
        gray = gray_new
        size = 0
        g = gray
        while g:
            size += g & 1
            g >>= 1
        prod = zero + 1
        for i in range(n):
            prod *= rowsums[i]
        if (n - size) % 2:
            total -= prod
        else:
            total += prod
    return total


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    monomial_values_nb = _jit(_monomial_values_nb_impl)
    poly_product_nb = _jit(_poly_product_nb_impl)
    aberth_nb = _jit(_aberth_nb_impl)
    permanent_nb = _jit(_permanent_nb_impl)
else:  # pragma: no cover
    monomial_values_nb = monomial_values_np
    poly_product_nb = poly_product_np
    aberth_nb = aberth_np
    permanent_nb = permanent_np


def monomial_values(points, exps):
    points = np.asarray(points)
    exps = np.asarray(exps, dtype=np.int64)
    if USE_NUMBA and points.dtype in (np.float64, np.complex128):
        return monomial_values_nb(np.ascontiguousarray(points), exps)
    return monomial_values_np(points, exps)


def poly_product(a, b, table, size):
    if USE_NUMBA and a.dtype != object and b.dtype != object:
        dtype = np.result_type(a, b)
        return poly_product_nb(a.astype(dtype), b.astype(dtype), table, size)
    return poly_product_np(a, b, table, size)


def aberth(coeffs, z0, tol=1e-14, maxiter=500):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z0 = np.ascontiguousarray(z0, dtype=np.complex128)
    if USE_NUMBA:
        return aberth_nb(coeffs, z0, tol, maxiter)
    return aberth_np(coeffs, z0, tol, maxiter)


def permanent(mat):
    mat = np.asarray(mat)
    if mat.shape[0] == 0:
        return mat.dtype.type(1)
    if USE_NUMBA and mat.dtype in (np.float64, np.complex128):
        return permanent_nb(np.ascontiguousarray(mat))
    return permanent_np(mat)
