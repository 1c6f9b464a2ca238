"""Time the numba and pure-numpy flavours of each hot kernel.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Both
flavours are called directly, so the ``MSYLVESTER_DISABLE_NUMBA`` flag does
not matter here.  The first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from msylvester import _kernels
from msylvester.quadrature import sphere_rule
from msylvester.symtensor import _product_table, multi_indices, n_coeffs


def cases(rng):
    pts = sphere_rule(32).points.copy()
    exps = multi_indices(12)
    a = rng.normal(size=n_coeffs(8))
    b = rng.normal(size=n_coeffs(8))
    table = _product_table(8, 8)
    roots = rng.normal(size=16) + 1j * rng.normal(size=16)
    coeffs = np.poly(roots)[::-1].astype(np.complex128)
    z0 = 1.3 * np.exp(1j * (2 * np.pi * np.arange(16) / 16 + 0.4))
    mat = rng.normal(size=(10, 10))
    return {
        "monomial_values (561 pts, rank 12)": (
            lambda: _kernels.monomial_values_np(pts, exps),
            lambda: _kernels.monomial_values_nb(pts, exps),
        ),
        "poly_product (rank 8 x 8)": (
            lambda: _kernels.poly_product_np(a, b, table, n_coeffs(16)),
            lambda: _kernels.poly_product_nb(a, b, table, n_coeffs(16)),
        ),
        "aberth (degree 16)": (
            lambda: _kernels.aberth_np(coeffs, z0, 1e-14, 500),
            lambda: _kernels.aberth_nb(coeffs, z0, 1e-14, 500),
        ),
        "permanent (10 x 10)": (
            lambda: _kernels.permanent_np(mat),
            lambda: _kernels.permanent_nb(mat),
        ),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; only the numpy path exists")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':38s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for name, (np_fn, nb_fn) in cases(rng).items():
        nb_fn()  # compile
        number = 3
        t_np = min(timeit.repeat(np_fn, number=number, repeat=args.repeat)) / number
        t_nb = min(timeit.repeat(nb_fn, number=number, repeat=args.repeat)) / number
        print(f"{name:38s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
