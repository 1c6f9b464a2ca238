import json
from math import factorial

import numpy as np
import pytest
import sympy as sp

from msylvester.errors import NonOrthonormalFrame, NotTraceless, PairingFailure, RankMismatch, SingularOrigin, ZeroTensor
from msylvester.harmonic import HarmonicTensor, eval_irregular, harmonic_inner_product, harmonic_part
from msylvester.multipole import (
    Skeleton,
    axes_match,
    canonical_axis,
    frame_for_axis,
    great_circle_samples,
    interaction_energy,
    maxwell_potential,
    maxwell_ratio,
    null_vectors,
    pair_to_point,
    point_to_roots,
    real_sectorial,
    sectorial,
    skeleton_to_harmonic,
    sylvester_decompose,
    sylvester_polynomial,
)
from msylvester.quadrature import sphere_rule
from msylvester.symtensor import SymTensor, delta, from_vectors, n_coeffs, sym_product

X, Y, Z = np.eye(3)


def units(rng, k):
    v = rng.normal(size=(k, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_skeleton(rng, ell):
    return Skeleton.from_axes(units(rng, ell), rng.uniform(0.2, 3.0), rng.choice([-1, 1]))


# ------------------------------------------------------------------ skeleton

def test_canonical_axis():
    assert canonical_axis([0, 0, -1])[1] is True
    assert canonical_axis([-1, 0, 0])[1] is True
    assert canonical_axis([0, -1, 0])[1] is True
    u, flipped = canonical_axis([0.3, -0.2, 0.5])
    assert not flipped and u[2] > 0


def test_from_axes_tracks_sign():
    s = Skeleton.from_axes([[0, 0, -2], [1, 0, 0]], scale=2.0)
    assert s.sign == -1 and s.scale == 2.0
    np.testing.assert_allclose(s.axes, [[0, 0, 1], [1, 0, 0]])
    assert Skeleton.from_axes([Z], scale=-1.5).charge == -1.5


def test_from_axes_tensor_unchanged_by_flips(rng):
    axes = units(rng, 4)
    s = Skeleton.from_axes(axes, 1.7, -1)
    ref = from_vectors(list(axes)) * -1.7
    assert s.tensor().allclose(ref, atol=1e-12)


def test_from_axes_rejects_zero():
    with pytest.raises(ValueError):
        Skeleton.from_axes([[0, 0, 0]])


def test_skeleton_json(rng):
    s = random_skeleton(rng, 3)
    back = Skeleton.from_json(json.loads(json.dumps(s.to_json())))
    assert back == s


# --------------------------------------------------------- forward examples

def test_order_one_is_the_vector():
    h = skeleton_to_harmonic(Skeleton.from_axes([[1, 2, 2]], 3.0))
    np.testing.assert_allclose(h.coeffs, [1.0, 2.0, 2.0])


def test_zz_quadrupole():
    h = skeleton_to_harmonic(Skeleton.from_axes([Z, Z]))
    expected = SymTensor.from_terms(2, {(2, 0, 0): -1 / 3, (0, 2, 0): -1 / 3, (0, 0, 2): 2 / 3})
    assert h.allclose(expected, atol=1e-15)


def test_xy_quadrupole_is_already_traceless():
    h = skeleton_to_harmonic(Skeleton.from_axes([X, Y]))
    assert h.allclose(SymTensor.from_terms(2, {(1, 1, 0): 1.0}), atol=1e-15)


# ------------------------------------------------------------------ potential

def sympy_maxwell(axes, charge, r):
    # Oracle: symbolic directional derivatives of 1/|r|.
    x, y, z = sp.symbols("x y z", real=True)
    f = 1 / sp.sqrt(x**2 + y**2 + z**2)
    for u in axes:
        f = u[0] * sp.diff(f, x) + u[1] * sp.diff(f, y) + u[2] * sp.diff(f, z)
    ell = len(axes)
    val = f.subs({x: r[0], y: r[1], z: r[2]})
    return float(charge * (-1) ** ell / factorial(ell) * val)


@pytest.mark.parametrize("ell", range(0, 5))
def test_maxwell_potential_matches_symbolic(rng, ell):
    s = random_skeleton(rng, ell)
    r = rng.normal(size=3)
    axes = [[sp.Rational(str(c)) for c in u] for u in s.axes]
    assert maxwell_potential(s, r) == pytest.approx(sympy_maxwell(axes, s.charge, r), rel=1e-9)


@pytest.mark.parametrize("ell", range(0, 7))
def test_maxwell_ratio_constant(rng, ell):
    s = random_skeleton(rng, ell)
    h = skeleton_to_harmonic(s)
    for r in rng.normal(size=(5, 3)):
        assert maxwell_potential(s, r) / eval_irregular(h, r) == pytest.approx(maxwell_ratio(ell), rel=1e-10)


def test_maxwell_ratio_values():
    assert [maxwell_ratio(ell) for ell in range(5)] == pytest.approx([1, 1, 1.5, 2.5, 35 / 8])


def test_maxwell_singular_origin():
    with pytest.raises(SingularOrigin):
        maxwell_potential(Skeleton.from_axes([Z]), np.zeros(3))


# ------------------------------------------------------------- null vectors

def test_null_vectors_are_isotropic(rng):
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    m = null_vectors(z)
    np.testing.assert_allclose(np.sum(m * m, axis=1), 0, atol=1e-12)


def test_sylvester_polynomial_factorises(rng):
    s = random_skeleton(rng, 4)
    coeffs = sylvester_polynomial(skeleton_to_harmonic(s))
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    lin = np.prod(null_vectors(z) @ s.axes.T, axis=1) * s.charge
    np.testing.assert_allclose(np.polynomial.polynomial.polyval(z, coeffs), lin, rtol=1e-10)


def test_roots_of_axis_map_back(rng):
    for u in units(rng, 5):
        p, q = point_to_roots(u)
        pts = [pair_to_point(p / np.linalg.norm(p)), pair_to_point(q / np.linalg.norm(q))]
        # The two roots sit at antipodes on the axis.
        np.testing.assert_allclose(pts[0] + pts[1], 0, atol=1e-12)
        assert abs(abs(pts[0] @ u) - 1) < 1e-12


# -------------------------------------------------------------- decomposition

@pytest.mark.parametrize("ell", range(1, 9))
def test_round_trip(rng, ell):
    for _ in range(10):
        s = random_skeleton(rng, ell)
        back = sylvester_decompose(skeleton_to_harmonic(s))
        assert axes_match(s.axes, back.axes) < 1e-6
        assert back.charge == pytest.approx(s.charge, rel=1e-8)


def test_order_zero():
    s = sylvester_decompose(SymTensor(0, [-2.5]))
    assert s.order == 0 and s.charge == -2.5


def test_repeated_axes():
    s = Skeleton.from_axes([Z, Z, Z, X], 1.3)
    back = sylvester_decompose(skeleton_to_harmonic(s))
    assert axes_match(s.axes, back.axes) < 1e-6
    assert back.charge == pytest.approx(1.3, rel=1e-8)
    assert max(back.multiplicities) == 3


def test_axes_along_coordinate_poles():
    s = Skeleton.from_axes([Z, -Z, X, Y], 0.7, -1)
    back = sylvester_decompose(skeleton_to_harmonic(s))
    assert axes_match(s.axes, back.axes) < 1e-6
    assert back.charge == pytest.approx(s.charge, rel=1e-8)


def test_sectorial_decomposes_to_equatorial_axes():
    # Re (x + iy)^3 has three axes in the xy plane, 60 degrees apart.
    h = real_sectorial(X, Y, 0.0, 3)
    s = sylvester_decompose(h)
    np.testing.assert_allclose(s.axes[:, 2], 0, atol=1e-8)
    assert skeleton_to_harmonic(s).allclose(h, atol=1e-10)
    phis = np.sort(np.mod(np.arctan2(s.axes[:, 1], s.axes[:, 0]), np.pi))
    gaps = np.diff(np.append(phis, phis[0] + np.pi))
    np.testing.assert_allclose(gaps, np.pi / 3, atol=1e-8)


def test_zonal_decomposes_to_repeated_z():
    h = harmonic_part(from_vectors([Z] * 4))
    s = sylvester_decompose(h)
    np.testing.assert_allclose(s.axes, [Z] * 4, atol=1e-6)


def test_pairwise_sign_flip_is_invisible(rng):
    axes = units(rng, 4)
    flipped = axes.copy()
    flipped[[0, 2]] *= -1
    a = skeleton_to_harmonic(Skeleton.from_axes(axes, 1.2))
    b = skeleton_to_harmonic(Skeleton.from_axes(flipped, 1.2))
    assert np.array_equal(a.coeffs, b.coeffs)


def test_decompose_errors():
    with pytest.raises(NotTraceless):
        sylvester_decompose(delta(1).to_float())
    with pytest.raises(ZeroTensor):
        sylvester_decompose(SymTensor.zeros(3))
    with pytest.raises(PairingFailure):
        sylvester_decompose(sectorial(X, Y, 0.0, 2))
    with pytest.raises(RankMismatch):
        sylvester_decompose(SymTensor.zeros(13))


def test_axes_match_metric():
    assert axes_match([Z], [-Z]) == 0
    assert axes_match([Z], [X]) == pytest.approx(np.pi / 2)
    assert axes_match([Z], [Z, X]) == np.inf


# ------------------------------------------------------------------ sectorial

def test_frame_for_axis(rng):
    for n in list(units(rng, 5)) + [X, Y, Z]:
        a, b = frame_for_axis(n)
        np.testing.assert_allclose(np.cross(a, b), n, atol=1e-14)


def test_sectorial_is_harmonic():
    h = sectorial(X, Y, 0.3, 4)
    assert h.base.laplacian().norm() < 1e-12


def test_sectorial_frame_check():
    with pytest.raises(NonOrthonormalFrame):
        sectorial(X, X, 0.0, 2)


@pytest.mark.parametrize("ell", range(1, 6))
def test_sectorial_orthogonal_to_own_axes(rng, ell):
    s = random_skeleton(rng, ell)
    h = skeleton_to_harmonic(s)
    for u in s.axes:
        a, b = frame_for_axis(u)
        for phi in rng.uniform(0, 2 * np.pi, size=4):
            assert abs(interaction_energy(h, real_sectorial(a, b, phi, ell))) < 1e-10


def test_interaction_energy_scale():
    h = skeleton_to_harmonic(Skeleton.from_axes([Z, Z]))
    assert interaction_energy(h, h) == pytest.approx(harmonic_inner_product(h, h) / 6)
    with pytest.raises(RankMismatch):
        interaction_energy(SymTensor(0, [1.0]), SymTensor(0, [1.0]))


# ----------------------------------------------------------------- circles

def test_great_circle_samples(rng):
    s = random_skeleton(rng, 3)
    samples = great_circle_samples(s, 360)
    assert len(samples) == 3
    rows = list(samples.csv_rows())
    assert len(rows) == 3 * 360
    for u, pts in zip(s.axes, samples):
        np.testing.assert_allclose(pts @ u, 0, atol=1e-14)
        np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1, atol=1e-14)
        assert np.max(np.abs(s.tensor().evaluate_many(pts))) < 1e-12
    assert samples.signs.shape == (8 * 16,)
    assert set(np.unique(samples.signs)) <= {-1, 0, 1}


def test_great_circle_count_check():
    with pytest.raises(ValueError):
        great_circle_samples(Skeleton.from_axes([Z]), 2)
