import json
from fractions import Fraction

import numpy as np
import pytest

from msylvester import operator as op
from msylvester.errors import OrderExceedsSpin, SchemaError
from msylvester.harmonic import harmonic_inner_product, harmonic_part
from msylvester.oracle import angular_momentum_matrices, expectation_matrix, quantize_observable
from msylvester.quadrature import sphere_rule
from msylvester.sampling import random_observable, random_state, random_tensor
from msylvester.spinstate import SpinState, coherent_state
from msylvester.symtensor import SymTensor, from_vectors, full_contraction, trace

Z = [0, 0, 1]


# ------------------------------------------------------------------- factors

def test_alpha_beta_closed_forms():
    for two_j in range(1, 17):
        assert op.alpha(two_j, 0) == 1 and op.beta(two_j, 0) == 1
        assert op.alpha(two_j, 1) == Fraction(two_j, 2)
        assert op.beta(two_j, 1) == Fraction(two_j, 2) + 1


def test_alpha_beta_examples():
    assert op.alpha(2, 2) == Fraction(1, 2)
    assert op.beta(2, 2) == 5
    assert op.alpha(4, 3) == 3 and op.beta(4, 3) == 42
    assert op.alpha(2, 3) == 0 and op.beta(2, 3) == 0
    with pytest.raises(ValueError):
        op.alpha(2, -1)


# --------------------------------------------------------------- observables

def test_classical_from_polynomial_z2():
    obs = op.classical_from_polynomial(from_vectors([Z, Z]))
    assert obs.orders == [0, 2]
    assert obs.components[0].coeffs[0] == Fraction(1, 3)


def test_observable_evaluates_polynomial_on_sphere(rng):
    polys = [random_tensor(rng, d) for d in range(4)]
    obs = op.observable_from_polynomials(polys)
    pts = sphere_rule(4).points
    np.testing.assert_allclose(obs.evaluate_many(pts), sum(p.evaluate_many(pts) for p in polys), atol=1e-12)


def test_observable_rejects_complex():
    with pytest.raises(ValueError):
        op.classical_from_polynomial(SymTensor(1, [1j, 0, 0]))


def test_observable_order_key_checked():
    with pytest.raises(ValueError):
        op.ClassicalObservable({3: harmonic_part(from_vectors([Z, Z]))})
    with pytest.raises(ValueError):
        op.ClassicalObservable({}, kind="W")


def test_observable_arithmetic(rng):
    a, b = random_observable(rng, 2), random_observable(rng, 3)
    pts = sphere_rule(3).points
    np.testing.assert_allclose((a + 2 * b).evaluate_many(pts), a.evaluate_many(pts) + 2 * b.evaluate_many(pts))
    with pytest.raises(ValueError):
        a + op.to_symbol(b, 4, "Q")


def test_observable_json(rng):
    obs = random_observable(rng, 3)
    back = op.ClassicalObservable.from_json(json.loads(json.dumps(obs.to_json())))
    assert back.orders == obs.orders
    for ell in obs.orders:
        assert back.components[ell].allclose(obs.components[ell], atol=0)


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"kind": "classical"},
        {"kind": "R", "components": []},
        {"components": [{"order": 1}]},
        {"components": [{"order": 2, "tensor": {"rank": 1, "coeffs": []}}]},
        {"components": [{"order": 1, "tensor": {"rank": 1, "kind": "complex", "coeffs": []}}]},
    ],
)
def test_observable_json_errors(doc):
    with pytest.raises(SchemaError):
        op.ClassicalObservable.from_json(doc)


def test_max_order(rng):
    obs = random_observable(rng, 3)
    assert obs.max_order() == 3
    assert op.ClassicalObservable({}).max_order() == -1


# ------------------------------------------------------------------- symbols

def test_symbol_round_trip(rng):
    obs = random_observable(rng, 3)
    for kind in ("Q", "P"):
        sym = op.to_symbol(obs, 4, kind)
        back = op.to_classical(sym, 4)
        for ell in obs.orders:
            assert back.components[ell].allclose(obs.components[ell], atol=1e-12)


def test_symbol_drops_orders_above_2j(rng):
    sym = op.to_symbol(random_observable(rng, 3), 2, "Q")
    assert sym.max_order() == 2
    with pytest.raises(ValueError):
        op.to_symbol(sym, 2, "classical")


def test_symbol_unrecoverable_order():
    bad = op.ClassicalObservable({3: harmonic_part(from_vectors([Z, Z, Z]))}, kind="Q")
    with pytest.raises(OrderExceedsSpin):
        op.to_classical(bad, 2)


@pytest.mark.parametrize("two_j", [1, 2, 3, 5])
def test_q_symbol_is_coherent_expectation(rng, two_j):
    # Oracle: <n|A|n> with the quantised matrix.
    obs = random_observable(rng, min(two_j, 3))
    mat = quantize_observable(obs, two_j)
    qsym = op.to_symbol(obs, two_j, "Q")
    for n in rng.normal(size=(4, 3)):
        n = n / np.linalg.norm(n)
        ref = expectation_matrix(coherent_state(two_j, n), mat)
        assert qsym.evaluate_many([n])[0] == pytest.approx(ref, abs=1e-10)


def test_jz_symbols():
    obs = op.classical_from_polynomial(SymTensor(1, [0.0, 0.0, 1.0]))
    assert op.to_symbol(obs, 2, "Q").components[1].coeffs[2] == pytest.approx(1.0)
    assert op.to_symbol(obs, 2, "P").components[1].coeffs[2] == pytest.approx(2.0)


# -------------------------------------------------------------- expectations

@pytest.mark.parametrize("two_j", [1, 2, 3, 4, 6])
def test_three_routes_agree(rng, two_j):
    for _ in range(10):
        psi = random_state(rng, two_j)
        obs = random_observable(rng, min(two_j, 4))
        ref = expectation_matrix(psi, quantize_observable(obs, two_j))
        assert op.expectation_tensor(psi, obs) == pytest.approx(ref, abs=1e-9)
        assert op.expectation_skeleton(psi, obs) == pytest.approx(ref, abs=1e-9)


def test_expectation_of_jz():
    obs = op.classical_from_polynomial(SymTensor(1, [0.0, 0.0, 1.0]))
    for two_j in range(1, 6):
        for k in range(two_j + 1):
            psi = SpinState.basis(two_j, two_j / 2 - k)
            assert op.expectation_tensor(psi, obs) == pytest.approx(two_j / 2 - k, abs=1e-12)


def test_expectation_of_jx_squared_plus_jy_squared():
    # Per-component quantisation of x^2 + y^2 = r^2 - z^2 on |J, m>.
    two_j = 4
    obs = op.classical_from_polynomial(SymTensor.from_terms(2, {(2, 0, 0): 1.0, (0, 2, 0): 1.0}))
    jx, jy, jz = angular_momentum_matrices(two_j)
    mat = quantize_observable(obs, two_j)
    psi = SpinState.basis(two_j, 1)
    assert op.expectation_tensor(psi, obs) == pytest.approx(expectation_matrix(psi, mat))


def test_constant_observable(rng):
    psi = random_state(rng, 3)
    assert op.expectation_tensor(psi, op.constant_observable(2.5)) == pytest.approx(2.5)
    assert op.expectation_skeleton(psi, op.constant_observable(2.5)) == pytest.approx(2.5)


def test_expectation_order_cap(rng):
    psi = random_state(rng, 2)
    obs = op.classical_from_polynomial(random_tensor(rng, 3))
    with pytest.raises(OrderExceedsSpin):
        op.expectation_tensor(psi, obs)
    with pytest.raises(OrderExceedsSpin):
        op.expectation_skeleton(psi, obs)


def test_expectation_accepts_symbols(rng):
    psi = random_state(rng, 3)
    obs = random_observable(rng, 3)
    ref = op.expectation_tensor(psi, obs)
    for kind in ("Q", "P"):
        assert op.expectation_tensor(psi, op.to_symbol(obs, 3, kind)) == pytest.approx(ref, abs=1e-12)


# ------------------------------------------------------------ skeleton route

def test_skeleton_vectors_rebuild_harmonic(rng):
    h = harmonic_part(random_tensor(rng, 4))
    vecs = op.skeleton_vectors(h)
    assert harmonic_part(from_vectors(list(vecs))).allclose(h, atol=1e-10)


@pytest.mark.parametrize("ell, p", [(2, 0), (2, 1), (3, 1), (4, 1), (4, 2), (5, 2), (6, 3)])
def test_trace_pair_contraction_matches_tensors(rng, ell, p):
    # Oracle: build both tensors, take p traces, contract fully.
    qv, av = rng.normal(size=(ell, 3)), rng.normal(size=(ell, 3))
    u, v = from_vectors(list(qv)), from_vectors(list(av))
    ref = full_contraction(trace(u, p), trace(v, p))
    assert op.trace_pair_contraction(qv, av, p) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("ell", range(1, 7))
def test_skeleton_inner_product(rng, ell):
    a = harmonic_part(random_tensor(rng, ell))
    b = harmonic_part(random_tensor(rng, ell))
    assert op.skeleton_inner_product(a, b) == pytest.approx(harmonic_inner_product(a, b), rel=1e-9)
