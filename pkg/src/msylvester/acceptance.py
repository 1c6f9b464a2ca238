"""Self-check suite: property and oracle comparisons at fixed tolerances.

Each check draws its random inputs from a generator seeded with
``seed + index`` so checks stay independent of one another.  Reports list
measured errors only; wall-clock limits enter as a pass/fail flag.
"""

import time
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import harmonic as hm
from . import multipole as mp
from . import operator as op
from . import oracle
from . import spinstate as ss
from .legendre import double_factorial
from .quadrature import sphere_rule
from .sampling import (
    random_observable,
    random_skeleton,
    random_state,
    random_tensor,
    rng_from,
    unit_vectors,
)
from .symtensor import from_vectors, full_contraction, trace


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title}: {self.detail}"


def _rel(a, b):
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def _timed(limit):
    start = time.perf_counter()

    def within():
        return time.perf_counter() - start < limit

    return within


def check_decomposition(rng):
    clock = _timed(5.0)
    err = tr = 0.0
    for n in range(2, 9):
        for _ in range(100):
            a = random_tensor(rng, n)
            comps = hm.harmonic_components(a)
            err = max(err, float(np.max(np.abs(hm.reconstruct(comps).coeffs - a.coeffs))))
            for c in comps:
                if c.rank >= 2:
                    tr = max(tr, trace(c, 1).norm())
    fast = clock()
    ok = err < 1e-12 and tr < 1e-12 and fast
    return ok, f"max coeff err {err:.1e}, max trace {tr:.1e}, runtime<5s {'yes' if fast else 'no'}"


def check_sphere_integrals(rng):
    worst_q = worst_m = 0.0
    for n in (2, 4, 6, 8):
        rule = sphere_rule(n)
        for _ in range(50):
            vecs = rng.normal(size=(n, 3))
            pairing = hm.sphere_average_product(vecs)
            quad = rule.mean(np.prod(rule.points @ vecs.T, axis=1))
            exact = float(hm.sphere_average(from_vectors(list(vecs))))
            worst_q = max(worst_q, _rel(pairing, quad))
            worst_m = max(worst_m, _rel(pairing, exact))
    ok = worst_q < 1e-10 and worst_m < 1e-10
    return ok, f"pairings vs quadrature {worst_q:.1e}, vs exact monomial means {worst_m:.1e}"


def check_inner_products(rng):
    worst = 0.0
    for n in range(0, 7):
        rule = sphere_rule(2 * n)
        for _ in range(20):
            a, b = random_tensor(rng, n), random_tensor(rng, n)
            ha, hb = hm.harmonic_part(a), hm.harmonic_part(b)
            quad = rule.mean(ha.evaluate_many(rule.points) * hb.evaluate_many(rule.points))
            weight = factorial(n) / double_factorial(2 * n + 1)
            direct = weight * full_contraction(ha, hb)
            traces = weight * hm.harmonic_contraction_via_traces(a, b)
            worst = max(worst, _rel(quad, direct), _rel(quad, traces), _rel(direct, traces))
    return worst < 1e-10, f"max pairwise relative error {worst:.1e}"


def check_sylvester(rng):
    clock = _timed(10.0)
    ang = sc = 0.0
    for ell in range(1, 7):
        for _ in range(100):
            s = random_skeleton(rng, ell)
            back = mp.sylvester_decompose(mp.skeleton_to_harmonic(s))
            ang = max(ang, mp.axes_match(s.axes, back.axes))
            sc = max(sc, abs(back.charge - s.charge) / s.scale)
    fast = clock()
    ok = ang < 1e-6 and sc < 1e-8 and fast
    return ok, f"max axis angle {ang:.1e} rad, max scale err {sc:.1e}, runtime<10s {'yes' if fast else 'no'}"


def check_maxwell(rng):
    worst = 0.0
    for ell in range(0, 7):
        target = mp.maxwell_ratio(ell)
        ratios = []
        for _ in range(20):
            s = random_skeleton(rng, ell)
            r = rng.normal(size=3) * rng.uniform(0.5, 2.0)
            ratios.append(mp.maxwell_potential(s, r) / hm.eval_irregular(mp.skeleton_to_harmonic(s), r))
        ratios = np.array(ratios)
        worst = max(worst, float((ratios.max() - ratios.min()) / abs(target)))
        worst = max(worst, float(np.max(np.abs(ratios - target)) / target))
    return worst < 1e-10, f"max relative spread/deviation from (2l-1)!!/l! {worst:.1e}"


def check_overlap(rng):
    worst = 0.0
    for two_j in (1, 2, 3, 4, 5, 10):
        for _ in range(100):
            n1, n2 = unit_vectors(rng, 2)
            ref = np.vdot(oracle.coherent_vector(two_j, n1), oracle.coherent_vector(two_j, n2))
            worst = max(worst, abs(ref - ss.overlap_geometric(two_j, n1, n2)))
    return worst < 1e-9, f"max |geometric - oracle| {worst:.1e}"


def check_resolution(rng):
    worst = max(oracle.resolution_of_unity_check(two_j, 4 * two_j) for two_j in range(0, 7))
    return worst < 1e-10, f"max entry deviation {worst:.1e}"


def check_expectation(rng):
    worst = 0.0
    for two_j in (1, 2, 3, 4, 6):
        for _ in range(50):
            psi = random_state(rng, two_j)
            obs = random_observable(rng, min(two_j, 4))
            a = op.expectation_tensor(psi, obs)
            b = op.expectation_skeleton(psi, obs)
            c = oracle.expectation_matrix(psi, oracle.quantize_observable(obs, two_j))
            worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
    closed = all(
        op.alpha(two_j, 1) == Fraction(two_j, 2) and op.beta(two_j, 1) == Fraction(two_j, 2) + 1
        for two_j in range(1, 17)
    )
    ok = worst < 1e-8 and closed
    return ok, f"max pairwise |delta| {worst:.1e}, alpha_1 = J and beta_1 = J+1 {'exact' if closed else 'broken'}"


def check_sectorial(rng):
    worst = 0.0
    for ell in range(1, 6):
        for _ in range(10):
            s = random_skeleton(rng, ell)
            h = mp.skeleton_to_harmonic(s)
            for u in s.axes:
                a, b = mp.frame_for_axis(u)
                for phi in rng.uniform(0, 2 * np.pi, size=8):
                    worst = max(worst, abs(mp.interaction_energy(h, mp.real_sectorial(a, b, phi, ell))))
    return worst < 1e-10, f"max |interaction energy| {worst:.1e}"


def check_majorana(rng):
    fid = ang = 0.0
    for two_j in range(1, 11):
        for _ in range(10):
            psi = random_state(rng, two_j)
            stars = ss.majorana_stars(psi)
            fid = max(fid, 1.0 - psi.fidelity(ss.state_from_stars(stars)))
        psi = random_state(rng, two_j)
        stars = ss.majorana_stars(psi).stars
        for _ in range(10):
            axis, angle = unit_vectors(rng, 1)[0], rng.uniform(0, np.pi)
            rot = oracle.rotation_matrix(axis, angle)
            moved = ss.majorana_stars(ss.rotate_state(psi, rot)).stars
            ang = max(ang, _star_distance(moved, stars @ rot.T))
    ok = fid < 1e-10 and ang < 1e-8
    return ok, f"max infidelity {fid:.1e}, max covariance error {ang:.1e} rad"


def _star_distance(a, b):
    """Largest angle in a greedy matching of two star multisets."""
    free = list(range(len(b)))
    worst = 0.0
    for s in a:
        angles = [np.arctan2(np.linalg.norm(np.cross(s, b[j])), s @ b[j]) for j in free]
        k = int(np.argmin(angles))
        worst = max(worst, angles[k])
        free.pop(k)
    return worst


def check_q_symbol(rng):
    worst = 0.0
    for two_j in (1, 2, 3, 4, 6):
        obs = random_observable(rng, min(two_j, 4))
        mat = oracle.quantize_observable(obs, two_j)
        for ell, comp in obs.components.items():
            proj = hm.project_function(lambda p: oracle.q_symbol(two_j, mat, p), ell, two_j)
            expect = comp * float(op.alpha(two_j, ell))
            worst = max(worst, float(np.max(np.abs(proj.coeffs - expect.coeffs))))
    return worst < 1e-9, f"max |projected Q symbol - alpha A_l| {worst:.1e}"


def check_p_symbol(rng):
    worst = 0.0
    for two_j in (1, 2, 3, 4, 6):
        obs = random_observable(rng, min(two_j, 4))
        mat = oracle.quantize_observable(obs, two_j)
        psym = op.ClassicalObservable(
            {ell: c * float(op.beta(two_j, ell)) for ell, c in obs.components.items()}
        )
        built = oracle.p_symbol_operator(two_j, psym.evaluate_many, 2 * two_j + 4)
        worst = max(worst, float(np.max(np.abs(built - mat))))
    return worst < 1e-9, f"max |P-integral operator - quantised operator| {worst:.1e}"


CHECKS = (
    ("C1", "canonical decomposition round trip", check_decomposition),
    ("C2", "sphere integral identities", check_sphere_integrals),
    ("C3", "harmonic inner product triple equality", check_inner_products),
    ("C4", "Sylvester round trip", check_sylvester),
    ("C5", "Maxwell potential constant", check_maxwell),
    ("C6", "coherent state overlap", check_overlap),
    ("C7", "resolution of unity", check_resolution),
    ("C8", "operator three-route equality", check_expectation),
    ("C9", "sectorial vanishing interaction", check_sectorial),
    ("C10", "Majorana round trip and covariance", check_majorana),
    ("Q", "Q-symbol consistency", check_q_symbol),
    ("P", "P-symbol consistency", check_p_symbol),
)


def run_check(key, seed=42):
    for index, (k, title, fn) in enumerate(CHECKS):
        if k == key:
            try:
                ok, detail = fn(rng_from(seed + index))
            except Exception as exc:  # a crash is a failure, reported by name
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CheckResult(k, title, bool(ok), detail)
    raise KeyError(key)


def run_suite(seed=42, keys=None):
    keys = [k for k, _, _ in CHECKS] if keys is None else keys
    return [run_check(k, seed) for k in keys]


def format_report(results, seed):
    lines = [f"msylvester self-check (seed {seed})"]
    lines += [r.line() for r in results]
    failed = [r.key for r in results if not r.passed]
    lines.append("all checks passed" if not failed else f"failed: {', '.join(failed)}")
    return "\n".join(lines) + "\n"
