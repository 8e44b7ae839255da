"""Acceptance gate. Each test carries a ``criterion`` marker; the terminal
summary prints one PASS/FAIL line per criterion with the observed values."""

import itertools
import math
import time

import numpy as np
import pytest
from fractions import Fraction

from higgs_s2.basis import Basis, BasisState, ModelParams, energy, enumerate_level, epsilon, wavefunction_s1
from higgs_s2.interbasis import PHASE_BRANCH, coefficient_matrix, overlap_matrix
from higgs_s2.operators import StencilConfig, algebra_identity_check, residual_report, state_field
from higgs_s2.specfun import CGArgs, cg_continued, gegenbauer_poly

from conftest import NU_VALUES

TAGS = (Basis.B1, Basis.B2, Basis.B3)
PAIRS = list(itertools.permutations(TAGS, 2))


def _record(request, text):
    request.node.user_properties.append(("observed", text))


def _route_diffs(branch):
    cg = num = 0.0
    for nu in NU_VALUES:
        for n in range(5):
            for a, b in PAIRS:
                closed = coefficient_matrix(n, a, b, nu, "closed_form", branch).entries
                cg = max(cg, np.abs(closed - coefficient_matrix(n, a, b, nu, "cg", branch).entries).max())
                num = max(num, np.abs(closed - coefficient_matrix(n, a, b, nu, "numeric").entries).max())
    return cg, num


@pytest.mark.criterion(1, "orthonormality, n <= 6, three nu, three bases")
def test_criterion_1_orthonormality(request):
    start = time.perf_counter()
    worst = 0.0
    for nu in NU_VALUES:
        for tag in TAGS:
            states = [s for n in range(7) for s in enumerate_level(n, tag)]
            g = overlap_matrix(states, states, nu).matrix
            worst = max(worst, np.abs(g - np.eye(len(states))).max())
    elapsed = time.perf_counter() - start
    _record(request, f"max|G-I|={worst:.2e} (tol 1e-8), {elapsed:.1f}s (limit 60s)")
    assert worst <= 1e-8
    assert elapsed <= 60.0


@pytest.mark.criterion(2, "energy identities and contraction limit")
def test_criterion_2_energy(request):
    worst_eps = 0.0
    for nu in NU_VALUES:
        p = ModelParams.from_nu(nu)
        for n in range(21):
            ref = (n + nu + 1) ** 2
            worst_eps = max(worst_eps, abs(epsilon(n, p) - ref) / ref)
    worst_c = 0.0
    for R in (10.0, 100.0, 1000.0):
        p = ModelParams(1.0, R)
        for n in range(6):
            worst_c = max(worst_c, R ** 2 * abs(energy(n, p) / (n + 1) - 1.0))
    _record(request, f"eps rel={worst_eps:.2e} (tol 1e-12), max R^2|E/(n+1)-1|={worst_c:.3f} (tol 5)")
    assert worst_eps <= 1e-12
    assert worst_c <= 5.0


@pytest.mark.criterion(3, "three-route coefficient agreement, n <= 4")
def test_criterion_3_routes(request):
    start = time.perf_counter()
    cg, num = _route_diffs(PHASE_BRANCH)
    elapsed = time.perf_counter() - start
    _record(request, f"closed-cg={cg:.2e} (tol 1e-10), closed-numeric={num:.2e} (tol 1e-8), "
                     f"{elapsed:.1f}s (limit 120s)")
    assert cg <= 1e-10
    assert num <= 1e-8
    assert elapsed <= 120.0


@pytest.mark.criterion(4, "unitarity of all coefficient matrices, n <= 6")
def test_criterion_4_unitarity(request):
    worst = 0.0
    for nu in NU_VALUES:
        for n in range(7):
            for a, b in PAIRS:
                for route in ("closed_form", "cg"):
                    worst = max(worst, coefficient_matrix(n, a, b, nu, route).unitarity_defect())
    _record(request, f"max|MM^H-I|={worst:.2e} (tol 1e-8)")
    assert worst <= 1e-8


@pytest.mark.criterion(5, "expansion synthesis at 100 interior points, n <= 3")
def test_criterion_5_synthesis(request):
    rng = np.random.default_rng(2024)
    theta = rng.uniform(0.02, 0.5 * math.pi - 0.02, 100)
    phi = rng.uniform(0.0, 2 * math.pi, 100)
    worst = 0.0
    for nu in NU_VALUES:
        for n in range(4):
            b1 = np.array([wavefunction_s1(s, nu, theta, phi) for s in enumerate_level(n, Basis.B1)])
            for tag in (Basis.B2, Basis.B3):
                m = coefficient_matrix(n, tag, Basis.B1, nu).entries
                direct = np.array([wavefunction_s1(s, nu, theta, phi) for s in enumerate_level(n, tag)])
                rel = np.abs(m @ b1 - direct) / np.abs(direct)
                worst = max(worst, rel.max())
    _record(request, f"max pointwise rel={worst:.2e} (tol 1e-8)")
    assert worst <= 1e-8


@pytest.mark.criterion(6, "B3->B2 equals (B3->B1)(B1->B2), n <= 4")
def test_criterion_6_u_composition(request):
    worst = 0.0
    for nu in NU_VALUES:
        for n in range(5):
            u = coefficient_matrix(n, Basis.B3, Basis.B2, nu, "cg").entries
            w31 = coefficient_matrix(n, Basis.B3, Basis.B1, nu).entries
            w12 = coefficient_matrix(n, Basis.B1, Basis.B2, nu).entries
            worst = max(worst, np.abs(u - w31 @ w12).max())
    _record(request, f"max diff={worst:.2e} (tol 1e-9)")
    assert worst <= 1e-9


@pytest.mark.criterion(7, "operator eigen-residuals and algebra identities")
def test_criterion_7_operators(request):
    cfg = StencilConfig(h=1e-3, scheme=4, richardson=True)
    worst = {"H": 0.0, "J1": 0.0, "J2": 0.0}
    for nu in NU_VALUES:
        p = ModelParams.from_nu(nu)
        for n in range(5):
            for s in enumerate_level(n, Basis.B1):
                worst["H"] = max(worst["H"], residual_report("H", s, energy(n, p), p, cfg).max_rel_residual)
            for tag, op in ((Basis.B2, "J1"), (Basis.B3, "J2")):
                for s in enumerate_level(n, tag):
                    lam = -s.separation_constant(nu) ** 2
                    worst[op] = max(worst[op], residual_report(op, s, lam, p, cfg).max_rel_residual)
    ident = {"S3_def": 0.0, "comm_S3_S1": 0.0, "cubic": 0.0}
    for p in (ModelParams(1.0, 1.0), ModelParams(0.5, 1.3)):
        fields = [state_field(s, p) for s in (BasisState.b1(2, 0), BasisState.b1(1, 1),
                                              BasisState.b1(3, -1), BasisState(Basis.B2, 1, 2))]
        r = algebra_identity_check("S3_def_eq_commutator", fields, p, cfg)
        ident["S3_def"] = max(ident["S3_def"], r["max_rel_residual"])
        coarse = StencilConfig(h=1e-2)
        for key, name in (("comm_S3_S1", "comm_S3_S1_eq_4S2"), ("cubic", "comm_S3_S2_cubic")):
            r = algebra_identity_check(name, fields, p, coarse, margin=0.3)
            ident[key] = max(ident[key], r["max_rel_residual"])
    _record(request, ", ".join(f"{k}={v:.1e}" for k, v in {**worst, **ident}.items())
            + " (tol 1e-6 / 1e-6 / 1e-3)")
    assert max(worst.values()) <= 1e-6
    assert ident["S3_def"] <= 1e-6
    assert ident["comm_S3_S1"] <= 1e-3 and ident["cubic"] <= 1e-3


def _racah_cg(j1, m1, j2, m2, j, m):
    """Integer-argument CG coefficient from the explicit Racah sum, exact rationals under the root."""
    if m != m1 + m2 or abs(m1) > j1 or abs(m2) > j2 or abs(m) > j or not abs(j1 - j2) <= j <= j1 + j2:
        return 0.0
    f = math.factorial
    ints = [j1 + j2 - j, j1 - j2 + j, -j1 + j2 + j, j1 + m1, j1 - m1, j2 + m2, j2 - m2, j + m, j - m]
    if any(x != int(x) for x in ints):
        return 0.0
    i = [int(x) for x in ints]
    pre = (int(2 * j) + 1) * Fraction(f(i[0]) * f(i[1]) * f(i[2]), f(int(j1 + j2 + j + 1)))
    pre *= f(i[3]) * f(i[4]) * f(i[5]) * f(i[6]) * f(i[7]) * f(i[8])
    total = Fraction(0)
    for k in range(0, i[0] + 1):
        den = [k, i[0] - k, i[4] - k, i[5] - k, int(j - j2 + m1) + k, int(j - j1 - m2) + k]
        if min(den) < 0:
            continue
        total += Fraction((-1) ** k, math.prod(f(d) for d in den))
    return math.copysign(math.sqrt(pre * total * total), total) if total else 0.0


def _half_integers(top):
    return [Fraction(k, 2) for k in range(0, int(2 * top) + 1)]


@pytest.mark.criterion(8, "special functions: Gegenbauer endpoint and integer CG tables")
def test_criterion_8_special_functions(request):
    worst_g = 0.0
    for lam in (0.3, 0.5, 1.0, 1.7, 3.25):
        for n in range(31):
            ref = math.exp(math.lgamma(2 * lam + n) - math.lgamma(n + 1) - math.lgamma(2 * lam))
            worst_g = max(worst_g, abs(gegenbauer_poly(n, lam, 1.0) - ref) / ref)
    worst_cg, count, nonzero = 0.0, 0, 0
    for a, b in itertools.product(_half_integers(3), repeat=2):
        for c in np.arange(abs(a - b), a + b + 1):
            c = Fraction(c)
            for al in np.arange(-a, a + 1):
                for be in np.arange(-b, b + 1):
                    ga = Fraction(al) + Fraction(be)
                    if abs(ga) > c:
                        continue
                    got = cg_continued(CGArgs(float(a), float(al), float(b), float(be), float(c), float(ga)))
                    ref = _racah_cg(a, Fraction(al), b, Fraction(be), c, ga)
                    worst_cg = max(worst_cg, abs(got - ref))
                    count += 1
                    nonzero += abs(ref) > 1e-14
    _record(request, f"Gegenbauer rel={worst_g:.2e}, CG max diff={worst_cg:.2e} over {count} entries, {nonzero} non-zero (tol 1e-12)")
    assert worst_g <= 1e-12
    assert worst_cg <= 1e-12
    assert nonzero > count // 2


@pytest.mark.criterion(9, "negative control: flipped phase branch breaks criterion 3")
def test_criterion_9_negative_control(request):
    cg, num = _route_diffs(-PHASE_BRANCH)
    _record(request, f"flipped branch: closed-numeric={num:.2e}, criterion 3 tolerance 1e-8")
    assert num > 1e-8
