import math

import numpy as np
import pytest

from higgs_s2.basis import Basis, BasisState, ModelParams, energy, enumerate_level
from higgs_s2.geometry import AnglePair
from higgs_s2.operators import (IDENTITIES, OperatorSet, OperatorTag, StencilConfig, StencilOutOfDomain,
                                _compose, _richardson, algebra_identity_check, apply_operator,
                                residual_report, sample_points, state_field)

P = ModelParams(1.0, 1.0)


def test_stencil_config_bounds():
    with pytest.raises(ValueError):
        StencilConfig(h=1e-1)
    with pytest.raises(ValueError):
        StencilConfig(scheme=3)


@pytest.mark.parametrize("state", [BasisState.b1(0, 0), BasisState.b1(3, 1), BasisState.b1(4, -2)])
def test_hamiltonian_residual(state):
    rep = residual_report("H", state, energy(state.n, P), P)
    assert rep.max_rel_residual < 1e-6
    assert len(rep.points) == 24


@pytest.mark.parametrize("op,tag", [("J1", Basis.B2), ("J2", Basis.B3)])
def test_separation_operator_residuals(op, tag):
    for s in enumerate_level(3, tag):
        lam = -s.separation_constant(P.nu) ** 2
        assert residual_report(op, s, lam, P).max_rel_residual < 1e-6


def test_basis_states_are_not_eigenstates_of_the_other_operator():
    # B2(1,1) coincides with -B3(1,1), so use an edge state of the level
    s = BasisState(Basis.B2, 0, 2)
    assert residual_report("J2", s, -s.separation_constant(P.nu) ** 2, P).max_rel_residual > 1e-2


def test_l3_squared_on_b1():
    s = BasisState.b1(2, 2)
    assert residual_report("L3", s, -2j, P).max_rel_residual < 1e-8
    assert residual_report("L3", s, -4.0, P, power=2).max_rel_residual < 1e-8


def test_fourth_order_convergence():
    f = state_field(BasisState.b1(2, 0), P)
    t, ph = sample_points(8)
    exact = energy(2, P) * f(t, ph)

    def err(h):
        v = apply_operator("H", f, (t, ph), StencilConfig(h=h, richardson=False), P)
        return np.abs(v - exact).max()
    ratio = err(1e-2) / err(5e-3)
    assert 12 < ratio < 20


def test_richardson_combination():
    cfg = StencilConfig(h=1e-2, scheme=2)
    assert _richardson(lambda h: 1.0 + h ** 2, cfg) == pytest.approx(1.0, abs=1e-15)


def test_stencil_leaving_domain():
    f = state_field(BasisState.b1(0, 0), P)
    with pytest.raises(StencilOutOfDomain):
        apply_operator("H", f, (np.array([1e-3]), np.array([0.0])), StencilConfig(h=1e-3), P)


def test_single_point_interface():
    f = state_field(BasisState.b1(1, 1), P)
    v = apply_operator("H", f, AnglePair("S1", 0.8, 1.0), StencilConfig(), P)
    assert v == pytest.approx(energy(1, P) * f(np.array([0.8]), np.array([1.0]))[0], rel=1e-7)


def test_angular_momentum_commutator():
    # [L1, L2] = L3 on generic fields
    ops = OperatorSet(P, 1e-2)
    L1, L2, L3 = ops["L1"], ops["L2"], ops["L3"]
    t, ph = sample_points(10, margin=0.3)
    for s in (BasisState.b1(2, 0), BasisState(Basis.B2, 1, 2)):
        f = state_field(s, P)
        lhs = _compose(L1, L2)(f)(t, ph) - _compose(L2, L1)(f)(t, ph)
        rhs = L3(f)(t, ph)
        assert np.abs(lhs - rhs).max() < 1e-3 * max(1.0, np.abs(rhs).max())


def test_hamiltonian_commutes_with_j1():
    ops = OperatorSet(P, 1e-2)
    H, J1 = ops[OperatorTag.H], ops[OperatorTag.J1]
    t, ph = sample_points(8, margin=0.3)
    f = state_field(BasisState.b1(2, 2), P)
    a = _compose(H, J1)(f)(t, ph)
    b = _compose(J1, H)(f)(t, ph)
    assert np.abs(a - b).max() < 1e-3 * np.abs(a).max()


@pytest.fixture(scope="module")
def fields():
    return [state_field(s, P) for s in (BasisState.b1(2, 0), BasisState.b1(1, 1), BasisState(Basis.B2, 1, 2))]


def test_s3_definition_matches_commutator(fields):
    r = algebra_identity_check("S3_def_eq_commutator", fields, P, StencilConfig(h=1e-3))
    assert r["max_rel_residual"] < 1e-6


@pytest.mark.parametrize("identity", IDENTITIES[1:])
def test_cubic_algebra_relations(identity, fields):
    r = algebra_identity_check(identity, fields, ModelParams(0.7, 1.4), StencilConfig(h=1e-2), margin=0.3)
    assert r["max_rel_residual"] < 1e-3


def test_printed_cubic_coefficient_fails(fields):
    # with 4/R^2 in front of H S1 instead of 16 R^2 the relation does not hold
    p = ModelParams(0.7, 1.4)
    t, ph = sample_points(12, 0.3, seed=1)
    g = p.coupling
    ops = OperatorSet(p, 1e-2)
    S1, S2, S3, H = (ops[k] for k in ("S1", "S2", "S3_def", "H"))
    f = fields[1]
    terms = [_compose(S3, S2)(f)(t, ph), -_compose(S2, S3)(f)(t, ph),
             -4.0 / p.R ** 2 * _compose(H, S1)(f)(t, ph), -8.0 * _compose(S1, S1, S1)(f)(t, ph),
             -4.0 * (4.0 * g - 1.0) * S1(f)(t, ph)]
    scale = max(np.abs(terms).max(), np.abs(f(t, ph)).max())
    assert np.abs(sum(terms)).max() / scale > 0.1


def test_unknown_identity():
    with pytest.raises(ValueError):
        algebra_identity_check("nope", [state_field(BasisState.b1(0, 0), P)], P)
