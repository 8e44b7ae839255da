"""Self-checks run by ``higgs-s2 verify``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .basis import Basis, BasisState, ModelParams, energy, enumerate_level, epsilon
from .interbasis import PHASE_BRANCH, coefficient_matrix, overlap_matrix
from .operators import StencilConfig, algebra_identity_check, residual_report, state_field
from .quadrature import NotConverged

TAGS = (Basis.B1, Basis.B2, Basis.B3)


@dataclass
class CheckResult:
    name: str
    observed: float
    threshold: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "observed": self.observed, "threshold": self.threshold,
                "passed": self.passed, "detail": self.detail}


def _check(name, observed, threshold, detail=""):
    observed = float(observed)
    return CheckResult(name, observed, threshold, bool(observed <= threshold), detail)


def check_orthonormality(params: ModelParams, nmax: int, order: int, tol: float = 1e-8):
    out = []
    for tag in TAGS:
        states = [s for n in range(nmax + 1) for s in enumerate_level(n, tag)]
        try:
            g = overlap_matrix(states, states, params.nu, order).matrix
        except NotConverged as exc:
            out.append(CheckResult(f"orthonormality[{tag.value}]", float("inf"), tol, False, str(exc)))
            continue
        out.append(_check(f"orthonormality[{tag.value}]", np.abs(g - np.eye(len(states))).max(), tol,
                          f"{len(states)} states, n <= {nmax}"))
    return out


def check_energy_identity(params: ModelParams, nmax: int = 20, tol: float = 1e-12):
    nu = params.nu
    worst = max(abs(epsilon(n, params) - (n + nu + 1) ** 2) / (n + nu + 1) ** 2 for n in range(nmax + 1))
    return _check("energy.epsilon_identity", worst, tol, "2R^2E + a^2R^4 + 1/4 = (n+nu+1)^2")


def check_contraction(alpha: float, radii=(10.0, 100.0, 1000.0), nmax: int = 5, c: float = 5.0):
    """max over R, n of R^2 |E_n/(alpha(n+1)) - 1|, which must stay below c."""
    worst = 0.0
    for R in radii:
        p = ModelParams(alpha, R)
        for n in range(nmax + 1):
            worst = max(worst, R ** 2 * abs(energy(n, p) / (alpha * (n + 1)) - 1.0))
    return _check("energy.contraction_limit", worst, c, "R^2 |E_n/(alpha(n+1)) - 1|")


def check_unitarity(nu: float, nmax: int, tol: float = 1e-10, branch: int = PHASE_BRANCH):
    worst = 0.0
    for n in range(nmax + 1):
        for a, b in itertools.permutations(TAGS, 2):
            worst = max(worst, coefficient_matrix(n, a, b, nu, "closed_form", branch).unitarity_defect())
    return _check("interbasis.unitarity", worst, tol, f"all basis pairs, n <= {nmax}")


def check_routes(nu: float, nmax: int, order: int, branch: int = PHASE_BRANCH,
                 tol_closed: float = 1e-10, tol_numeric: float = 1e-8):
    cg_diff = num_diff = 0.0
    for n in range(nmax + 1):
        for a, b in itertools.permutations(TAGS, 2):
            closed = coefficient_matrix(n, a, b, nu, "closed_form", branch).entries
            cg = coefficient_matrix(n, a, b, nu, "cg", branch).entries
            num = coefficient_matrix(n, a, b, nu, "numeric", order=order).entries
            cg_diff = max(cg_diff, np.abs(closed - cg).max())
            num_diff = max(num_diff, np.abs(closed - num).max())
    return [_check("routes.closed_vs_cg", cg_diff, tol_closed),
            _check("routes.closed_vs_numeric", num_diff, tol_numeric)]


def check_u_composition(nu: float, nmax: int, tol: float = 1e-9, branch: int = PHASE_BRANCH):
    worst = 0.0
    for n in range(nmax + 1):
        u = coefficient_matrix(n, Basis.B3, Basis.B2, nu, "cg", branch).entries
        w31 = coefficient_matrix(n, Basis.B3, Basis.B1, nu, "closed_form", branch).entries
        w12 = coefficient_matrix(n, Basis.B1, Basis.B2, nu, "closed_form", branch).entries
        worst = max(worst, np.abs(u - w31 @ w12).max())
    return _check("interbasis.u_composition", worst, tol)


def check_eigen_residuals(params: ModelParams, nmax: int, tol: float = 1e-6):
    cfg = StencilConfig()
    nu = params.nu
    worst = {"H": 0.0, "J1": 0.0, "J2": 0.0}
    for n in range(nmax + 1):
        for s in enumerate_level(n, Basis.B1):
            worst["H"] = max(worst["H"], residual_report("H", s, energy(n, params), params, cfg).max_rel_residual)
        for s in enumerate_level(n, Basis.B2):
            lam = -s.separation_constant(nu) ** 2
            worst["J1"] = max(worst["J1"], residual_report("J1", s, lam, params, cfg).max_rel_residual)
        for s in enumerate_level(n, Basis.B3):
            lam = -s.separation_constant(nu) ** 2
            worst["J2"] = max(worst["J2"], residual_report("J2", s, lam, params, cfg).max_rel_residual)
    return [_check(f"operators.eigen[{k}]", v, tol) for k, v in worst.items()]


def algebra_fields(params: ModelParams):
    states = [BasisState.b1(2, 0), BasisState.b1(1, 1), BasisState.b1(3, -1), BasisState(Basis.B2, 1, 2)]
    return [state_field(s, params) for s in states]


def check_algebra(params: ModelParams):
    fields = algebra_fields(params)
    out = []
    r = algebra_identity_check("S3_def_eq_commutator", fields, params, StencilConfig(h=1e-3))
    out.append(_check("algebra.S3_definition", r["max_rel_residual"], 1e-6))
    for name in ("comm_S3_S1_eq_4S2", "comm_S3_S2_cubic"):
        r = algebra_identity_check(name, fields, params, StencilConfig(h=1e-2), margin=0.3)
        out.append(_check(f"algebra.{name}", r["max_rel_residual"], 1e-3))
    return out


def run_all(params: ModelParams, nmax: int, order: int, branch: int = PHASE_BRANCH,
            tol_closed: float = 1e-10, tol_numeric: float = 1e-8) -> list[CheckResult]:
    nu = params.nu
    small = min(nmax, 4)
    results = []
    results += check_orthonormality(params, nmax, order, tol_numeric)
    results.append(check_energy_identity(params))
    results.append(check_contraction(params.alpha))
    results.append(check_unitarity(nu, nmax, tol_closed, branch))
    results += check_routes(nu, small, order, branch, tol_closed, tol_numeric)
    results.append(check_u_composition(nu, small, branch=branch))
    results += check_eigen_residuals(params, small)
    results += check_algebra(params)
    return results
