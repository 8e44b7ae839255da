"""Interbasis expansion coefficients between the three spherical bases.

Three independent routes are available for every coefficient:

``closed_form``
    the terminating 3F2 expression,
``cg``
    the Clebsch-Gordan coefficient of su(2) continued to real arguments,
``numeric``
    direct hemisphere quadrature of the overlap integral.

Matrix convention: ``M[i, j]`` expands row state ``i`` of the ``from`` basis
in column state ``j`` of the ``to`` basis,
``Psi_from[i] = sum_j M[i, j] Psi_to[j]``, so ``M[i, j] = <to_j | from_i>``.
Rows and columns follow :func:`basis.enumerate_level`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import Basis, BasisState, ModelParams, enumerate_level, wavefunction_s1
from .quadrature import CONVERGENCE_TOL, DEFAULT_ORDER, NotConverged, hemisphere_grid, integrate_hemisphere
from .specfun import CGArgs, Hyp3F2Spec, cg_continued, hyp3f2_terminating_regularized, rgamma

# (-1)^x := exp(i * PHASE_BRANCH * pi * x). +1 is the branch for which the
# closed forms reproduce the quadrature overlaps (fixed at n=1, m=1, n1=0).
PHASE_BRANCH = 1

ROUTES = ("closed_form", "cg", "numeric")
MEASURE = "sin(theta) dtheta dphi on the upper hemisphere"
ORDERING = "B1: m ascending; B2: n1 ascending; B3: l1 ascending"
CONVENTION = "row i of `from` = sum_j M[i,j] * column j of `to`"


def phase(x: float, branch: int = PHASE_BRANCH) -> complex:
    """(-1)**x continued as exp(i*branch*pi*x); exact for half-integers."""
    twice = 2.0 * x
    if abs(twice - round(twice)) < 1e-12:
        return (1, 1j * branch, -1, -1j * branch)[int(round(twice)) % 4]
    return cmath.exp(1j * branch * math.pi * x)


def _valid(n: int, m: int) -> bool:
    return abs(m) <= n and (n - abs(m)) % 2 == 0


def gegenbauer_fourier_integral(k: int, n: int, lam: float, m: int, branch: int = PHASE_BRANCH) -> complex:
    r"""Closed form of :math:`\int_0^{2\pi} \sin^k\varphi\, C_n^\lambda(\cos\varphi) e^{-im\varphi} d\varphi`.

    Obtained by expanding both factors in exponentials; the surviving sum is
    a terminating 3F2 with the same parameters as the printed identity, but
    with prefactor ``2^{1-k} pi (lam)_n k! / n!``.
    """
    if (n + k - m) % 2 or abs(m) > n + k:
        return 0j
    lead = math.log(2.0) * (1 - k) + math.log(math.pi) + math.lgamma(lam + n) - math.lgamma(lam) \
        + math.lgamma(k + 1) - math.lgamma(n + 1) - math.lgamma((n + k - m) / 2 + 1)
    spec = Hyp3F2Spec((-n, -(n + k - m) / 2, lam), (1 - lam - n, (k - n + m) / 2 + 1))
    return phase((n - m) / 2, branch) * math.exp(lead) * hyp3f2_terminating_regularized(spec)


def _amplitude_3f2(n1: int, n2: int, m: int, nu: float) -> float:
    """Real part of the closed form without its phase; equals the continued CG."""
    n = n1 + n2
    lead = 0.5 * (math.log(2 * (n1 + nu + 0.5)) + math.lgamma(n1 + 1) + math.lgamma(n1 + 2 * nu + 1)
                  - math.lgamma(n2 + 1) - math.lgamma(n + n1 + 2 * nu + 2)
                  - math.lgamma((n - m) / 2 + nu + 1) - math.lgamma((n + m) / 2 + nu + 1)
                  + math.lgamma((n + m) / 2 + 1) - math.lgamma((n - m) / 2 + 1)) \
        + math.lgamma(n + nu + 1)
    spec = Hyp3F2Spec((-n2, -(n - m) / 2, n1 + nu + 1), (-n - nu, (n1 - n2 + m) / 2 + 1))
    return math.exp(lead) * hyp3f2_terminating_regularized(spec)


def cg_args(n1: int, n2: int, m: int, nu: float) -> CGArgs:
    n = n1 + n2
    j = (n + nu) / 2
    return CGArgs(j, (nu + m) / 2, j, (nu - m) / 2, n1 + nu, nu)


def _amplitude_cg(n1: int, n2: int, m: int, nu: float) -> float:
    return cg_continued(cg_args(n1, n2, m, nu))


_AMPLITUDES = {"closed_form": _amplitude_3f2, "cg": _amplitude_cg}


def _amplitude(route: str, n1: int, n2: int, m: int, nu: float) -> float:
    try:
        return _AMPLITUDES[route](n1, n2, m, nu)
    except KeyError:
        raise ValueError(f"route {route!r} has no analytic amplitude") from None


def w_coeff_3f2(n1: int, n2: int, m: int, nu: float, branch: int = PHASE_BRANCH) -> complex:
    """B2 -> B1 coefficient ``W^m_{n1 n2}`` from the terminating 3F2."""
    if not _valid(n1 + n2, m):
        return 0j
    return phase((abs(m) - m - n1) / 2, branch) * _amplitude_3f2(n1, n2, m, nu)


def w_coeff_cg(n1: int, n2: int, m: int, nu: float, branch: int = PHASE_BRANCH) -> complex:
    """B2 -> B1 coefficient ``W^m_{n1 n2}`` from the continued CG coefficient."""
    if not _valid(n1 + n2, m):
        return 0j
    return phase((abs(m) - m - n1) / 2, branch) * _amplitude_cg(n1, n2, m, nu)


def w_inverse(n: int, m: int, n1: int, nu: float, branch: int = PHASE_BRANCH, route: str = "cg") -> complex:
    """B1 -> B2 coefficient: ``Psi_{n m} = sum_{n1} w_inverse * Psi_{n1, n-n1}``."""
    if not _valid(n, m) or not 0 <= n1 <= n:
        return 0j
    return phase((abs(m) - m + n1) / 2, branch) * _amplitude(route, n1, n - n1, m, nu)


def w_basis3(l1: int, l2: int, m: int, nu: float, branch: int = PHASE_BRANCH, route: str = "closed_form") -> complex:
    """B3 -> B1 coefficient, including the extra (-1)^{n + m/2} factor."""
    n = l1 + l2
    if not _valid(n, m):
        return 0j
    return phase(n + m / 2 + (abs(m) - m - l1) / 2, branch) * _amplitude(route, l1, l2, m, nu)


def u_coeff(l1: int, l2: int, n1: int, nu: float, branch: int = PHASE_BRANCH) -> complex:
    """B3 -> B2 coefficient as the bilinear CG sum over parity-allowed m."""
    n = l1 + l2
    if not 0 <= n1 <= n:
        return 0j
    n2 = n - n1
    total = 0j
    for m in range(-n, n + 1, 2):
        total += phase(m / 2, branch) * _amplitude_cg(l1, l2, m, nu) * _amplitude_cg(n1, n2, m, nu)
    return phase(l2 + (l1 + n1) / 2, branch) * total


def overlap_numeric(a: BasisState, b: BasisState, params: ModelParams, order: int = DEFAULT_ORDER) -> complex:
    """<Psi_a | Psi_b> by hemisphere quadrature.

    Both states are evaluated on the S1 grid; the area element is the same in
    every chart, so no Jacobian enters.
    """
    nu = params.nu

    def integrand(theta, phi):
        return np.conj(wavefunction_s1(a, nu, theta, phi)) * wavefunction_s1(b, nu, theta, phi)

    return integrate_hemisphere(integrand, order).value


@dataclass
class OverlapResult:
    matrix: np.ndarray
    error: float
    order: int


def overlap_matrix(bra: list[BasisState], ket: list[BasisState], nu: float,
                   order: int = DEFAULT_ORDER, check: bool = True) -> OverlapResult:
    """Matrix ``G[i, j] = <bra_i | ket_j>`` at ``order`` and ``2*order`` nodes."""
    estimates = []
    for o in (order, 2 * order):
        g = hemisphere_grid(o)
        fa = np.array([wavefunction_s1(s, nu, g.theta, g.phi) for s in bra])
        fb = np.array([wavefunction_s1(s, nu, g.theta, g.phi) for s in ket])
        estimates.append((np.conj(fa) * g.weights) @ fb.T)
    coarse, fine = estimates
    diff = np.abs(fine - coarse)
    err = float(diff.max()) if diff.size else 0.0
    if check and np.any(diff > CONVERGENCE_TOL * (1.0 + np.abs(fine))):
        raise NotConverged(f"overlap matrix not converged at order {order}: max |diff|={err:.3e}",
                           value=fine, error=err)
    return OverlapResult(fine, err, 2 * order)


@dataclass
class CoefficientMatrix:
    n: int
    from_tag: Basis
    to_tag: Basis
    entries: np.ndarray
    route: str
    branch: int = PHASE_BRANCH
    quadrature_error: float | None = None
    rows: list[BasisState] = field(init=False)
    cols: list[BasisState] = field(init=False)

    def __post_init__(self):
        self.from_tag, self.to_tag = Basis(self.from_tag), Basis(self.to_tag)
        self.rows = enumerate_level(self.n, self.from_tag)
        self.cols = enumerate_level(self.n, self.to_tag)

    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.abs(m @ m.conj().T - np.eye(len(m))).max())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "from": self.from_tag.value,
            "to": self.to_tag.value,
            "route": self.route,
            "conventions": {
                "expansion": CONVENTION,
                "ordering": ORDERING,
                "measure": MEASURE,
                "phase_branch": self.branch,
                "phase_rule": "(-1)^x = exp(i*phase_branch*pi*x)",
            },
            "rows": [s.label() for s in self.rows],
            "cols": [s.label() for s in self.cols],
            "entries": [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in self.entries],
            "unitarity_defect": self.unitarity_defect(),
            "quadrature_error": self.quadrature_error,
        }


def _analytic_entry(route: str, src: BasisState, dst: BasisState, nu: float, branch: int) -> complex:
    pair = (src.tag, dst.tag)
    n = src.n
    if pair == (Basis.B2, Basis.B1):
        if route == "cg":
            return w_coeff_cg(src.q1, src.q2, dst.q2, nu, branch)
        return w_coeff_3f2(src.q1, src.q2, dst.q2, nu, branch)
    if pair == (Basis.B1, Basis.B2):
        return w_inverse(n, src.q2, dst.q1, nu, branch, route)
    if pair == (Basis.B3, Basis.B1):
        return w_basis3(src.q1, src.q2, dst.q2, nu, branch, route)
    if pair == (Basis.B1, Basis.B3):
        return w_basis3(dst.q1, dst.q2, src.q2, nu, branch, route).conjugate()
    if pair == (Basis.B3, Basis.B2):
        return u_coeff(src.q1, src.q2, dst.q1, nu, branch)
    if pair == (Basis.B2, Basis.B3):
        return u_coeff(dst.q1, dst.q2, src.q1, nu, branch).conjugate()
    raise ValueError(f"no analytic entry for {pair}")


def coefficient_matrix(n: int, from_tag: Basis | str, to_tag: Basis | str, nu: float,
                       route: str = "closed_form", branch: int = PHASE_BRANCH,
                       order: int = DEFAULT_ORDER, nmax: int | None = None) -> CoefficientMatrix:
    """Interbasis matrix at level ``n``; see the module docstring for layout.

    For ``route="closed_form"`` the B3 <-> B2 block is the product of the
    B3 -> B1 and B1 -> B2 closed-form matrices; ``route="cg"`` uses the
    bilinear CG sum instead.
    """
    from_tag, to_tag = Basis(from_tag), Basis(to_tag)
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    limit = nmax if nmax is not None else (8 if route == "numeric" else 12)
    if n < 0 or n > limit:
        raise ValueError(f"n={n} outside 0..{limit} for route {route}")
    rows, cols = enumerate_level(n, from_tag), enumerate_level(n, to_tag)
    if route == "numeric":
        ov = overlap_matrix(cols, rows, nu, order)
        return CoefficientMatrix(n, from_tag, to_tag, ov.matrix.T.copy(), route, branch, ov.error)
    if from_tag is to_tag:
        return CoefficientMatrix(n, from_tag, to_tag, np.eye(n + 1, dtype=complex), route, branch)
    if route == "closed_form" and {from_tag, to_tag} == {Basis.B2, Basis.B3}:
        b31 = coefficient_matrix(n, Basis.B3, Basis.B1, nu, route, branch).entries
        b12 = coefficient_matrix(n, Basis.B1, Basis.B2, nu, route, branch).entries
        u = b31 @ b12
        entries = u if from_tag is Basis.B3 else u.conj().T.copy()
        return CoefficientMatrix(n, from_tag, to_tag, entries, route, branch)
    entries = np.array([[_analytic_entry(route, r, c, nu, branch) for c in cols] for r in rows], dtype=complex)
    return CoefficientMatrix(n, from_tag, to_tag, entries, route, branch)
