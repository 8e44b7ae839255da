"""Quantum numbers, energy levels and normalized eigenfunctions of the Higgs
oscillator on the upper hemisphere in its three separable spherical bases.

All wavefunctions are normalized with the measure sin(theta) dtheta dphi on
the hemisphere (no R^2 factor); ``R`` only enters the energies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .geometry import AnglePair, EmbeddedPoint, System, chart_from_unit, embed_unit, from_embedded, to_embedded
from .specfun import gegenbauer_poly, jacobi_poly


class Basis(str, enum.Enum):
    B1 = "B1"  # (n_r, m) in (theta, phi)
    B2 = "B2"  # (n1, n2) in (theta', phi')
    B3 = "B3"  # (l1, l2) in (theta'', phi'')

    @property
    def system(self) -> System:
        return {Basis.B1: System.S1, Basis.B2: System.S2, Basis.B3: System.S3}[self]


@dataclass(frozen=True)
class ModelParams:
    """Oscillator strength ``alpha`` and sphere radius ``R``."""

    alpha: float
    R: float = 1.0
    nu: float = field(init=False)

    def __post_init__(self):
        if not (self.alpha > 0 and self.R > 0):
            raise ValueError("alpha and R must be positive")
        object.__setattr__(self, "nu", math.sqrt(self.alpha ** 2 * self.R ** 4 + 0.25))

    @classmethod
    def from_nu(cls, nu: float, R: float = 1.0) -> "ModelParams":
        if not nu > 0.5:
            raise ValueError("nu must exceed 1/2")
        return cls(math.sqrt(nu * nu - 0.25) / R ** 2, R)

    @property
    def coupling(self) -> float:
        """alpha^2 R^4 = nu^2 - 1/4."""
        return self.alpha ** 2 * self.R ** 4


@dataclass(frozen=True)
class BasisState:
    """A state label. ``q`` holds (n_r, m), (n1, n2) or (l1, l2)."""

    tag: Basis
    q1: int
    q2: int

    def __post_init__(self):
        object.__setattr__(self, "tag", Basis(self.tag))
        if self.q1 < 0 or (self.tag is not Basis.B1 and self.q2 < 0):
            raise ValueError(f"invalid quantum numbers for {self.tag.value}: {(self.q1, self.q2)}")

    @property
    def n(self) -> int:
        if self.tag is Basis.B1:
            return 2 * self.q1 + abs(self.q2)
        return self.q1 + self.q2

    def separation_constant(self, nu: float) -> float:
        """A = n1 + nu + 1/2 (B2) or B = l1 + nu + 1/2 (B3)."""
        if self.tag is Basis.B1:
            raise ValueError("B1 states are labelled by m, not a separation constant")
        return self.q1 + nu + 0.5

    @classmethod
    def b1(cls, n: int, m: int) -> "BasisState":
        """B1 state from principal quantum number and m."""
        if (n - abs(m)) % 2 or abs(m) > n:
            raise ValueError(f"no B1 state with n={n}, m={m}")
        return cls(Basis.B1, (n - abs(m)) // 2, m)

    def label(self) -> str:
        return f"{self.tag.value}({self.q1},{self.q2})"


def energy(n: int, params: ModelParams) -> float:
    nu = params.nu
    return ((n + 1) * (n + 2) + (2 * nu - 1) * (n + 1)) / (2 * params.R ** 2)


def epsilon(n: int, params: ModelParams) -> float:
    """Poschl-Teller spectral parameter 2 R^2 E + alpha^2 R^4 + 1/4."""
    return 2 * params.R ** 2 * energy(n, params) + params.coupling + 0.25


def enumerate_level(n: int, tag: Basis | str) -> list[BasisState]:
    """All states with principal quantum number ``n``.

    Canonical order: B1 by ascending m, B2 by ascending n1, B3 by ascending l1.
    """
    tag = Basis(tag)
    if tag is Basis.B1:
        return [BasisState.b1(n, m) for m in range(-n, n + 1, 2)]
    return [BasisState(tag, k, n - k) for k in range(n + 1)]


def _z_log_norm(n_r: int, m: int, nu: float) -> float:
    m = abs(m)
    return 0.5 * (math.log(2 * (2 * n_r + m + nu + 1)) + math.lgamma(n_r + 1)
                  + math.lgamma(n_r + m + nu + 1) - math.lgamma(n_r + m + 1)
                  - math.lgamma(n_r + nu + 1))


def z_theta(n_r: int, m: int, nu: float, theta):
    """Normalized Poschl-Teller function on (0, pi/2)."""
    theta = np.asarray(theta, dtype=float)
    am = abs(m)
    val = (math.exp(_z_log_norm(n_r, m, nu)) * np.sin(theta) ** (am + 0.5)
           * np.cos(theta) ** (nu + 0.5) * jacobi_poly(n_r, am, nu, np.cos(2 * theta)))
    return val if np.ndim(val) else float(val)


def _s_log_norm(n: int, a: float) -> float:
    # from the Gegenbauer orthogonality integral with weight sin^{2a+1}
    return (a * math.log(2.0) + math.lgamma(a + 0.5)
            + 0.5 * (math.log((n + a + 0.5) / math.pi) + math.lgamma(n + 1) - math.lgamma(n + 2 * a + 1)))


def s_func(n: int, a: float, phi):
    """S_n^a(phi) = N (sin phi)^{a+1/2} C_n^{a+1/2}(cos phi), unit norm on (0, pi)."""
    phi = np.asarray(phi, dtype=float)
    val = (math.exp(_s_log_norm(n, a)) * np.sin(phi) ** (a + 0.5)
           * gegenbauer_poly(n, a + 0.5, np.cos(phi)))
    return val if np.ndim(val) else float(val)


def native_wavefunction(state: BasisState, nu: float, first, second):
    """Wavefunction in the state's own chart, vectorized over angles."""
    q1, q2 = state.q1, state.q2
    if state.tag is Basis.B1:
        return (z_theta(q1, q2, nu, first) / np.sqrt(np.sin(first))
                * np.exp(1j * q2 * np.asarray(second)) / math.sqrt(2 * math.pi))
    if state.tag is Basis.B2:
        A = q1 + nu + 0.5
        return s_func(q2, A, first) * s_func(q1, nu, second) / np.sqrt(np.sin(first))
    B = q1 + nu + 0.5
    return s_func(q1, nu, np.asarray(second) + 0.5 * math.pi) * s_func(q2, B, first) / np.sqrt(np.sin(first))


def wavefunction_s1(state: BasisState, nu: float, theta, phi):
    """Wavefunction of any basis state evaluated at S1 angles (arrays)."""
    if state.tag is Basis.B1:
        return native_wavefunction(state, nu, theta, phi)
    s = embed_unit(System.S1, theta, phi)
    t, p = chart_from_unit(state.tag.system, *s)
    return native_wavefunction(state, nu, t, p)


def eval_wavefunction(state: BasisState, params: ModelParams,
                      p: Union[AnglePair, EmbeddedPoint]) -> complex:
    """Wavefunction at a single point given in any chart or embedded."""
    if isinstance(p, AnglePair):
        p.validate()
        if p.system is not state.tag.system:
            p = from_embedded(to_embedded(p), state.tag.system)
    else:
        p = from_embedded(p, state.tag.system)
    return complex(native_wavefunction(state, params.nu, p.first, p.second))
