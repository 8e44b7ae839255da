"""Gauss-Legendre rules and the tensor-product hemisphere integrator used as
the numerical oracle for norms and overlaps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

DEFAULT_ORDER = 256
CONVERGENCE_TOL = 1e-8


class NotConverged(ArithmeticError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __len__(self):
        return len(self.nodes)


def _legendre_pair(order: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P_{order-1}(x), P_order(x)) by the Bonnet recurrence."""
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, order + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p0, p1


@lru_cache(maxsize=32)
def _legendre_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on (-1, 1) by Newton iteration on P_order."""
    k = np.arange(1, order + 1)
    # Tricomi initial guess, descending in x
    x = np.cos(np.pi * (k - 0.25) / (order + 0.5))
    for _ in range(100):
        p0, p1 = _legendre_pair(order, x)
        dx = p1 / (order * (x * p1 - p0) / (x * x - 1.0))
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0, p1 = _legendre_pair(order, x)
    dp = order * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1].copy(), w[::-1].copy()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` nodes mapped to (lo, hi).

    Exact for polynomials of degree ``2*order - 1``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = _legendre_nodes(int(order))
    half = 0.5 * (hi - lo)
    return QuadratureRule(lo + half * (x + 1.0), half * w, (float(lo), float(hi)))


def integrate_1d(f: Callable, rule: QuadratureRule):
    return np.sum(rule.weights * f(rule.nodes))


@dataclass(frozen=True)
class HemisphereResult:
    value: complex
    error: float
    order: int

    @property
    def converged(self) -> bool:
        return self.error <= CONVERGENCE_TOL * (1.0 + abs(self.value))


@dataclass(frozen=True)
class HemisphereGrid:
    """Tensor grid over theta in (0, pi/2), phi in (0, 2pi).

    ``weights`` already include the sin(theta) area factor.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    order: int

    @classmethod
    def build(cls, order: int) -> "HemisphereGrid":
        rt = gauss_legendre(order, 0.0, 0.5 * math.pi)
        rp = gauss_legendre(order, 0.0, 2.0 * math.pi)
        th, ph = np.meshgrid(rt.nodes, rp.nodes, indexing="ij")
        w = np.outer(rt.weights, rp.weights) * np.sin(th)
        return cls(th.ravel(), ph.ravel(), w.ravel(), order)

    def integrate(self, values) -> complex:
        return complex(np.sum(self.weights * values))


@lru_cache(maxsize=4)
def hemisphere_grid(order: int) -> HemisphereGrid:
    return HemisphereGrid.build(order)


def integrate_hemisphere(f: Callable, order: int = DEFAULT_ORDER, check: bool = True) -> HemisphereResult:
    """Integrate ``f(theta, phi)`` over the upper hemisphere with measure
    sin(theta) dtheta dphi.

    The estimate is formed at ``order`` and ``2*order`` nodes per axis; the
    finer value is returned together with the difference as error estimate.
    Raises :class:`NotConverged` when the two disagree by more than
    ``1e-8 * (1 + |value|)`` and ``check`` is set.
    """
    coarse = hemisphere_grid(order)
    fine = hemisphere_grid(2 * order)
    v0 = coarse.integrate(f(coarse.theta, coarse.phi))
    v1 = fine.integrate(f(fine.theta, fine.phi))
    res = HemisphereResult(v1, abs(v1 - v0), 2 * order)
    if check and not res.converged:
        raise NotConverged(f"hemisphere quadrature not converged: |diff|={res.error:.3e}",
                           value=v1, error=res.error)
    return res
