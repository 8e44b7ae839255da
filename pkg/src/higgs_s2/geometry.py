"""The three spherical charts of the upper hemisphere and the embedded
Cartesian triple.

Chart conventions (unit sphere, scaled by ``R``)::

    S1 (theta, phi):    s1 = sin t cos p,  s2 = sin t sin p,  s3 = cos t
    S2 (theta', phi'):  s1 = cos t,        s2 = sin t cos p,  s3 = sin t sin p
    S3 (theta'', phi''): s1 = sin t sin p, s2 = cos t,        s3 = sin t cos p

Only the upper hemisphere ``s3 > 0`` is used: the potential is infinite on
the equator and the bound states live on one hemisphere.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

SPHERE_TOL = 1e-12
TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class OutOfDomain(ValueError):
    """Angles or point outside the open upper hemisphere."""


class CoordinateSingularity(ValueError):
    """Point sits on a pole of the requested chart."""


class System(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


@dataclass(frozen=True)
class EmbeddedPoint:
    s1: float
    s2: float
    s3: float
    R: float = 1.0

    def __post_init__(self):
        r2 = self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2
        if abs(r2 - self.R ** 2) > SPHERE_TOL * self.R ** 2:
            raise OutOfDomain(f"point not on the sphere of radius {self.R}: |s|^2={r2}")
        if not self.s3 > 0:
            raise OutOfDomain("s3 must be positive (upper hemisphere)")

    def unit(self) -> tuple[float, float, float]:
        return self.s1 / self.R, self.s2 / self.R, self.s3 / self.R


@dataclass(frozen=True)
class AnglePair:
    system: System
    first: float
    second: float

    def __post_init__(self):
        object.__setattr__(self, "system", System(self.system))

    def validate(self) -> None:
        t, p = self.first, self.second
        if self.system is System.S1:
            ok = 0.0 < t < HALF_PI and 0.0 <= p < TWO_PI
        elif self.system is System.S2:
            ok = 0.0 < t < math.pi and 0.0 < p < math.pi
        else:
            ok = 0.0 < t < math.pi and -HALF_PI < p < HALF_PI
        if not ok:
            raise OutOfDomain(f"{self.system.value} angles ({t}, {p}) outside the open hemisphere")


def embed_unit(system: System | str, first, second):
    """Vectorized chart -> unit Cartesian map, no range checks."""
    system = System(system)
    st, ct = np.sin(first), np.cos(first)
    sp, cp = np.sin(second), np.cos(second)
    if system is System.S1:
        return st * cp, st * sp, ct
    if system is System.S2:
        return ct, st * cp, st * sp
    return st * sp, ct, st * cp


def chart_from_unit(system: System | str, s1, s2, s3):
    """Vectorized unit Cartesian -> chart angles, no range checks.

    Branches: phi in [0, 2pi) for S1, phi' = atan2(s3, s2) in (0, pi),
    phi'' = atan2(s1, s3) in (-pi/2, pi/2).
    """
    system = System(system)
    if system is System.S1:
        theta = np.arctan2(np.hypot(s1, s2), s3)
        phi = np.mod(np.arctan2(s2, s1), TWO_PI)
        return theta, phi
    if system is System.S2:
        return np.arctan2(np.hypot(s2, s3), s1), np.arctan2(s3, s2)
    return np.arctan2(np.hypot(s1, s3), s2), np.arctan2(s1, s3)


def to_embedded(p: AnglePair, R: float = 1.0) -> EmbeddedPoint:
    p.validate()
    s1, s2, s3 = embed_unit(p.system, p.first, p.second)
    if not s3 > 0:
        raise OutOfDomain("point lies on the equator s3 = 0")
    return EmbeddedPoint(R * float(s1), R * float(s2), R * float(s3), R)


def from_embedded(e: EmbeddedPoint, target: System | str) -> AnglePair:
    target = System(target)
    s1, s2, s3 = e.unit()
    # distance from the chart's polar axis
    rho = {System.S1: math.hypot(s1, s2),
           System.S2: math.hypot(s2, s3),
           System.S3: math.hypot(s1, s3)}[target]
    if rho <= SPHERE_TOL:
        raise CoordinateSingularity(f"point ({s1}, {s2}, {s3}) is a pole of chart {target.value}")
    t, ph = chart_from_unit(target, s1, s2, s3)
    out = AnglePair(target, float(t), float(ph))
    out.validate()
    return out


def convert(p: AnglePair, target: System | str) -> AnglePair:
    return from_embedded(to_embedded(p), target)
