"""Special functions: signed log-gamma, Jacobi and Gegenbauer polynomials,
terminating regularized 3F2 sums and analytically continued Clebsch-Gordan
coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

INTEGER_TOL = 1e-9
POLE_TOL = 1e-12
MAX_TERMS = 500


class PoleError(ValueError):
    """Gamma function evaluated at a non-positive integer."""


class DivergenceError(ArithmeticError):
    """A non-regularized lower parameter of a 3F2 hit a pole before termination."""


class InvalidCoupling(ValueError):
    """Clebsch-Gordan arguments violate the integrality conditions."""


def is_integer(x: float, tol: float = INTEGER_TOL) -> bool:
    return abs(x - round(x)) <= tol


def is_nonpositive_integer(x: float, tol: float = INTEGER_TOL) -> bool:
    return x < 0.5 and is_integer(x, tol)


def log_gamma_signed(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))``.

    Negative non-integer arguments are handled by the reflection formula
    inside :func:`math.lgamma`; the sign follows the alternation of
    Gamma between consecutive poles.
    """
    x = float(x)
    if x <= 0 and abs(x - round(x)) <= POLE_TOL:
        raise PoleError(f"Gamma has a pole at {x!r}")
    if x > 0:
        return math.lgamma(x), 1
    # Gamma(x) < 0 on (-1, 0), > 0 on (-2, -1), ...
    sign = -1 if math.floor(-x) % 2 == 0 else 1
    return math.lgamma(x), sign


def rgamma(x: float) -> float:
    """Reciprocal gamma function, zero at the poles of Gamma."""
    if x <= 0 and abs(x - round(x)) <= POLE_TOL:
        return 0.0
    lg, s = log_gamma_signed(x)
    return s * math.exp(-lg)


def jacobi_poly(n: int, a: float, b: float, x):
    """Jacobi polynomial P_n^{(a,b)}(x) by the three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    apb = a + b
    p1 = 0.5 * (a - b + (apb + 2.0) * x)
    for k in range(2, n + 1):
        c = 2.0 * k + apb
        a1 = 2.0 * k * (k + apb) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1 if p1.ndim else float(p1)


def gegenbauer_poly(n: int, lam: float, x):
    """Gegenbauer polynomial C_n^lam(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    c0 = np.ones_like(x)
    if n == 0:
        return c0 if c0.ndim else float(c0)
    c1 = 2.0 * lam * x
    for k in range(2, n + 1):
        c0, c1 = c1, (2.0 * (k + lam - 1.0) * x * c1 - (k + 2.0 * lam - 2.0) * c0) / k
    return c1 if c1.ndim else float(c1)


@dataclass(frozen=True)
class Hyp3F2Spec:
    """Parameters of a terminating 3F2(upper; lower | 1)."""

    upper: tuple[float, float, float]
    lower: tuple[float, float]

    def __post_init__(self):
        if len(self.upper) != 3 or len(self.lower) != 2:
            raise ValueError("3F2 needs three upper and two lower parameters")
        object.__setattr__(self, "upper", tuple(float(u) for u in self.upper))
        object.__setattr__(self, "lower", tuple(float(e) for e in self.lower))
        if self.length is None:
            raise ValueError(f"series does not terminate: upper={self.upper}")

    @property
    def length(self) -> int | None:
        """Index of the last non-zero term, or None if non-terminating."""
        ends = [int(round(-u)) for u in self.upper if is_nonpositive_integer(u)]
        return min(ends) if ends else None


def hyp3f2_terminating_regularized(spec: Hyp3F2Spec, regularize_both: bool = False) -> float:
    r"""Terminating 3F2 at unit argument divided by Gamma of the second lower
    parameter:

    .. math:: \sum_k \frac{(u_1)_k (u_2)_k (u_3)_k}{(e_1)_k\, k!\, \Gamma(e_2+k)}

    The sum stays finite when ``e2`` is a non-positive integer. With
    ``regularize_both`` the first lower parameter is treated the same way
    (the sum is then also divided by Gamma(e1)), which is what the Racah
    form of the Clebsch-Gordan coefficient needs for integer arguments.
    """
    N = spec.length
    if N > MAX_TERMS:
        raise ValueError(f"termination length {N} exceeds {MAX_TERMS}")
    u1, u2, u3 = spec.upper
    e1, e2 = spec.lower
    terms = []
    # running log|.| and sign of (u1)_k (u2)_k (u3)_k / (k! (e1)_k)
    log_num, sign_num = 0.0, 1
    for k in range(N + 1):
        if k > 0:
            j = k - 1
            for u in (u1, u2, u3):
                log_num += math.log(abs(u + j))
                sign_num *= 1 if u + j > 0 else -1
            log_num -= math.log(k)
            if not regularize_both:
                d = e1 + j
                if abs(d) <= POLE_TOL:
                    raise DivergenceError(f"lower parameter {e1} reaches a pole at k={k}")
                log_num -= math.log(abs(d))
                sign_num *= 1 if d > 0 else -1
        log_t, sign_t = log_num, sign_num
        lower_args = (e1 + k, e2 + k) if regularize_both else (e2 + k,)
        vanishes = False
        for arg in lower_args:
            if arg <= 0 and abs(arg - round(arg)) <= POLE_TOL:
                vanishes = True
                break
            lg, s = log_gamma_signed(arg)
            log_t -= lg
            sign_t *= s
        if not vanishes:
            terms.append(sign_t * math.exp(log_t))
    return math.fsum(terms)


@dataclass(frozen=True)
class CGArgs:
    """Arguments of C^{c,gamma}_{a,alpha; b,beta}."""

    a: float
    alpha: float
    b: float
    beta: float
    c: float
    gamma: float

    def check(self) -> None:
        for name, v in (("a+b-c", self.a + self.b - self.c),
                        ("a-alpha", self.a - self.alpha),
                        ("b-beta", self.b - self.beta)):
            if not (is_integer(v) and v > -0.5):
                raise InvalidCoupling(f"{name} = {v!r} is not a non-negative integer")


def _log_factorials(args: Sequence[float]) -> tuple[float, int]:
    """Sum of log|x!| over ``args`` with the product sign."""
    total, sign = 0.0, 1
    for x in args:
        lg, s = log_gamma_signed(x + 1.0)
        total += lg
        sign *= s
    return total, sign


def cg_continued(args: CGArgs, form: str = "racah") -> float:
    """Clebsch-Gordan coefficient with factorials continued to Gamma(x+1).

    ``form="racah"`` uses the direct 3F2 representation with both lower
    parameters regularized, which is finite for every admissible argument
    set including ordinary integer/half-integer ones. ``form="transformed"``
    uses the representation with lower parameter ``-2a``; it has a genuine
    pole when ``2a`` is a small non-negative integer and is kept as an
    independent code path for continued arguments.
    """
    args.check()
    a, al, b, be, c, ga = args.a, args.alpha, args.b, args.beta, args.c, args.gamma
    if abs(ga - al - be) > INTEGER_TOL:
        return 0.0
    # |alpha| > a, |gamma| > c, or a broken triangle: a factorial argument sits
    # on a negative integer and the coefficient vanishes
    edges = [a + al, a - al, b + be, b - be, c + ga, c - ga, a + b - c, a - b + c, c - a + b]
    if any(is_integer(x) and x < -0.5 for x in edges):
        return 0.0
    if form == "racah":
        lnum, snum = _log_factorials([a + al, b - be, c + ga, c - ga, a - b + c, c - a + b])
        lden, sden = _log_factorials([a + b - c, a + b + c + 1, a - al, b + be])
        radicand_sign = snum * sden * (1 if 2 * c + 1 > 0 else -1)
        if radicand_sign < 0:
            raise InvalidCoupling("negative radicand in continued coefficient")
        pre = math.exp(0.5 * (lnum - lden + math.log(abs(2 * c + 1))))
        spec = Hyp3F2Spec((-a - b + c, -a + al, -b - be), (-b + c + al + 1, -a + c - be + 1))
        return pre * hyp3f2_terminating_regularized(spec, regularize_both=True)
    if form == "transformed":
        lnum, snum = _log_factorials([b + c - a, b - be, c + ga, c - ga])
        lden, sden = _log_factorials([a + b - c, a - b + c, a + b + c + 1, a + al, a - al, b + be])
        if snum * sden * (1 if 2 * c + 1 > 0 else -1) < 0:
            raise InvalidCoupling("negative radicand in continued coefficient")
        l2a, s2a = log_gamma_signed(2 * a + 1)
        pre = s2a * math.exp(0.5 * (lnum - lden + math.log(abs(2 * c + 1))) + l2a)
        # 1/(c-a-beta)! is folded into the regularized sum
        spec = Hyp3F2Spec((-a - b + c, -a + al, b - a + c + 1), (-2 * a, c - a - be + 1))
        return pre * hyp3f2_terminating_regularized(spec)
    raise ValueError(f"unknown form {form!r}")
