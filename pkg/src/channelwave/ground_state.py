"""The ground state W = (1 + r^2/3)^{-1/2}, its rescalings and tail asymptotics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument
from .radial_state import FOUR_PI, Field, RadialGrid, State, integrate_from, make_grid

SQRT3 = math.sqrt(3.0)
#: closed form of the integral of |grad W|^2 over R^3
GRAD_W_SQ_EXACT = 3.0 * SQRT3 * math.pi ** 2 / 4.0

#: (k, p, q) triples used to place W^k and grad(W^k) in Lebesgue spaces
WV_EXPONENTS = ((1, 6.0, 3.0), (2, 4.0, 2.0), (3, 4.0, 4.0 / 3.0), (4, 8.0 / 3.0, 8.0 / 7.0))


@dataclass(frozen=True)
class SolitonParams:
    lam: float
    iota: int = 1

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidArgument(f"soliton scale must be positive, got {self.lam}")
        if self.iota not in (-1, 1):
            raise InvalidArgument(f"soliton sign must be +1 or -1, got {self.iota}")


def w_value(r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidArgument("W is defined for r >= 0")
    out = 1.0 / np.sqrt(1.0 + r * r / 3.0)
    return float(out) if out.ndim == 0 else out


def w_derivative(r):
    """dW/dr = -(r/3) W^3."""
    r = np.asarray(r, dtype=float)
    return -(r / 3.0) * (1.0 + r * r / 3.0) ** -1.5


def w_second_derivative(r):
    r = np.asarray(r, dtype=float)
    a = 1.0 + r * r / 3.0
    return -(1.0 / 3.0) * a ** -1.5 + (r * r / 3.0) * a ** -2.5


def scaled_w(r, lam: float, iota: int = 1):
    """iota lam^{-1/2} W(r/lam)."""
    return iota * lam ** -0.5 * w_value(np.asarray(r, dtype=float) / lam)


def scaled_w_derivative(r, lam: float, iota: int = 1):
    return iota * lam ** -1.5 * w_derivative(np.asarray(r, dtype=float) / lam)


def soliton_state(p: SolitonParams, grid: RadialGrid) -> State:
    return State(grid, scaled_w(grid.r, p.lam, p.iota), grid.zeros(), 0.0)


def gradient_energy_within(rho: float) -> float:
    """Closed form of the integral of |grad W|^2 over the ball |x| <= rho."""
    th = math.atan(rho / SQRT3)
    s = 3.0 * th / 8.0 - math.sin(2 * th) / 4.0 + math.sin(4 * th) / 32.0
    return 4.0 * SQRT3 * math.pi * s


def tail_series(a: float, b: float, R: float, terms: int = 24) -> float:
    """Integral of r^a W(r)^b over [R, inf) (1D, no 4 pi) from the large-r expansion.

    Uses W^b = 3^{b/2} r^{-b} (1 + 3/r^2)^{-b/2}; converges for R > sqrt(3).
    """
    if R <= 2.0:
        raise InvalidArgument("tail series needs R > 2")
    total, c = 0.0, 1.0
    for j in range(terms):
        e = a - b - 2 * j
        if e >= -1:
            raise InvalidArgument("divergent tail")
        total += c * 3.0 ** j * R ** (e + 1) / (-(e + 1))
        c *= (-b / 2.0 - j) / (j + 1)  # generalized binomial coefficient
    return 3.0 ** (b / 2.0) * total


@dataclass(frozen=True)
class PohozaevReport:
    gradW_sq: float
    W6: float
    E_W: float


def pohozaev_report(grid: RadialGrid) -> PohozaevReport:
    """Quadrature of grad W and W^6 on the grid plus their analytic tails past r_max."""
    r = grid.r
    grad_sq = integrate_from(FOUR_PI * r ** 2 * w_derivative(r) ** 2, grid)
    w6 = integrate_from(FOUR_PI * r ** 2 * w_value(r) ** 6, grid)
    if grid.r_max > 2.0:
        grad_sq += FOUR_PI * tail_series(4.0, 6.0, grid.r_max) / 9.0
        w6 += FOUR_PI * tail_series(2.0, 6.0, grid.r_max)
    return PohozaevReport(grad_sq, w6, 0.5 * grad_sq - w6 / 6.0)


@lru_cache(maxsize=None)
def grad_w_sq() -> float:
    """Reference value of ||grad W||^2 from the high-resolution quadrature."""
    return pohozaev_report(make_grid(200.0, 200 * 512)).gradW_sq


def truncated_potential(R0: float, t: float, grid: RadialGrid) -> Field:
    """W(R0 + |t|) inside the ball r < R0 + |t|, W(r) outside."""
    if not R0 > 0:
        raise InvalidArgument(f"R0 must be positive, got {R0}")
    edge = R0 + abs(t)
    r = grid.r
    return Field(grid, w_value(np.maximum(r, edge)))


def tail_exponent(k: int, p: float, R_list, mode: str = "value") -> float:
    """Fitted log-log slope of the exterior integral of W^{kp} (or |grad W^k|^p).

    The integrals over |x| >= R are computed by trapezoid quadrature on
    [R, 16 max(R_list)] plus the expansion of the remaining tail.
    """
    R_list = np.asarray(R_list, dtype=float)
    if k < 1 or p < 1:
        raise InvalidArgument("need k >= 1 and p >= 1")
    if len(R_list) < 3 or np.any(np.diff(R_list) <= 0) or R_list[0] < 10:
        raise InvalidArgument("R_list needs >= 3 increasing radii, all >= 10")
    if mode == "value":
        if k * p <= 3:
            raise InvalidArgument(f"kp = {k * p} <= 3: the tail integral diverges")
        coeff, a, b = 1.0, 2.0, k * p
    elif mode == "gradient":
        if (k + 1) * p <= 3:
            raise InvalidArgument(f"(k+1)q = {(k + 1) * p} <= 3: the tail integral diverges")
        # |grad W^k| = (k r / 3) W^{k+2}
        coeff, a, b = (k / 3.0) ** p, 2.0 + p, (k + 2) * p
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    far = 16.0 * R_list[-1]
    tails = []
    for R in R_list:
        n = int(math.ceil((far - R) / (R / 256.0)))
        x = np.linspace(R, far, n + 1)
        g = x ** a * w_value(x) ** b
        near = np.trapezoid(g, x) if hasattr(np, "trapezoid") else np.trapz(g, x)
        tails.append(FOUR_PI * coeff * (near + tail_series(a, b, far)))
    slope, _ = np.polyfit(np.log(R_list), np.log(tails), 1)
    return float(slope)


def ode_residual(r):
    """Delta_r W + W^5 from the analytic derivatives (zero up to rounding)."""
    r = np.asarray(r, dtype=float)
    return w_second_derivative(r) + 2.0 / r * w_derivative(r) + w_value(r) ** 5
