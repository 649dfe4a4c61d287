"""Exact radial free waves through the characteristic representation.

A radial solution of the free wave equation satisfies

    r u(t, r) = f(t + r) - f(t - r),

so the profile derivative ``fdot`` on the line carries the whole solution.
At t = 0, with v = r u,

    fdot(r)  = (d_r v + d_t v) / 2,
    fdot(-r) = (d_r v - d_t v) / 2,        r >= 0.

A profile stores ``fdot`` on the symmetric mesh ``s_j = -s_max + j ds`` and is
zero outside it; ``f`` is its (end-corrected) cumulative trapezoid integral anchored at
``f(-s_max) = 0``.  ``t0`` is the time at which the profile was encoded: the
wave at time t uses the local time ``t - t0``.

Exterior quantities here follow the 1D convention of the exterior identity:
``exterior_energy_exact`` equals the R^3 exterior energy divided by 4 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energetics import exterior_energy
from .errors import HorizonExceeded, InvalidArgument
from .radial_state import (RadialGrid, State, _frozen, axis_value, cumulative_integral,
                           integrate_from, interp_cubic, make_grid, piecewise_derivative,
                           radial_derivative)


@dataclass(frozen=True)
class CharacteristicProfile:
    s_max: float
    fdot: np.ndarray
    t0: float = 0.0
    #: explicit primitive, for profiles with jumps in fdot (Psi-truncated data)
    f_values: np.ndarray | None = None

    def __post_init__(self):
        fd = _frozen(self.fdot)
        if fd.ndim != 1 or fd.size < 9 or fd.size % 2 == 0:
            raise InvalidArgument("fdot needs an odd number (>= 9) of samples")
        if not np.all(np.isfinite(fd)):
            raise InvalidArgument("fdot must be finite")
        object.__setattr__(self, "fdot", fd)
        if self.f_values is not None:
            fv = _frozen(self.f_values)
            if fv.shape != fd.shape or not np.all(np.isfinite(fv)):
                raise InvalidArgument("f_values must be finite and match fdot")
            object.__setattr__(self, "f_values", fv)

    @property
    def n(self) -> int:
        """Intervals on each half line."""
        return (self.fdot.size - 1) // 2

    @property
    def ds(self) -> float:
        return self.s_max / self.n

    @property
    def s(self) -> np.ndarray:
        return (np.arange(self.fdot.size) - self.n) * self.ds

    @property
    def f(self) -> np.ndarray:
        if self.f_values is not None:
            return self.f_values
        return cumulative_integral(self.fdot, self.ds, corrected=True)

    @property
    def line(self) -> RadialGrid:
        """The s-mesh shifted to start at 0, for reuse of the radial quadrature."""
        return RadialGrid(2.0 * self.s_max, 2 * self.n)

    def fdot_at(self, s):
        s = np.asarray(s, dtype=float)
        val = interp_cubic(self.fdot, self.line, s + self.s_max)
        return np.where(np.abs(s) <= self.s_max, val, 0.0)

    def f_at(self, s):
        s = np.asarray(s, dtype=float)
        f = self.f
        val = interp_cubic(f, self.line, s + self.s_max)
        return np.where(s < -self.s_max, 0.0, np.where(s > self.s_max, f[-1], val))

    def square_integral(self, a: float = -math.inf, b: float = math.inf) -> float:
        """int_a^b fdot^2 ds on the profile mesh (zero padding outside)."""
        lo = max(a, -self.s_max) + self.s_max
        hi = min(b, self.s_max) + self.s_max
        if hi <= lo:
            return 0.0
        return integrate_from(self.fdot ** 2, self.line, lo, hi)

    @property
    def total(self) -> float:
        """2 int fdot^2: the full flux seminorm of the wave."""
        return 2.0 * self.square_integral()

    def shifted(self, t0: float) -> "CharacteristicProfile":
        return CharacteristicProfile(self.s_max, self.fdot, t0, self.f_values)


def to_characteristic(s: State) -> CharacteristicProfile:
    """Encode a state as free-wave data anchored at its own time stamp."""
    g = s.grid
    r = g.r
    vr = piecewise_derivative(r * s.u, g, s.breaks, parity=-1)
    vt = r * s.ut
    plus = 0.5 * (vr + vt)      # fdot(r)
    minus = 0.5 * (vr - vt)     # fdot(-r)
    fdot = np.concatenate([minus[:0:-1], plus])
    return CharacteristicProfile(g.r_max, fdot, s.t)


def from_characteristic(p: CharacteristicProfile, t: float, grid: RadialGrid) -> State:
    """Sample the free wave at time t on ``grid``."""
    tau = t - p.t0
    r = grid.r
    v = p.f_at(tau + r) - p.f_at(tau - r)
    vt = p.fdot_at(tau + r) - p.fdot_at(tau - r)
    u = np.empty_like(r)
    ut = np.empty_like(r)
    u[1:] = v[1:] / r[1:]
    ut[1:] = vt[1:] / r[1:]
    u[0] = 2.0 * float(p.fdot_at(tau))
    ut[0] = axis_value(ut[1], ut[2], ut[3])
    return State(grid, u, ut, t)


def exterior_energy_exact(p: CharacteristicProfile, rho0: float, t: float) -> float:
    """Exterior energy on |x| >= rho0 + tau (1D convention), tau = t - p.t0 >= 0.

    2 int_{rho0+2tau}^inf fdot^2 + 2 int_{-inf}^{-rho0} fdot^2
        + (f(rho0 + 2tau) - f(-rho0))^2 / (rho0 + tau)
    """
    tau = t - p.t0
    if rho0 + tau < 0:
        raise InvalidArgument("need rho0 + t >= 0")
    val = 2.0 * p.square_integral(rho0 + 2.0 * tau, math.inf)
    val += 2.0 * p.square_integral(-math.inf, -rho0)
    rho = rho0 + tau
    if rho > 0:
        val += float(p.f_at(rho0 + 2.0 * tau) - p.f_at(-rho0)) ** 2 / rho
    return val


def measured_exterior(p: CharacteristicProfile, rho0: float, t: float,
                      grid: RadialGrid) -> float:
    """The same quantity by evolving on ``grid`` and integrating (1D convention)."""
    st = from_characteristic(p, t, grid)
    return exterior_energy(st, rho0 + (t - p.t0)) / (4.0 * math.pi)


def asymptotic_channels(p: CharacteristicProfile, R: float) -> tuple[float, float]:
    """Limits of the exterior energy at R + |t| as t -> +inf and t -> -inf."""
    if R < 0:
        raise InvalidArgument("R must be >= 0")
    forward = 2.0 * p.square_integral(-math.inf, -R)
    backward = 2.0 * p.square_integral(R, math.inf)
    return forward, backward


@dataclass(frozen=True)
class EasyChannel:
    profile: CharacteristicProfile
    rho0: float
    t0: float
    eta: float
    horizon: float

    def exterior_at(self, t: float) -> float:
        """Exterior energy of the truncated wave on |x| >= rho0 + t (1D convention)."""
        if t < self.t0:
            raise InvalidArgument(f"t = {t} precedes t0 = {self.t0}")
        return exterior_energy_exact(self.profile, self.rho0 + self.t0, t)


def solve_rho0(p: CharacteristicProfile, eps: float) -> float:
    """rho0 with 2 int_{-inf}^{-rho0} fdot^2 = eps (bisection, value kept >= eps)."""
    def left_mass(rho):
        return 2.0 * p.square_integral(-math.inf, -rho)

    lo, hi = -p.s_max, p.s_max   # left_mass(lo) = total >= eps >= 0 = left_mass(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if left_mass(mid) >= eps:
            lo = mid
        else:
            hi = mid
    return lo


def psi_truncated_profile(p: CharacteristicProfile, t: float, R: float) -> CharacteristicProfile:
    """Profile of the Psi_R truncation of the wave at time t, anchored at t.

    Outside |s| < R the new profile is the old one shifted by t - t0; inside,
    u = u(R) and u_t = 0 give fdot = u(R)/2.  R must be a node of the profile
    mesh: node samples carry the outer values, the explicit primitive is exact
    and the exterior quadratures never read across the two jumps.
    """
    tau = t - p.t0
    s = p.s
    k = R / p.ds
    if not (0 < R < p.s_max) or abs(k - round(k)) > 1e-9:
        raise InvalidArgument(f"cut radius {R} must be a positive profile node")
    R = round(k) * p.ds
    fR, fmR = float(p.f_at(tau + R)), float(p.f_at(tau - R))
    half_uR = 0.5 * (fR - fmR) / R
    inner = np.abs(s) < R - 0.5 * p.ds
    fdot = np.where(inner, half_uR, p.fdot_at(tau + s))
    f = np.where(inner, fmR + (s + R) * half_uR, p.f_at(tau + s))
    return CharacteristicProfile(p.s_max, fdot, t, f)


def easy_channel_construct(p: CharacteristicProfile, eps: float,
                           horizon: float | None = None) -> EasyChannel:
    """Small-energy wave keeping between eps and 2 eps outside rho0 + t for t >= t0.

    rho0 is rounded down to a mesh node, which can only raise the left mass
    above eps; t0 runs over multiples of ds.
    """
    total = p.total
    if total <= 0:
        raise InvalidArgument("profile is identically zero")
    if not (0 < eps < total):
        raise InvalidArgument(f"eps must lie in (0, {total}), got {eps}")
    horizon = 4.0 * p.s_max if horizon is None else horizon
    ds = p.ds
    rho0 = math.floor(solve_rho0(p, eps) / ds + 1e-9) * ds
    k0 = max(1, int(math.ceil(-rho0 / ds - 1e-9)) + 1)
    ks = np.arange(k0, int(math.floor(horizon / ds)) + 1)
    vals = np.array([exterior_energy_exact(p, rho0, p.t0 + k * ds) for k in ks])
    ok = (vals >= eps) & (vals <= 2.0 * eps)
    if ks.size == 0 or not ok[-1]:
        raise HorizonExceeded(f"exterior energy not in [eps, 2 eps] at the horizon {horizon}")
    bad = np.nonzero(~ok)[0]
    first = 0 if bad.size == 0 else bad[-1] + 1
    t0 = float(ks[first] * ds)
    cut = rho0 + t0
    if cut >= p.s_max - 4 * ds:
        raise HorizonExceeded(f"truncation radius {cut} leaves the profile mesh")
    trunc = psi_truncated_profile(p, p.t0 + t0, cut)
    return EasyChannel(trunc, rho0, p.t0 + t0, eps, horizon)
