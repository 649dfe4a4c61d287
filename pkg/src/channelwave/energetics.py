"""Energy, exterior energies, the flux seminorm, Psi_R truncation and cross energies.

Volume quantities (``norms``, ``exterior_energy``, ``annulus_cross_energy``)
carry the 4 pi r^2 measure.  The flux seminorm is the 1D integral

    int_R^{r_max} (d_r(r u))^2 + (r u_t)^2 dr

with no 4 pi; ``ipp1_sides`` is the one place the two conventions meet.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidState
from .radial_state import (FOUR_PI, Piece, State, _same_grid, integrate_from,
                           piece_derivative, piecewise_derivative, piecewise_integral,
                           piecewise_suffix, piecewise_value, radial_derivative)


@dataclass(frozen=True)
class NormReport:
    h1_sq: float
    l2_sq: float
    l6_6: float
    energy: float

    @property
    def norm_sq(self) -> float:
        """Squared H^1 x L^2 norm."""
        return self.h1_sq + self.l2_sq


def _check_finite(s: State) -> None:
    if not s.finite:
        raise InvalidState("state has non-finite samples")


def _check_radius(s: State, R: float) -> None:
    if not (0.0 <= R <= s.grid.r_max):
        raise InvalidArgument(f"radius {R} outside [0, {s.grid.r_max}]")


def _ur(s: State, pc: Piece) -> np.ndarray:
    return piece_derivative(s.u, s.grid, pc)


def _vr(s: State, pc: Piece) -> np.ndarray:
    return piece_derivative(s.grid.r * s.u, s.grid, pc, parity=-1)


def norms(s: State) -> NormReport:
    _check_finite(s)
    g = s.grid
    w = FOUR_PI * g.r ** 2
    h1 = piecewise_integral(lambda pc: w[pc.nodes] * _ur(s, pc) ** 2, g, s.breaks)
    l2 = piecewise_integral(lambda pc: w[pc.nodes] * s.ut[pc.nodes] ** 2, g, s.breaks)
    l6 = piecewise_integral(lambda pc: w[pc.nodes] * s.u[pc.nodes] ** 6, g, s.breaks)
    return NormReport(h1, l2, l6, h1 / 2.0 + l2 / 2.0 - l6 / 6.0)


def energy_norm(s: State) -> float:
    """H^1 x L^2 norm (not squared)."""
    return float(np.sqrt(max(norms(s).norm_sq, 0.0)))


def energy_density(s: State) -> np.ndarray:
    """|d_r u|^2 + u_t^2 at the nodes (no measure); right-hand limits on break nodes."""
    ur = piecewise_derivative(s.u, s.grid, s.breaks)
    return ur * ur + s.ut * s.ut


def _energy_piece(s: State):
    w = FOUR_PI * s.grid.r ** 2
    return lambda pc: w[pc.nodes] * (_ur(s, pc) ** 2 + s.ut[pc.nodes] ** 2)


def exterior_energy(s: State, R: float) -> float:
    _check_radius(s, R)
    return piecewise_integral(_energy_piece(s), s.grid, s.breaks, R)


def exterior_energy_profile(s: State) -> np.ndarray:
    """Exterior energy at every node radius, ``exterior_energy(s, r_i)`` for all i."""
    return piecewise_suffix(_energy_piece(s), s.grid, s.breaks)


def flux_density(s: State) -> np.ndarray:
    """(d_r v)^2 + v_t^2 with v = r u."""
    r = s.grid.r
    vr = piecewise_derivative(r * s.u, s.grid, s.breaks, parity=-1)
    vt = r * s.ut
    return vr * vr + vt * vt


def flux_seminorm(s: State, R: float) -> float:
    _check_radius(s, R)
    r = s.grid.r
    return piecewise_integral(lambda pc: _vr(s, pc) ** 2 + (r[pc.nodes] * s.ut[pc.nodes]) ** 2,
                              s.grid, s.breaks, R)


def ipp1_sides(s: State, R: float) -> tuple[float, float]:
    """Both sides of int_R (d_r(ru))^2 dr = int_R (d_r u)^2 r^2 dr - R u(R)^2.

    The integrals stop at r_max, so the right side carries the outer boundary
    term ``r_max u(r_max)^2``; it vanishes for data supported inside the grid.
    """
    _check_radius(s, R)
    g = s.grid
    r = g.r
    lhs = piecewise_integral(lambda pc: _vr(s, pc) ** 2, g, s.breaks, R)
    uR = piecewise_value(s.u, g, s.breaks, R)
    rhs = (piecewise_integral(lambda pc: (_ur(s, pc) * r[pc.nodes]) ** 2, g, s.breaks, R)
           - R * uR ** 2 + g.r_max * s.u[-1] ** 2)
    return lhs, rhs


def psi_truncate(s: State, R: float) -> State:
    """Keep the data on r >= R; constant u(R) and zero velocity inside.

    The result records R as a break, so its norms see the kink exactly.
    """
    if not (0.0 < R < s.grid.r_max):
        raise InvalidArgument(f"truncation radius {R} outside (0, {s.grid.r_max})")
    r = s.grid.r
    inside = r < R
    if R in s.breaks and np.all(s.ut[inside] == 0.0) and np.all(s.u[inside] == s.u[inside][:1]):
        return s  # already truncated at R
    uR = piecewise_value(s.u, s.grid, s.breaks, R)
    u = np.where(inside, uR, s.u)
    ut = np.where(inside, 0.0, s.ut)
    return State(s.grid, u, ut, s.t, (R,) + tuple(b for b in s.breaks if b > R))


def annulus_cross_energy(a: State, b: State, rho: float, sigma: float) -> float:
    """int_{rho < r < sigma} (d_r u_a d_r u_b + u_t,a u_t,b) 4 pi r^2 dr."""
    _same_grid(a, b)
    if not rho < sigma:
        raise InvalidArgument(f"need rho < sigma, got {rho} >= {sigma}")
    _check_radius(a, rho)
    _check_radius(a, sigma)
    g = a.grid
    w = FOUR_PI * g.r ** 2
    brk = tuple(sorted(set(a.breaks) | set(b.breaks)))

    def dens(pc):
        sl = pc.nodes
        return w[sl] * (piece_derivative(a.u, g, pc) * piece_derivative(b.u, g, pc)
                        + a.ut[sl] * b.ut[sl])
    return piecewise_integral(dens, g, brk, rho, sigma)


def h1_inner(f: np.ndarray, h: np.ndarray, grid, mask_lo: float = 0.0,
             mask_hi: float | None = None) -> float:
    """Dirichlet pairing of two radial functions over an annulus."""
    ff = radial_derivative(np.asarray(f, float), grid.dr)
    hh = radial_derivative(np.asarray(h, float), grid.dr)
    return integrate_from(FOUR_PI * grid.r ** 2 * ff * hh, grid, mask_lo, mask_hi)
