"""Channel-of-energy scans, support radii and the large-r tail of radial data.

Exterior energies here carry the full 4 pi r^2 measure.  The tail tools work
on v_0 = r u_0, whose limit at infinity tells a soliton tail (v_0 -> l != 0,
scale l^2 / 3) from compactly supported or generic data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energetics import exterior_energy, exterior_energy_profile, norms, psi_truncate
from .errors import InvalidArgument
from .ground_state import SQRT3, scaled_w, tail_series
from .radial_state import (COMPLETED, FOUR_PI, State, integrate_from, interp_cubic,
                           radial_derivative, suffix_integrals)

VERDICTS = ("channel_forward", "channel_backward", "both", "none_detected")


@dataclass(frozen=True)
class ChannelReport:
    R: float
    horizon: float
    forward_min: float
    backward_min: float
    eta: float
    verdict: str
    threshold: float
    flagged: bool = False   # a truncated evolution blew up or went unstable

    def to_dict(self) -> dict:
        return dict(R=self.R, horizon=self.horizon, forward_min=self.forward_min,
                    backward_min=self.backward_min, eta=self.eta, verdict=self.verdict,
                    threshold=self.threshold, flagged=self.flagged)


def _verdict(fwd: float, bwd: float, threshold: float) -> str:
    f, b = fwd > threshold, bwd > threshold
    if f and b:
        return "both"
    if f:
        return "channel_forward"
    if b:
        return "channel_backward"
    return "none_detected"


def channel_scan(s: State, R: float, horizon: float, cfl: float = 0.9,
                 threshold: float | None = None, stride: int = 4) -> ChannelReport:
    """Evolve Psi_R(s) both ways and take the minimum exterior energy at R + |t|.

    ``threshold`` defaults to 1e-8 (1 + ||s||^2); a channel is reported in a
    direction whose minimum exceeds it.
    """
    from .nlw import EvolveConfig, evolve

    g = s.grid
    if not 0 < R < g.r_max:
        raise InvalidArgument(f"R = {R} outside (0, {g.r_max})")
    if horizon < 0 or R + horizon > g.r_max - 2 * g.dr:
        raise InvalidArgument("grid does not accommodate R + horizon")
    if threshold is None:
        threshold = 1e-8 * (1.0 + norms(s).norm_sq)
    data = psi_truncate(s, R)
    mins, flagged = [], False
    for start in (data, data.with_velocity_negated()):
        traj = evolve(start, EvolveConfig(horizon, cfl, snapshot_stride=stride,
                                          check_support=False))
        flagged |= traj.termination != COMPLETED
        vals = [exterior_energy(st, min(R + (st.t - start.t), g.r_max)) for st in traj.states]
        mins.append(float(min(vals)))
    fwd, bwd = mins
    return ChannelReport(R, horizon, fwd, bwd, max(fwd, bwd), _verdict(fwd, bwd, threshold),
                         threshold, flagged)


def _exterior_mass_profile(s: State) -> np.ndarray:
    g = s.grid
    return exterior_energy_profile(s) + suffix_integrals(FOUR_PI * g.r ** 2 * s.u ** 2, g)


def default_support_eps(s: State) -> float:
    return 1e-10 * norms(s).norm_sq


def support_radius(s: State, eps_supp: float | None = None) -> float:
    """Largest R whose exterior energy plus exterior u^2 mass exceeds eps_supp.

    Returns 0 for data below the threshold everywhere and +inf when the data
    still exceeds it at the last interior node.
    """
    if eps_supp is None:
        eps_supp = default_support_eps(s)
        if eps_supp == 0.0:
            return 0.0
    if not eps_supp > 0:
        raise InvalidArgument("eps_supp must be positive")
    q = _exterior_mass_profile(s)
    g = s.grid
    above = np.nonzero(q > eps_supp)[0]
    if above.size == 0:
        return 0.0
    i = int(above[-1])
    if i >= g.size - 2:
        return math.inf
    # crossing inside [r_i, r_{i+1}]: interpolate log q when both are positive
    q0, q1 = q[i], q[i + 1]
    if q1 > 0:
        frac = math.log(q0 / eps_supp) / math.log(q0 / q1)
    else:
        frac = (q0 - eps_supp) / (q0 - q1)
    return float(g.r[i] + min(max(frac, 0.0), 1.0) * g.dr)


@dataclass(frozen=True)
class PropagationSeries:
    t: np.ndarray
    rho: np.ndarray
    direction: int
    termination: str


def support_propagation_check(h0: State, iota: int, t_end: float, cfl: float = 0.9,
                              eps_supp: float | None = None, stride: int = 8,
                              directions=(1, -1)) -> list[PropagationSeries]:
    """Support radius of u(t) - iota W along the evolution of iota W + h0.

    One series per time direction; ``t`` holds |t|.
    """
    from .ground_state import SolitonParams, soliton_state
    from .nlw import EvolveConfig, evolve

    if iota not in (-1, 1):
        raise InvalidArgument("iota must be +1 or -1")
    if not np.any(h0.u) and not np.any(h0.ut):
        raise InvalidArgument("h0 must not vanish identically")
    rho0 = support_radius(h0, eps_supp)
    if math.isinf(rho0):
        raise InvalidArgument("h0 is not compactly supported on the grid")
    g = h0.grid
    if rho0 + t_end + 2 * g.dr > g.r_max:
        raise InvalidArgument("grid does not accommodate support + t_end")
    W = soliton_state(SolitonParams(1.0, iota), g)
    eps = default_support_eps(h0) if eps_supp is None else eps_supp
    out = []
    for d in directions:
        start = (W + h0).at_time(h0.t)
        if d < 0:
            start = start.with_velocity_negated()
        traj = evolve(start, EvolveConfig(t_end, cfl, snapshot_stride=stride,
                                          check_support=False))
        ts, rhos = [], []
        for st in traj.states:
            ts.append(st.t - start.t)
            rhos.append(support_radius(st - W.at_time(st.t), eps))
        out.append(PropagationSeries(np.array(ts), np.array(rhos), d, traj.termination))
    return out


@dataclass(frozen=True)
class TailLimit:
    ell: float
    c2_fit: float
    converged: bool
    spread: float


def tail_limit(s: State, rtol: float = 1e-3, atol: float = 1e-9) -> TailLimit:
    """Limit of v_0 = r u_0 at infinity by two Richardson passes on r, 2r, 4r = r_max."""
    g = s.grid
    if g.r_max < 50:
        raise InvalidArgument("tail_limit needs r_max >= 50")
    v = g.r * s.u
    r1 = g.r_max / 4.0
    a, b, c = (interp_cubic(v, g, x) for x in (r1, 2 * r1, 4 * r1))
    l1 = (4.0 * b - a) / 3.0
    l2 = (4.0 * c - b) / 3.0
    ell = (16.0 * l2 - l1) / 15.0
    spread = abs(l2 - l1)
    converged = spread <= atol + rtol * abs(ell)
    far = g.r >= r1
    c2 = float(np.max(g.r[far] ** 2 * np.abs(v[far] - ell)))
    return TailLimit(float(ell), c2, bool(converged), float(spread))


def stationary_tail_test(s: State, r0_list, soliton_tail: bool = False) -> np.ndarray:
    """(int_{r0} (d_r v_0)^2 + v_1^2 dr) r0^5 / |v_0(r0)|^10 at each r0.

    With ``soliton_tail`` the integral past r_max is completed by the
    soliton fitted to the tail limit.
    """
    g = s.grid
    r0_list = np.asarray(r0_list, dtype=float)
    if np.any(r0_list <= 0) or np.any(r0_list >= g.r_max):
        raise InvalidArgument("r0 values must lie inside (0, r_max)")
    v0 = g.r * s.u
    v1 = g.r * s.ut
    dens = radial_derivative(v0, g.dr, parity=-1) ** 2 + v1 ** 2
    extra = 0.0
    if soliton_tail:
        tl = tail_limit(s)
        lam = tl.ell ** 2 / 3.0
        if lam > 0 and g.r_max / lam > 2.0:
            extra = tail_series(0.0, 6.0, g.r_max / lam)
    out = []
    for r0 in r0_list:
        num = integrate_from(dens, g, r0) + extra
        val = abs(interp_cubic(v0, g, r0))
        if val == 0.0:
            out.append(0.0 if num <= 0 else math.inf)
        else:
            out.append(num * r0 ** 5 / val ** 10)
    return np.array(out)


@dataclass(frozen=True)
class TerminalObject:
    kind: str                # "compact" | "soliton" | "generic"
    lam: float | None = None
    iota: int | None = None
    ell: float | None = None

    def to_dict(self) -> dict:
        return dict(kind=self.kind, lam=self.lam, iota=self.iota, ell=self.ell)


def infer_terminal_object(s: State, ell_tol: float = 1e-6, fit_tol: float = 1e-2,
                          eps_supp: float | None = None) -> TerminalObject:
    """Compact, soliton(lambda, iota) with lambda = l^2/3, or generic."""
    g = s.grid
    tl = tail_limit(s)
    scale = max(1.0, float(np.max(np.abs(g.r * s.u))))
    if tl.converged and abs(tl.ell) <= ell_tol * scale:
        if math.isfinite(support_radius(s, eps_supp)):
            return TerminalObject("compact", ell=tl.ell)
        return TerminalObject("generic", ell=tl.ell)
    if not tl.converged or tl.ell == 0.0:
        return TerminalObject("generic", ell=tl.ell)
    iota = 1 if tl.ell > 0 else -1
    lam = tl.ell ** 2 / 3.0
    far = g.r >= g.r_max / 2.0
    model = scaled_w(g.r[far], lam, iota)
    resid = np.max(np.abs(s.u[far] - model)) / np.max(np.abs(model))
    vel = np.max(np.abs(s.ut[far])) / np.max(np.abs(model))
    if resid <= fit_tol and vel <= fit_tol:
        return TerminalObject("soliton", lam=float(lam), iota=iota, ell=tl.ell)
    return TerminalObject("generic", ell=tl.ell)


#: sqrt(3): the tail limit of W itself
W_TAIL_LIMIT = SQRT3

__all__ = ["ChannelReport", "PropagationSeries", "TailLimit", "TerminalObject", "VERDICTS",
           "W_TAIL_LIMIT", "channel_scan", "default_support_eps", "infer_terminal_object",
           "stationary_tail_test", "support_propagation_check", "support_radius", "tail_limit"]
