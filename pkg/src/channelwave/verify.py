"""Verification suites: identity and inequality batteries with measured values.

Each suite returns a list of ``Check`` rows.  The defaults reproduce the
acceptance settings; the CLI ``verify`` command prints the rows as a table.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .channel_analysis import infer_terminal_object, support_propagation_check, support_radius, tail_limit
from .dalembert import asymptotic_channels, to_characteristic, exterior_energy_exact, measured_exterior
from .energetics import energy_norm, flux_seminorm, ipp1_sides
from .ground_state import (GRAD_W_SQ_EXACT, WV_EXPONENTS, SolitonParams, pohozaev_report,
                           soliton_state, tail_exponent)
from .nlw import linearized_closeness, sweep_R0
from .radial_state import BumpPreset, make_grid, sample_preset
from .synthetic import random_bump_state, random_profile


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    relation: str = "<="

    def to_dict(self) -> dict:
        return dict(name=self.name, value=self.value, tol=self.tol, relation=self.relation,
                    passed=self.passed)


def _le(name, value, tol) -> Check:
    return Check(name, float(value), float(tol), bool(value <= tol))


def _ge(name, value, tol) -> Check:
    return Check(name, float(value), float(tol), bool(value >= tol), ">=")


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def suite_pohozaev(dr: float = 1 / 512, r_max: float = 200.0) -> list[Check]:
    rep = pohozaev_report(make_grid(r_max, int(round(r_max / dr))))
    return [
        _le("|gradW^2 - W6| / gradW^2", abs(rep.gradW_sq - rep.W6) / rep.gradW_sq, 1e-5),
        _le("|E_W - gradW^2/3| / gradW^2", abs(rep.E_W - rep.gradW_sq / 3) / rep.gradW_sq, 1e-5),
        _le("|gradW^2 - 3sqrt3 pi^2/4| rel", _rel(rep.gradW_sq, GRAD_W_SQ_EXACT), 1e-5),
    ]


def suite_a40(n_profiles: int = 50, seed: int = 0, dr: float = 1 / 256,
              r_max: float = 20.0, times=(0.0, 1.0, 5.0)) -> list[Check]:
    rng = np.random.default_rng(seed)
    g = make_grid(r_max, int(round(r_max / dr)))
    worst = 0.0
    for _ in range(n_profiles):
        p = random_profile(g, rng)
        for t in times:
            rho0 = rng.uniform(0.0, 3.0)
            exact = exterior_energy_exact(p, rho0, t)
            meas = measured_exterior(p, rho0, t, g)
            if exact > 0:
                worst = max(worst, _rel(meas, exact))
    return [_le("max rel. error exterior identity", worst, 1e-6)]


def suite_lin_channel(n_profiles: int = 100, seed: int = 1, dr: float = 1 / 256,
                      r_max: float = 20.0, radii=(0.0, 1.0, 5.0)) -> list[Check]:
    rng = np.random.default_rng(seed)
    g = make_grid(r_max, int(round(r_max / dr)))
    margin, split = math.inf, 0.0
    for _ in range(n_profiles):
        s = random_bump_state(g, rng, centers=(2.0, 9.0))
        p = to_characteristic(s)
        for R in radii:
            fw, bw = asymptotic_channels(p, R)
            flux = flux_seminorm(s, R)
            margin = min(margin, max(fw, bw) - 0.5 * flux)
            if flux > 0:
                split = max(split, _rel(fw + bw, flux))
    return [_ge("min max(fw,bw) - flux/2", margin, -1e-12),
            _le("max rel. |fw + bw - flux|", split, 1e-9)]


def suite_ipp1(n_states: int = 30, seed: int = 2, dr: float = 1 / 256, r_max: float = 20.0,
               radii=(1.0, 2.0, 5.0)) -> list[Check]:
    rng = np.random.default_rng(seed)
    g = make_grid(r_max, int(round(r_max / dr)))
    worst = 0.0
    states = [soliton_state(SolitonParams(1.0, 1), g)]
    states += [random_bump_state(g, rng, centers=(1.0, 9.0)) for _ in range(n_states)]
    for s in states:
        for R in radii:
            lhs, rhs = ipp1_sides(s, R)
            if abs(lhs) > 1e-14:
                worst = max(worst, _rel(rhs, lhs))
    return [_le("max rel. error integration by parts", worst, 1e-6)]


def suite_propagation(dr: float = 1 / 256, r_max: float = 20.0, t_end: float = 5.0,
                      amplitude: float = 1e-3, cfl: float = 1.0) -> list[Check]:
    g = make_grid(r_max, int(round(r_max / dr)))
    h0 = sample_preset(BumpPreset(3.0, 0.5, amplitude), g)
    rho0 = support_radius(h0)
    series = support_propagation_check(h0, 1, t_end, cfl=cfl, stride=16)
    devs, over = [], -math.inf
    for s in series:
        d = s.rho - (rho0 + s.t)
        devs.append(float(np.max(np.abs(d))))
        over = max(over, float(np.max(d)))
    return [_le("|rho(0) - 3.5| / dr", abs(rho0 - 3.5) / g.dr, 1.0),
            _le("best direction max |rho - rho0 - t| / dr", min(devs) / g.dr, 2.0),
            _le("max (rho - rho0 - t) / dr, both directions", over / g.dr, 2.0)]


def suite_linearized(dr: float = 1 / 256, r_max: float = 20.0, t_end: float = 10.0,
                     R0_list=(0.5, 1.0, 2.0, 5.0, 10.0), size: float = 1e-3) -> list[Check]:
    g = make_grid(r_max, int(round(r_max / dr)))
    base = sample_preset(BumpPreset(3.0, 0.5, 1.0), g)
    n1 = energy_norm(base)
    R0, ratios = sweep_R0(base.scaled(size / n1), R0_list, t_end)
    out = [Check("smallest R0 with ratio <= 0.1", math.nan if R0 is None else R0, 0.1,
                 R0 is not None, "found")]
    if R0 is None:
        return out
    r_big = ratios[R0]
    r_small = linearized_closeness(base.scaled(0.1 * size / n1), R0, t_end)
    out.append(_le(f"sup ratio at R0={R0:g}, |h0|={size:g}", r_big, 0.1))
    out.append(Check("ratio(|h0|/10) - ratio(|h0|)", r_small - r_big, 0.0,
                     bool(r_small < r_big), "<"))
    return out


def suite_tails(R_list=(10.0, 20.0, 40.0, 80.0)) -> list[Check]:
    out = []
    for k, p, q in WV_EXPONENTS:
        slope = tail_exponent(k, p, R_list, "value")
        out.append(_le(f"value k={k} p={p:g}: slope vs -(kp-3)",
                       _rel(slope, -(k * p - 3)), 0.05))
        slope = tail_exponent(k, q, R_list, "gradient")
        out.append(_le(f"gradient k={k} q={q:g}: slope vs -((k+1)q-3)",
                       _rel(slope, -((k + 1) * q - 3)), 0.05))
    g = make_grid(400.0, 400 * 64)
    for lam, iota in ((1.0, 1), (2.0, -1), (0.5, 1)):
        s = soliton_state(SolitonParams(lam, iota), g)
        tl = tail_limit(s)
        out.append(_le(f"tail limit lam={lam:g} iota={iota:+d}",
                       _rel(tl.ell, iota * math.sqrt(3.0 * lam)), 1e-3))
        obj = infer_terminal_object(s)
        ok = obj.kind == "soliton" and obj.iota == iota
        err = _rel(obj.lam, lam) if ok else math.inf
        out.append(_le(f"inferred lam={lam:g} iota={iota:+d}", err, 0.02))
    return out


SUITES = {
    "pohozaev": suite_pohozaev,
    "a40": suite_a40,
    "lin-channel": suite_lin_channel,
    "ipp1": suite_ipp1,
    "propagation": suite_propagation,
    "linearized": suite_linearized,
    "tails": suite_tails,
}


def run_suite(name: str) -> tuple[list[Check], float]:
    t = time.perf_counter()
    checks = SUITES[name]()
    return checks, time.perf_counter() - t


def format_checks(checks) -> str:
    lines = []
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        lines.append(f"{mark}  {c.name:<50s} {c.value:>13.6g} {c.relation} {c.tol:.3g}")
    return "\n".join(lines)


__all__ = ["Check", "SUITES", "format_checks", "run_suite", "suite_a40", "suite_ipp1",
           "suite_lin_channel", "suite_linearized", "suite_pohozaev", "suite_propagation",
           "suite_tails"]
