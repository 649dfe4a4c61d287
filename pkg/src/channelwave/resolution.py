"""Soliton resolution diagnostics: radiation, bubble counts, scales, signs, verdicts.

A decomposition writes u(t) = v_L(t) + sum_j iota_j lambda_j^{-1/2} W(x/lambda_j) + small,
with lambda_1 < ... < lambda_J.  Counting uses the gradient energy of u - v_L in
units of ||grad W||^2; scales start from the first radii at which the interior
gradient energy reaches

    B_j = (j - 1) ||grad W||^2 + int_{|x| <= 1} |grad W|^2,

and are then refined by least squares in log(lambda).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .dalembert import CharacteristicProfile, from_characteristic, to_characteristic
from .energetics import energy_norm, h1_inner, norms, psi_truncate
from .errors import (AmbiguousCount, InsufficientEnergy, InvalidArgument, NotApplicable,
                     SignUndetermined)
from .ground_state import (SolitonParams, gradient_energy_within, grad_w_sq, scaled_w,
                           w_derivative, w_value)
from .radial_state import (BLOWUP, COMPLETED, FOUR_PI, Field, State, Trajectory, _same_grid,
                           integrate_from, piecewise_derivative, radial_derivative,
                           suffix_integrals, zero_state)

RESIDUE_GATE = 0.25
PAIRING_FLOOR = 1e-8


def _grad_sq_density(s: State) -> np.ndarray:
    ur = piecewise_derivative(s.u, s.grid, s.breaks)
    return FOUR_PI * s.grid.r ** 2 * ur * ur


def gradient_norm_sq(s: State) -> float:
    return integrate_from(_grad_sq_density(s), s.grid)


# ---------------------------------------------------------------------------
# radiation

def extract_radiation(traj: Trajectory, A: float) -> CharacteristicProfile:
    """Free wave that matches u(T) outside |x| = T - A, anchored at the final time T."""
    if traj.termination == BLOWUP:
        raise NotApplicable("radiation extraction needs a global trajectory")
    final = traj.final
    T = final.t
    if not T - A > 0:
        raise InvalidArgument(f"need T - A > 0, got T = {T}, A = {A}")
    if T - A >= final.grid.r_max:
        raise InvalidArgument("truncation radius T - A lies beyond the grid")
    return to_characteristic(psi_truncate(final, T - A))


def radiation_discrepancy(traj: Trajectory, radiation: CharacteristicProfile, A: float,
                          t_min: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(t, int_{|x| >= t - A} |grad(u - v_L)|^2) over the snapshots with t >= t_min."""
    g = traj.grid
    ts, vals = [], []
    for st in traj.states:
        if t_min is not None and st.t < t_min:
            continue
        diff = st - from_characteristic(radiation, st.t, g)
        R = min(max(st.t - A, 0.0), g.r_max)
        ts.append(st.t)
        vals.append(integrate_from(_grad_sq_density(diff), g, R))
    return np.array(ts), np.array(vals)


# ---------------------------------------------------------------------------
# counting and scales

@dataclass(frozen=True)
class BubbleCount:
    J: int
    ratio: float
    residue: float


def count_bubbles(s: State, radiation_state: State, gate: float = RESIDUE_GATE) -> BubbleCount:
    """Nearest-integer count of ||grad(u - v_L)||^2 / ||grad W||^2 with a residue gate."""
    _same_grid(s, radiation_state)
    ratio = gradient_norm_sq(s - radiation_state) / grad_w_sq()
    J = int(round(ratio))
    residue = abs(ratio - J)
    if residue > gate:
        raise AmbiguousCount(ratio, residue)
    return BubbleCount(J, ratio, residue)


def bubble_count(traj: Trajectory, radiation: CharacteristicProfile,
                 gate: float = RESIDUE_GATE) -> BubbleCount:
    final = traj.final
    return count_bubbles(final, from_characteristic(radiation, final.t, final.grid), gate)


def b_threshold(j: int) -> float:
    return (j - 1) * grad_w_sq() + gradient_energy_within(1.0)


def lambda_thresholds(s: State, radiation_state: State, J: int) -> list[float]:
    """First radii where the interior gradient energy of u - v_L reaches B_1..B_J."""
    _same_grid(s, radiation_state)
    if J < 0:
        raise InvalidArgument("J must be >= 0")
    if J == 0:
        return []
    g = s.grid
    dens = _grad_sq_density(s - radiation_state)
    suffix = suffix_integrals(dens, g)
    inner = suffix[0] - suffix
    total = inner[-1]
    if total < b_threshold(J):
        raise InsufficientEnergy(
            f"interior gradient energy {total:.6g} never reaches B_{J} = {b_threshold(J):.6g}")
    out = []
    for j in range(1, J + 1):
        B = b_threshold(j)
        k = int(np.argmax(inner >= B))
        if k == 0:
            out.append(0.0)
            continue
        lo, hi = g.r[k - 1], g.r[k]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if integrate_from(dens, g, 0.0, mid) >= B:
                hi = mid
            else:
                lo = mid
        out.append(hi)
    return out


# ---------------------------------------------------------------------------
# signs, fitting and the decomposition

def _bubble_sum(grid, lams, signs) -> np.ndarray:
    r = grid.r
    out = np.zeros(grid.size)
    for lam, iota in zip(lams, signs):
        out += scaled_w(r, lam, iota)
    return out


def _scaling_generator(grid, lam, iota) -> np.ndarray:
    """d/d(log lambda) of iota lambda^{-1/2} W(r/lambda)."""
    x = grid.r / lam
    return -iota * lam ** -0.5 * (0.5 * w_value(x) + x * w_derivative(x))


def bubble_sign(f: np.ndarray, grid, lam: float) -> int:
    """Sign of the Dirichlet pairing of f with W_lambda on the annulus [lambda/2, 2 lambda]."""
    Wl = scaled_w(grid.r, lam, 1)
    hi = min(2.0 * lam, grid.r_max)
    pairing = h1_inner(f, Wl, grid, 0.5 * lam, hi)
    if abs(pairing) < PAIRING_FLOOR:
        raise SignUndetermined(f"pairing {pairing:.3e} at scale {lam:.4g}")
    return 1 if pairing > 0 else -1


def refine_scales(f: State, lams, signs, log_bounds=None,
                  max_iter: int = 60, tol: float = 1e-12) -> tuple[list[float], float]:
    """Gauss-Newton (Levenberg damped) fit of log(lambda_j) to the H^1 distance.

    Returns the refined scales and the squared H^1 misfit.
    """
    g = f.grid
    logl = np.log(np.asarray(lams, dtype=float))
    if log_bounds is None:
        log_bounds = (math.log(2.0 * g.dr), math.log(g.r_max))
    lo, hi = log_bounds

    def misfit(ll):
        res = f.u - _bubble_sum(g, np.exp(ll), signs)
        return h1_inner(res, res, g)

    cur = misfit(logl)
    mu = 1e-6
    for _ in range(max_iter):
        lam = np.exp(logl)
        res = f.u - _bubble_sum(g, lam, signs)
        jac = [_scaling_generator(g, l, s) for l, s in zip(lam, signs)]
        G = np.array([[h1_inner(a, b, g) for b in jac] for a in jac])
        rhs = np.array([h1_inner(a, res, g) for a in jac])
        improved = False
        for _ in range(30):
            A = G + mu * np.diag(np.diag(G))
            step = np.linalg.solve(A, rhs)
            trial = np.clip(logl + step, lo, hi)
            val = misfit(trial)
            if val <= cur:
                improved = True
                done = np.max(np.abs(trial - logl)) < 1e-10 or cur - val <= tol * max(cur, 1e-300)
                logl, cur = trial, val
                mu = max(mu / 10.0, 1e-12)
                break
            mu *= 10.0
        if not improved or done:
            break
    return list(np.exp(logl)), float(cur)


@dataclass(frozen=True)
class DecompositionReport:
    J: int
    bubbles: tuple
    radiation: object          # CharacteristicProfile or regular-part State
    residual_norm: float
    separation_ratios: tuple
    residue: float
    threshold_scales: tuple
    total_norm: float

    def __post_init__(self):
        lams = [b.lam for b in self.bubbles]
        if any(a > b for a, b in zip(lams, lams[1:])):
            raise InvalidArgument("bubble scales must be sorted ascending")
        if self.residual_norm < 0:
            raise InvalidArgument("residual norm must be >= 0")

    @property
    def relative_residual(self) -> float:
        return self.residual_norm / self.total_norm if self.total_norm > 0 else 0.0

    def to_dict(self) -> dict:
        return dict(J=self.J, bubbles=[dict(lam=b.lam, iota=b.iota) for b in self.bubbles],
                    residual_norm=self.residual_norm,
                    relative_residual=self.relative_residual,
                    separation_ratios=list(self.separation_ratios), residue=self.residue,
                    threshold_scales=list(self.threshold_scales), total_norm=self.total_norm)


def fit_decomposition(s: State, radiation_state: State, radiation=None,
                      refine: bool = True, gate: float = RESIDUE_GATE) -> DecompositionReport:
    """Count, place, sign and refine the bubbles of s - radiation_state."""
    count = count_bubbles(s, radiation_state, gate)
    J = count.J
    f = s - radiation_state
    g = s.grid
    seeds = lambda_thresholds(s, radiation_state, J)
    signs = [bubble_sign(f.u, g, lam) for lam in seeds]
    lams = list(seeds)
    if J and refine:
        lams, _ = refine_scales(f, seeds, signs)
        order = np.argsort(lams)
        lams = [lams[i] for i in order]
        signs = [signs[i] for i in order]
    bubbles = tuple(SolitonParams(float(l), int(i)) for l, i in zip(lams, signs))
    resid = State(g, f.u - _bubble_sum(g, lams, signs), f.ut, s.t)
    ratios = tuple(float(a / b) for a, b in zip(lams, lams[1:]))
    return DecompositionReport(J, bubbles, radiation if radiation is not None else radiation_state,
                               energy_norm(resid), ratios, count.residue, tuple(seeds),
                               energy_norm(s))


# ---------------------------------------------------------------------------
# distance to the soliton sets

@dataclass(frozen=True)
class DistanceResult:
    distance: float
    scales: tuple
    converged: bool


def soliton_set_distance(f: Field, signs, seeds=None, lam_bounds=None,
                         sweeps: int = 40, tol: float = 1e-9) -> DistanceResult:
    """min over lambda of ||f - sum iota_j W_{lambda_j}||_{H^1} + sum lambda_j / lambda_{j+1}.

    Coordinate descent in log(lambda) with bounded scalar line searches,
    started from the threshold scales (when f carries enough energy) and their
    dyadic perturbations.  Scales are kept sorted in the penalty.
    """
    signs = [int(s) for s in signs]
    if not signs:
        raise InvalidArgument("signs must be nonempty")
    g = f.grid
    J = len(signs)
    lo, hi = lam_bounds if lam_bounds is not None else (8.0 * g.dr, g.r_max / 400.0)
    if not 0 < lo < hi:
        raise InvalidArgument("invalid scale bounds")
    st = State(g, f.values, g.zeros())
    if seeds is None:
        try:
            seeds = lambda_thresholds(st, zero_state(g), J)
        except InsufficientEnergy:
            seeds = list(np.geomspace(lo, hi, J + 2)[1:-1])
    base = np.log(np.clip(np.asarray(seeds, dtype=float), lo, hi))
    log_lo, log_hi = math.log(lo), math.log(hi)

    def objective(ll):
        lam = np.exp(ll)
        res = f.values - _bubble_sum(g, lam, signs)
        dist = math.sqrt(max(h1_inner(res, res, g), 0.0))
        srt = np.sort(lam)
        return dist + float(np.sum(srt[:-1] / srt[1:]))

    starts = [base]
    for j in range(J):
        for d in (1.0, -1.0):
            x = base.copy()
            x[j] += d * math.log(2.0)
            starts.append(np.clip(x, log_lo, log_hi))
    best = None
    for x0 in starts:
        x = x0.copy()
        val = objective(x)
        converged = False
        for _ in range(sweeps):
            old = val
            for j in range(J):
                a = max(log_lo, x[j] - 2.0)
                b = min(log_hi, x[j] + 2.0)

                def line(z, j=j):
                    y = x.copy()
                    y[j] = z
                    return objective(y)

                out = minimize_scalar(line, bounds=(a, b), method="bounded",
                                      options={"xatol": 1e-10})
                if out.fun < val:
                    x[j], val = out.x, out.fun
            if old - val <= tol * max(abs(old), 1.0):
                converged = True
                break
        cand = (val, tuple(np.sort(np.exp(x))), converged)
        if best is None or (cand[0], cand[1]) < (best[0], best[1]):
            best = cand
    return DistanceResult(float(best[0]), tuple(float(v) for v in best[1]), bool(best[2]))


# ---------------------------------------------------------------------------
# classification

KINDS = ("TypeI", "TypeII", "Global", "Undetermined")


@dataclass(frozen=True)
class Classification:
    kind: str
    t_plus: float | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dict(kind=self.kind, t_plus=self.t_plus, evidence=self.evidence)


def _fit_blowup_time(t, lam):
    """T and exponent of the law lambda ~ c (T - t)^alpha by least squares in logs."""
    t = np.asarray(t, float)
    y = np.log(lam)
    span = t[-1] - t[0]

    def resid(T):
        x = np.log(T - t)
        coef = np.polyfit(x, y, 1)
        return float(np.sum((np.polyval(coef, x) - y) ** 2))

    lo = t[-1] + 1e-9 * max(span, 1.0)
    out = minimize_scalar(lambda z: resid(t[-1] + math.exp(z)),
                          bounds=(math.log(1e-9 * max(span, 1.0)), math.log(2.0 * span)),
                          method="bounded", options={"xatol": 1e-12})
    T = t[-1] + math.exp(out.x)
    T = max(T, lo)
    alpha = float(np.polyfit(np.log(T - t), y, 1)[0])
    return T, alpha


def classify(traj: Trajectory, residual_threshold: float = 1e-2, A: float | None = None,
             tail_fraction: float = 1.0 / 3.0,
             radiation: CharacteristicProfile | None = None) -> Classification:
    """TypeI, TypeII, Global or Undetermined from the traces of a trajectory.

    ``radiation`` replaces the extracted free wave in the global test.
    """
    size = np.sqrt(np.maximum(traj.series("h1_sq") + traj.series("l2_sq"), 0.0))
    amp = traj.series("max_abs_u")
    med = float(np.median(size))
    ev = {"norm_first": float(size[0]), "norm_last": float(size[-1]), "norm_median": med,
          "amp_first": float(amp[0]), "amp_last": float(amp[-1]),
          "termination": traj.termination}
    bounded = bool(np.max(size) <= 3.0 * med) if med > 0 else True

    if traj.termination == BLOWUP:
        tail = size[-max(3, int(len(size) * tail_fraction)):]
        if size[-1] > 3.0 * med and np.all(np.diff(tail) >= 0):
            return Classification("TypeI", traj.blowup_time, ev)
        if bounded and amp[-1] >= 4.0 * amp[0]:
            ts, lams = [], []
            for st in traj.states:
                try:
                    lams.append(lambda_thresholds(st, zero_state(st.grid), 1)[0])
                    ts.append(st.t)
                except InsufficientEnergy:
                    continue
            if len(ts) >= 5:
                k = max(5, int(len(ts) * tail_fraction))
                T, alpha = _fit_blowup_time(ts[-k:], lams[-k:])
                ratio = np.asarray(lams) / (T - np.asarray(ts))
                ev.update(t_plus_est=T, alpha=alpha, ratio_last=float(ratio[-1]),
                          lambda_last=float(lams[-1]))
                late = ratio[-k:]
                if ratio[-1] < 0.1 and late[-1] <= late[0]:
                    return Classification("TypeII", T, ev)
        return Classification("Undetermined", traj.blowup_time, ev)

    if traj.termination != COMPLETED:
        return Classification("Undetermined", None, ev)
    if not bounded:
        return Classification("Undetermined", None, ev)
    T = traj.final.t
    A = 0.5 * T if A is None else A
    if not T - A > 0:
        return Classification("Undetermined", None, ev)
    rad = extract_radiation(traj, A) if radiation is None else radiation
    worst, J = 0.0, None
    t_cut = traj.initial.t + 0.75 * (T - traj.initial.t)
    for st in traj.states:
        if st.t < t_cut:
            continue
        vl = from_characteristic(rad, st.t, st.grid)
        try:
            rep = fit_decomposition(st, vl, rad)
        except (AmbiguousCount, SignUndetermined, InsufficientEnergy):
            return Classification("Undetermined", None, ev)
        worst = max(worst, rep.relative_residual)
        J = rep.J
    ev.update(J=J, residual=worst)
    if worst <= residual_threshold:
        return Classification("Global", None, ev)
    return Classification("Undetermined", None, ev)


# ---------------------------------------------------------------------------
# virial quantities and boundedness

@dataclass(frozen=True)
class CutoffSpec:
    """Smooth radial cutoff: 1 on [0, inner], 0 on [outer, inf)."""

    inner: float = 2.0
    outer: float = 3.0
    gamma: float = 1.1

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise InvalidArgument("need 0 < inner < outer")
        if not self.gamma > 1:
            raise InvalidArgument("gamma must exceed 1")

    @staticmethod
    def _psi(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    @staticmethod
    def _dpsi(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos]) / x[pos] ** 2
        return out

    def phi(self, r):
        z = (np.asarray(r, dtype=float) - self.inner) / (self.outer - self.inner)
        a, b = self._psi(1.0 - z), self._psi(z)
        return a / (a + b)

    def dphi(self, r):
        w = self.outer - self.inner
        z = (np.asarray(r, dtype=float) - self.inner) / w
        a, b = self._psi(1.0 - z), self._psi(z)
        da, db = -self._dpsi(1.0 - z), self._dpsi(z)
        den = (a + b) ** 2
        out = np.zeros_like(z)
        ok = den > 0
        out[ok] = (da[ok] * b[ok] - a[ok] * db[ok])[...] / den[ok] / w
        return out


@dataclass(frozen=True)
class VirialSeries:
    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray            # analytic first derivative
    dy_fd: np.ndarray         # numerical derivative of y
    d2y_main: np.ndarray      # -12 E + 8 int u_t^2 + 4 int |grad u|^2
    d2y_fd: np.ndarray        # numerical derivative of dy
    remainder: np.ndarray     # d2y_fd - d2y_main
    exterior: np.ndarray      # energy density integrated over |x| >= inner t
    convexity_ok: np.ndarray


def virial_diagnostics(traj: Trajectory, cutoff: CutoffSpec = CutoffSpec(),
                       t_min: float | None = None) -> VirialSeries:
    states = [s for s in traj.states if t_min is None or s.t >= t_min]
    if len(states) < 3:
        raise InvalidArgument("need at least three snapshots")
    if any(s.t <= 0 for s in states):
        raise InvalidArgument("virial quantities need t > 0; raise t_min")
    g = traj.grid
    r = g.r
    w = FOUR_PI * r ** 2
    t = np.array([s.t for s in states])
    E0 = float(traj.series("energy")[0])
    y, dy, main, ext = [], [], [], []
    for s in states:
        ph = cutoff.phi(r / s.t)
        dph = cutoff.dphi(r / s.t)
        y.append(integrate_from(w * ph * s.u ** 2, g))
        dy.append(2.0 * integrate_from(w * s.u * s.ut * ph, g)
                  - integrate_from(w * s.u ** 2 * r * dph, g) / s.t ** 2)
        nr = norms(s)
        main.append(-12.0 * E0 + 8.0 * nr.l2_sq + 4.0 * nr.h1_sq)
        ur = radial_derivative(s.u, g.dr)
        R = min(cutoff.inner * s.t, g.r_max)
        ext.append(integrate_from(w * (ur * ur + s.ut ** 2 + s.u ** 6), g, R))
    y, dy, main, ext = map(np.asarray, (y, dy, main, ext))
    dy_fd = np.gradient(y, t)
    d2_fd = np.gradient(dy, t)
    conv = cutoff.gamma * dy ** 2 <= y * d2_fd
    return VirialSeries(t, y, dy, dy_fd, main, d2_fd, d2_fd - main, ext, conv)


@dataclass(frozen=True)
class BoundednessReport:
    liminf_norm_sq: float
    bound_3E: float
    bound_2E: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(liminf_norm_sq=self.liminf_norm_sq, bound_3E=self.bound_3E,
                    bound_2E=self.bound_2E, tol=self.tol, passed=self.passed)


def boundedness_check(traj: Trajectory, rel_tol: float = 0.05) -> BoundednessReport:
    """Late-time ||grad u||^2 + ||u_t||^2 against the window [2E, 3E]."""
    if traj.termination != COMPLETED:
        raise NotApplicable(f"trajectory ended with {traj.termination}")
    t = traj.series("t")
    nsq = traj.series("h1_sq") + traj.series("l2_sq")
    E = float(traj.series("energy")[0])
    late = t >= t[0] + 0.5 * (t[-1] - t[0])
    low = float(np.min(nsq[late]))
    tol = rel_tol * abs(E)
    ok = (2.0 * E - tol) <= low <= (3.0 * E + tol)
    return BoundednessReport(low, 3.0 * E, 2.0 * E, tol, bool(ok))


__all__ = ["BubbleCount", "Classification", "CutoffSpec", "DecompositionReport",
           "DistanceResult", "BoundednessReport", "KINDS", "VirialSeries", "b_threshold",
           "bubble_count", "bubble_sign", "boundedness_check", "classify", "count_bubbles",
           "extract_radiation", "fit_decomposition", "gradient_norm_sq", "lambda_thresholds",
           "radiation_discrepancy", "refine_scales", "soliton_set_distance",
           "virial_diagnostics"]
