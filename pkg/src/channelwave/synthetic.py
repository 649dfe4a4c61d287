"""Synthetic data: random bump states and profiles, planted bubbles, planted trajectories.

These are the fixtures behind the verification suites and the resolution
tests.  Everything takes an explicit ``numpy.random.Generator`` so that runs
are reproducible.
"""
from __future__ import annotations

import numpy as np

from .dalembert import CharacteristicProfile, to_characteristic
from .energetics import norms
from .errors import InvalidArgument
from .ground_state import scaled_w
from .radial_state import (BLOWUP, COMPLETED, BumpPreset, RadialGrid, State, SumPreset,
                           Trajectory, sample_preset)


def random_bump_state(grid: RadialGrid, rng: np.random.Generator, k: int = 3,
                      centers=(4.0, 9.0), widths=(0.5, 2.0), amp: float = 0.5,
                      power: int = 3) -> State:
    """Sum of k bumps with random centers, widths, slots and normal amplitudes."""
    parts = []
    for _ in range(k):
        c = rng.uniform(*centers)
        w = rng.uniform(*widths)
        a = amp * rng.normal()
        slot = str(rng.choice(["u", "ut"]))
        parts.append(BumpPreset(c, w, a, slot, power))
    reach = max(p.center + p.width for p in parts)
    if reach > grid.r_max:
        raise InvalidArgument(f"bump support reaches {reach}, past r_max")
    return sample_preset(SumPreset(tuple(parts)), grid)


def random_profile(grid: RadialGrid, rng: np.random.Generator, **kw) -> CharacteristicProfile:
    return to_characteristic(random_bump_state(grid, rng, **kw))


def planted_state(radiation: State, bubbles) -> State:
    """radiation + sum iota_j W_{lambda_j}; ``bubbles`` holds (lam, iota) pairs."""
    g = radiation.grid
    u = radiation.u.copy()
    for lam, iota in bubbles:
        u = u + scaled_w(g.r, float(lam), int(iota))
    return State(g, u, radiation.ut, radiation.t)


def random_bubbles(rng: np.random.Generator, J: int, lam_min=(1e-4, 2e-4),
                   ratio=(500.0, 1000.0)) -> list[tuple[float, int]]:
    """J scales growing by random factors in ``ratio``, with random signs."""
    out = []
    lam = rng.uniform(*lam_min)
    for j in range(J):
        if j:
            lam *= rng.uniform(*ratio)
        out.append((lam, int(rng.choice([-1, 1]))))
    return out


def trajectory_from_states(states, termination: str = COMPLETED,
                           blowup_time: float | None = None, meta=None) -> Trajectory:
    """Wrap snapshots as a trajectory with one diagnostic record per snapshot."""
    if not states:
        raise InvalidArgument("need at least one state")
    diag = {"t": [], "energy": [], "h1_sq": [], "l2_sq": [], "max_abs_u": []}
    for st in states:
        nr = norms(st)
        diag["t"].append(st.t)
        diag["energy"].append(nr.energy)
        diag["h1_sq"].append(nr.h1_sq)
        diag["l2_sq"].append(nr.l2_sq)
        diag["max_abs_u"].append(float(np.max(np.abs(st.u))))
    times = np.array(diag["t"])
    dt = float(np.min(np.diff(times))) if len(times) > 1 else 0.0
    d = {k: np.asarray(v, dtype=float) for k, v in diag.items()}
    return Trajectory(states[0].grid, dt, 1, list(states), d, termination, blowup_time,
                      dict(meta or {}, synthetic=True))


def type_ii_trajectory(grid: RadialGrid, n: int = 24, alpha: float = 1.5, T: float = 1.0,
                       gap=(0.5, 0.004), regular: State | None = None) -> Trajectory:
    """W_{lambda(t)} + regular part with lambda(t) = (T - t)^alpha on geometric times.

    The residual gaps T - t run geometrically from ``gap[0]`` down to ``gap[1]``.
    """
    if regular is None:
        regular = sample_preset(BumpPreset(2.0, 1.0, 0.05), grid)
    gaps = np.geomspace(gap[0], gap[1], n)
    if gaps[-1] ** alpha < 8 * grid.dr:
        raise InvalidArgument("the smallest bubble is not resolved by the grid")
    states = [planted_state(regular, [(g ** alpha, 1)]).at_time(T - g)
              for g in gaps]
    return trajectory_from_states(states, BLOWUP, float(T - gaps[-1]),
                                  {"planted": "type_ii", "alpha": alpha, "T": T})


def type_i_trajectory(grid: RadialGrid, n: int = 12, base: State | None = None,
                      dt: float = 0.05) -> Trajectory:
    """Norm trace doubling every step: 2^k times a fixed bump."""
    if base is None:
        base = sample_preset(BumpPreset(2.0, 1.0, 0.2), grid)
    states = [State(grid, 2.0 ** k * base.u, 2.0 ** k * base.ut, k * dt) for k in range(n)]
    return trajectory_from_states(states, BLOWUP, (n - 1) * dt, {"planted": "type_i"})


__all__ = ["planted_state", "random_bubbles", "random_bump_state", "random_profile",
           "trajectory_from_states", "type_i_trajectory", "type_ii_trajectory"]
