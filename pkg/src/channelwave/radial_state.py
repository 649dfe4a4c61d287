"""Radial grids, fields, states, trajectories and preset initial data.

Every field lives on a uniform mesh ``r_i = i * dr`` of ``[0, r_max]``.  Volume
integrals carry the full 3D measure ``4 pi r^2 dr`` so that reported norms are
integrals over R^3.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InvalidArgument, InvalidState

FOUR_PI = 4.0 * math.pi

COMPLETED = "completed"
BLOWUP = "blowup_detected"
INSTABILITY = "instability_detected"
TERMINATIONS = (COMPLETED, BLOWUP, INSTABILITY)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RadialGrid:
    r_max: float
    n: int

    @property
    def dr(self) -> float:
        return self.r_max / self.n

    @property
    def r(self) -> np.ndarray:
        # computed as i*dr, last node pinned so r_n == r_max exactly
        nodes = np.arange(self.n + 1) * self.dr
        nodes[-1] = self.r_max
        return nodes

    @property
    def size(self) -> int:
        return self.n + 1

    def index_of(self, radius: float) -> int:
        """Index of the node closest to ``radius``."""
        return int(round(radius / self.dr))

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n + 1)


def make_grid(r_max: float, n: int) -> RadialGrid:
    if not (r_max > 0) or not math.isfinite(r_max):
        raise InvalidArgument(f"r_max must be positive, got {r_max}")
    if int(n) != n or n < 8:
        raise InvalidArgument(f"n must be an integer >= 8, got {n}")
    return RadialGrid(float(r_max), int(n))


@dataclass(frozen=True)
class Field:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.size,):
            raise InvalidState(f"field has {vals.shape} samples, grid has {self.grid.size} nodes")
        object.__setattr__(self, "values", vals)

    def __call__(self, radius):
        """Piecewise-linear interpolation; zero beyond r_max."""
        return np.interp(radius, self.grid.r, self.values, right=0.0)


@dataclass(frozen=True)
class State:
    """Cauchy data (u, u_t) at time t.

    ``breaks`` lists radii where u is only continuous and u_t may jump;
    derivatives and quadratures are then taken piecewise between them.
    """

    grid: RadialGrid
    u: np.ndarray
    ut: np.ndarray
    t: float = 0.0
    breaks: tuple = ()

    def __post_init__(self):
        u, ut = _frozen(self.u), _frozen(self.ut)
        if u.shape != (self.grid.size,) or ut.shape != (self.grid.size,):
            raise InvalidState("u and ut must have one sample per grid node")
        brk = tuple(sorted({float(b) for b in self.breaks}))
        if any(not (0.0 < b < self.grid.r_max) for b in brk):
            raise InvalidState(f"break radii must lie in (0, r_max), got {brk}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "ut", ut)
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "breaks", brk)

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.ut)))

    def __add__(self, other: "State") -> "State":
        _same_grid(self, other)
        return State(self.grid, self.u + other.u, self.ut + other.ut, self.t,
                     self.breaks + other.breaks)

    def __sub__(self, other: "State") -> "State":
        _same_grid(self, other)
        return State(self.grid, self.u - other.u, self.ut - other.ut, self.t,
                     self.breaks + other.breaks)

    def scaled(self, c: float) -> "State":
        return State(self.grid, c * self.u, c * self.ut, self.t, self.breaks)

    def at_time(self, t: float) -> "State":
        return State(self.grid, self.u, self.ut, t, self.breaks)

    def with_velocity_negated(self) -> "State":
        return State(self.grid, self.u, -self.ut, self.t, self.breaks)


def _same_grid(a: State, b: State) -> None:
    if a.grid != b.grid:
        raise InvalidState("states live on different grids")


def zero_state(grid: RadialGrid, t: float = 0.0) -> State:
    return State(grid, grid.zeros(), grid.zeros(), t)


@dataclass
class Trajectory:
    """Snapshots every ``snapshot_stride`` steps plus diagnostics every step.

    ``diagnostics`` maps a series name to an array with one entry per step
    (including t = t0).  Exterior energies are stored under ``"ext@<R>"``.
    """

    grid: RadialGrid
    dt: float
    snapshot_stride: int
    states: list
    diagnostics: dict
    termination: str = COMPLETED
    blowup_time: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise InvalidArgument(f"unknown termination {self.termination!r}")
        times = [s.t for s in self.states]
        if len(times) > 1:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise InvalidState("snapshot times must increase strictly")
        if self.diagnostics:
            lengths = {len(v) for v in self.diagnostics.values()}
            if len(lengths) != 1:
                raise InvalidState("diagnostic series have different lengths")

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def final(self) -> State:
        return self.states[-1]

    @property
    def initial(self) -> State:
        return self.states[0]

    def series(self, name: str) -> np.ndarray:
        return np.asarray(self.diagnostics[name])

    def subsampled(self, k: int) -> "Trajectory":
        """Keep every k-th snapshot and every k-th diagnostic record."""
        states = self.states[::k]
        if states[-1] is not self.states[-1]:
            states = states + [self.states[-1]]
        diags = {}
        for name, vals in self.diagnostics.items():
            vals = np.asarray(vals)
            keep = vals[::k]
            if (len(vals) - 1) % k:
                keep = np.append(keep, vals[-1])
            diags[name] = keep
        return Trajectory(self.grid, self.dt * k, self.snapshot_stride, states, diags,
                          self.termination, self.blowup_time, dict(self.meta))


# ---------------------------------------------------------------------------
# quadrature on the radial grid

def radial_derivative(values: np.ndarray, dr: float, parity: int | None = 1) -> np.ndarray:
    """Fourth-order centered differences.

    At r = 0 the stencil uses mirror ghosts, ``parity=+1`` for even fields
    (u, u_t) and ``-1`` for odd ones (v = r u); ``None`` switches to one-sided
    formulas there.  The outer end is always one-sided.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 5:
        raise InvalidArgument("need at least 5 samples")
    d = np.empty(n)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * dr)
    if parity is None:
        d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12.0 * dr)
        d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12.0 * dr)
    else:
        gm1, gm2 = parity * v[1], parity * v[2]
        d[0] = (gm2 - 8.0 * gm1 + 8.0 * v[1] - v[2]) / (12.0 * dr)
        d[1] = (gm1 - 8.0 * v[0] + 8.0 * v[2] - v[3]) / (12.0 * dr)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12.0 * dr)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12.0 * dr)
    return d


def axis_value(u1: float, u2: float, u3: float) -> float:
    """Value at r = 0 of an even function from its first three off-axis samples."""
    return 1.5 * u1 - 0.6 * u2 + 0.1 * u3


def integrate_from(g: np.ndarray, grid: RadialGrid, R: float = 0.0,
                   upper: float | None = None) -> float:
    """Fourth-order quadrature of nodal samples ``g`` over ``[R, upper]``.

    Whole cells use the trapezoid rule with the Euler-Maclaurin end
    correction; partial end cells integrate the local cubic interpolant.
    Stencils are mirror symmetric, so reflecting the samples reflects the rule.
    """
    upper = grid.r_max if upper is None else upper
    if R < -1e-12 or upper > grid.r_max * (1 + 1e-12) or R > upper + 1e-12:
        raise InvalidArgument(f"interval [{R}, {upper}] outside grid [0, {grid.r_max}]")
    g = np.asarray(g, dtype=float)
    if g.size < 5:
        raise InvalidArgument("quadrature needs at least 5 samples")
    dr = grid.dr
    i, hi = _locate(grid, R)
    j, hj = _locate(grid, upper)
    if i == j:
        return _cell_integral(g, i, hi, hj, dr)
    total = 0.0
    first = i
    if hi > 0:
        total += _cell_integral(g, i, hi, dr, dr)
        first = i + 1
    if j > first:
        seg = g[first:j + 1]
        total += dr * (seg.sum() - 0.5 * (seg[0] + seg[-1]))
        total -= dr * dr / 12.0 * (_end_derivative(g, j, dr, -1) - _end_derivative(g, first, dr, 1))
    if hj > 0:
        total += _cell_integral(g, j, 0.0, hj, dr)
    return float(total)


def suffix_integrals(g: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """``integrate_from(g, grid, r_i)`` for every node r_i at once."""
    g = np.asarray(g, dtype=float)
    dr = grid.dr
    cells = 0.5 * dr * (g[1:] + g[:-1])
    out = np.zeros(g.size)
    out[:-1] = np.cumsum(cells[::-1])[::-1]
    lower = np.array([_end_derivative(g, k, dr, 1) for k in range(g.size - 5, g.size)])
    fwd = np.empty(g.size)
    fwd[:-4] = (-25 * g[:-4] + 48 * g[1:-3] - 36 * g[2:-2] + 16 * g[3:-1] - 3 * g[4:]) / (12.0 * dr)
    fwd[-5:] = lower
    out -= dr * dr / 12.0 * (_end_derivative(g, g.size - 1, dr, -1) - fwd)
    out[-1] = 0.0
    return out


def _locate(grid: RadialGrid, x: float):
    """Cell index and offset of x within it: x = i*dr + h, 0 <= h < dr."""
    x = min(max(x, 0.0), grid.r_max)
    i = int(math.floor(x / grid.dr))
    h = x - i * grid.dr
    if h >= grid.dr * (1 - 1e-12) or h < 1e-12 * grid.dr:
        i, h = int(round(x / grid.dr)), 0.0
    if i >= grid.n:
        return grid.n, 0.0
    return i, h


# inverse Vandermonde matrix of the nodes 0, 1, 2, 3
_CUBIC = np.linalg.inv(np.vander(np.arange(4.0), 4, increasing=True))


def _cell_integral(g, i, a, b, dr) -> float:
    """Integral over [r_i + a, r_i + b] of the cubic through four nodes around cell i."""
    if b <= a:
        return 0.0
    k0 = min(max(i - 1, 0), g.size - 4)
    c = _CUBIC @ g[k0:k0 + 4]
    x0 = (i - k0) + a / dr
    x1 = (i - k0) + b / dr
    pw = np.arange(1, 5)
    return float(dr * np.sum(c * (x1 ** pw - x0 ** pw) / pw))


def interp_cubic(g: np.ndarray, grid: RadialGrid, x):
    """Value at x of the same local cubic interpolant the quadrature uses.

    Points outside [0, r_max] are clamped to the ends.
    """
    g = np.asarray(g, dtype=float)
    xs = np.clip(np.asarray(x, dtype=float), 0.0, grid.r_max) / grid.dr
    i = np.clip(np.floor(xs).astype(int), 0, g.size - 2)
    k0 = np.clip(i - 1, 0, g.size - 4)
    coeff = g[k0[..., None] + np.arange(4)] @ _CUBIC.T
    z = xs - k0
    out = ((coeff[..., 3] * z + coeff[..., 2]) * z + coeff[..., 1]) * z + coeff[..., 0]
    return float(out) if out.ndim == 0 else out


def _end_derivative(g, k, dr, direction) -> float:
    """Derivative at an integration end node from samples inside the interval.

    ``direction=+1`` looks right (lower end), ``-1`` looks left (upper end);
    both are the one-sided fourth-order stencils, mirror images of each other.
    Falls back to the nearest full stencil when the far side is too short.
    """
    if direction > 0 and k + 4 < g.size:
        w = g[k:k + 5]
        return float((-25 * w[0] + 48 * w[1] - 36 * w[2] + 16 * w[3] - 3 * w[4]) / (12.0 * dr))
    if direction < 0 and k >= 4:
        w = g[k - 4:k + 1]
        return float((25 * w[4] - 48 * w[3] + 36 * w[2] - 16 * w[1] + 3 * w[0]) / (12.0 * dr))
    lo = min(max(k - 2, 0), g.size - 5)
    return float(radial_derivative(g[lo:lo + 5], dr, parity=None)[k - lo])


# ---------------------------------------------------------------------------
# piecewise calculus between break radii

@dataclass(frozen=True)
class Piece:
    """Interval [a, b) and the nodes j0..j1 lying in it."""
    a: float
    b: float
    j0: int
    j1: int

    @property
    def nodes(self) -> slice:
        return slice(self.j0, self.j1 + 1)


def pieces(grid: RadialGrid, breaks=()) -> list[Piece]:
    """Split [0, r_max] at ``breaks``; a node on a break belongs to the piece on its right."""
    edges = [0.0, *sorted(breaks), grid.r_max]
    out = []
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        j0 = int(math.ceil(a / grid.dr - 1e-9))
        j1 = grid.n if k == len(edges) - 2 else int(math.ceil(b / grid.dr - 1e-9)) - 1
        out.append(Piece(a, b, j0, j1))
    return out


# fifth-order one-sided first-derivative weights on six nodes, at node 0 and node 1
_ONE_SIDED6 = (np.array([-137.0, 300.0, -300.0, 200.0, -75.0, 12.0]) / 60.0,
               np.array([-12.0, -65.0, 120.0, -60.0, 20.0, -3.0]) / 60.0)


def piece_derivative(values: np.ndarray, grid: RadialGrid, pc: Piece,
                     parity: int | None = 1) -> np.ndarray:
    """d/dr of the samples on one piece; mirror ghosts only for the piece touching the axis.

    Ends sitting on a break get six-point one-sided stencils: the kink data
    there must not be smeared and the extra order keeps truncation identities tight.
    """
    seg = np.asarray(values, dtype=float)[pc.nodes]
    if seg.size >= 8:
        d = radial_derivative(seg, grid.dr, parity if pc.j0 == 0 else None)
        w0, w1 = _ONE_SIDED6
        if pc.j0 > 0:
            d[0], d[1] = w0 @ seg[:6] / grid.dr, w1 @ seg[:6] / grid.dr
        if pc.j1 < grid.n:
            rev = seg[::-1][:6]
            d[-1], d[-2] = -(w0 @ rev) / grid.dr, -(w1 @ rev) / grid.dr
        return d
    if seg.size >= 5:
        return radial_derivative(seg, grid.dr, parity if pc.j0 == 0 else None)
    if seg.size >= 2:
        return np.gradient(seg, grid.dr)
    return np.zeros(seg.size)


def piecewise_derivative(values: np.ndarray, grid: RadialGrid, breaks=(),
                         parity: int | None = 1) -> np.ndarray:
    """Nodal derivative with one-sided stencils at breaks (right-hand limit on a break node)."""
    if not breaks:
        return radial_derivative(values, grid.dr, parity)
    out = np.empty(grid.size)
    for pc in pieces(grid, breaks):
        out[pc.nodes] = piece_derivative(values, grid, pc, parity)
    return out


def _poly_integral(seg: np.ndarray, dr: float, lo: float, hi: float) -> float:
    """Exact integral of the interpolating polynomial (degree < 4) of a short segment."""
    if seg.size == 0:
        return 0.0
    x = np.arange(seg.size) * dr
    c = np.polynomial.polynomial.polyfit(x, seg, seg.size - 1)
    P = np.polynomial.polynomial.polyint(c)
    return float(np.polynomial.polynomial.polyval(hi, P) - np.polynomial.polynomial.polyval(lo, P))


def piece_integral(seg: np.ndarray, grid: RadialGrid, pc: Piece, lo: float = 0.0,
                   hi: float | None = None) -> float:
    """Integral over [lo, hi] intersected with the piece of samples ``seg`` on its nodes.

    The gaps between the piece ends and its outermost nodes (shorter than one
    cell) use the extrapolated end cubic.
    """
    hi = grid.r_max if hi is None else hi
    A, B = max(lo, pc.a), min(hi, pc.b)
    if B <= A:
        return 0.0
    dr = grid.dr
    seg = np.asarray(seg, dtype=float)
    m = seg.size
    x0 = pc.j0 * dr
    al, be = A - x0, B - x0
    if m < 5:
        return _poly_integral(seg, dr, al, be)
    end = (m - 1) * dr
    total = 0.0
    ca, cb = min(max(al, 0.0), end), min(max(be, 0.0), end)
    if cb > ca:
        total += integrate_from(seg, RadialGrid(end, m - 1), ca, cb)
    if al < 0.0:
        total += _cell_integral(seg, 0, al, min(be, 0.0), dr)
    if be > end:
        total += _cell_integral(seg, m - 1, max(al, end) - end, be - end, dr)
    return float(total)


def piecewise_integral(density, grid: RadialGrid, breaks=(), lo: float = 0.0,
                       hi: float | None = None) -> float:
    """Sum of ``piece_integral`` of ``density(piece)`` over the pieces."""
    if not breaks:
        return integrate_from(density(pieces(grid)[0]), grid, lo, hi)
    return float(sum(piece_integral(density(pc), grid, pc, lo, hi)
                     for pc in pieces(grid, breaks)))


def piecewise_suffix(density, grid: RadialGrid, breaks=()) -> np.ndarray:
    """Integral from every node to r_max, piece by piece."""
    pcs = pieces(grid, breaks)
    if len(pcs) == 1:
        return suffix_integrals(density(pcs[0]), grid)
    out = np.zeros(grid.size)
    later = 0.0
    for pc in reversed(pcs):
        seg = density(pc)
        m = seg.size
        if m >= 5:
            sub = RadialGrid((m - 1) * grid.dr, m - 1)
            tail = piece_integral(seg, grid, pc, pc.j1 * grid.dr, pc.b)
            out[pc.nodes] = suffix_integrals(seg, sub) + tail + later
        else:
            out[pc.nodes] = [piece_integral(seg, grid, pc, j * grid.dr, pc.b) + later
                             for j in range(pc.j0, pc.j1 + 1)]
        later += piece_integral(seg, grid, pc)
    return out


def piecewise_value(values: np.ndarray, grid: RadialGrid, breaks, x: float) -> float:
    """Value at x of the local cubic of the piece containing x (right piece on a break)."""
    if not breaks:
        return interp_cubic(values, grid, x)
    pc = next(p for p in pieces(grid, breaks) if p.a <= x < p.b or p.b == grid.r_max)
    seg = np.asarray(values, dtype=float)[pc.nodes]
    z = x / grid.dr - pc.j0
    if seg.size >= 4:
        k0 = int(min(max(math.floor(z) - 1, 0), seg.size - 4))
        c = _CUBIC @ seg[k0:k0 + 4]
        return float(np.polynomial.polynomial.polyval(z - k0, c))
    c = np.polynomial.polynomial.polyfit(np.arange(seg.size), seg, seg.size - 1)
    return float(np.polynomial.polynomial.polyval(z, c))


def cumulative_integral(g: np.ndarray, dr: float, corrected: bool = False) -> np.ndarray:
    """Trapezoid integral from node 0 to every node (sequential, deterministic).

    ``corrected`` adds the Euler-Maclaurin end term -dr^2/12 (g'(x) - g'(0)),
    which makes the running integral fourth order for smooth g.
    """
    g = np.asarray(g, dtype=float)
    out = np.empty_like(g)
    out[0] = 0.0
    np.cumsum(0.5 * dr * (g[1:] + g[:-1]), out=out[1:])
    if corrected:
        dg = radial_derivative(g, dr, parity=None)
        out -= dr * dr / 12.0 * (dg - dg[0])
    return out


def volume_integral(g: np.ndarray, grid: RadialGrid, R: float = 0.0,
                    upper: float | None = None) -> float:
    """Integral of a radial density over the shell R < |x| < upper in R^3."""
    return integrate_from(FOUR_PI * grid.r ** 2 * g, grid, R, upper)


# ---------------------------------------------------------------------------
# presets

@dataclass(frozen=True)
class ZeroPreset:
    pass


@dataclass(frozen=True)
class SolitonPreset:
    lam: float = 1.0
    iota: int = 1


@dataclass(frozen=True)
class BumpPreset:
    center: float
    width: float
    amplitude: float
    slot: str = "u"
    #: exponent of (1 - x^2); 3 gives the C^2 bump, larger values smoother ones
    power: int = 3


@dataclass(frozen=True)
class CharacteristicPreset:
    profile: object  # dalembert.CharacteristicProfile


@dataclass(frozen=True)
class SumPreset:
    parts: tuple


PresetSpec = Union[ZeroPreset, SolitonPreset, BumpPreset, CharacteristicPreset, SumPreset]


def bump_profile(r: np.ndarray, center: float, width: float, power: int = 3) -> np.ndarray:
    """Bump ``(1 - ((r - c)/w)^2)^power`` supported exactly on ``[c - w, c + w]``.

    It is C^(power - 1) across the edges of the support.
    """
    x = (np.asarray(r, dtype=float) - center) / width
    out = (1.0 - x * x) ** power
    out[np.abs(x) >= 1.0] = 0.0
    return out


def sample_preset(spec: PresetSpec, grid: RadialGrid) -> State:
    if isinstance(spec, ZeroPreset):
        return zero_state(grid)
    if isinstance(spec, SolitonPreset):
        from .ground_state import SolitonParams, soliton_state
        if not spec.lam > 0:
            raise InvalidArgument(f"soliton scale must be positive, got {spec.lam}")
        return soliton_state(SolitonParams(spec.lam, spec.iota), grid)
    if isinstance(spec, BumpPreset):
        if not spec.width > 0:
            raise InvalidArgument(f"bump width must be positive, got {spec.width}")
        if spec.slot not in ("u", "ut"):
            raise InvalidArgument(f"bump slot must be 'u' or 'ut', got {spec.slot!r}")
        if int(spec.power) < 1:
            raise InvalidArgument(f"bump power must be >= 1, got {spec.power}")
        vals = spec.amplitude * bump_profile(grid.r, spec.center, spec.width, int(spec.power))
        zero = grid.zeros()
        return State(grid, vals, zero) if spec.slot == "u" else State(grid, zero, vals)
    if isinstance(spec, CharacteristicPreset):
        from .dalembert import from_characteristic
        return from_characteristic(spec.profile, 0.0, grid).at_time(0.0)
    if isinstance(spec, SumPreset):
        total = zero_state(grid)
        for part in spec.parts:
            total = total + sample_preset(part, grid)
        return total
    raise InvalidArgument(f"unknown preset {spec!r}")


def preset_from_dict(d: dict) -> PresetSpec:
    """Build a preset from its JSON form, e.g. ``{"kind": "soliton", "lam": 2}``."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "zero":
        return ZeroPreset()
    if kind == "soliton":
        return SolitonPreset(float(d.pop("lam", 1.0)), int(d.pop("iota", 1)))
    if kind == "bump":
        return BumpPreset(float(d["center"]), float(d["width"]), float(d["amplitude"]),
                          d.get("slot", "u"), int(d.get("power", 3)))
    if kind == "characteristic":
        from .io import read_profile_csv
        return CharacteristicPreset(read_profile_csv(d["path"]))
    if kind == "sum":
        return SumPreset(tuple(preset_from_dict(p) for p in d["parts"]))
    raise InvalidArgument(f"unknown preset kind {kind!r}")


# ---------------------------------------------------------------------------
# critical rescaling

def rescale_state(s: State, lam: float) -> State:
    """``u -> lam^{-1/2} u(r/lam)``, ``ut -> lam^{-3/2} ut(r/lam)`` on the same grid."""
    if not lam > 0:
        raise InvalidArgument(f"scale must be positive, got {lam}")
    if lam == 1.0:
        return s
    r = s.grid.r
    src = r / lam
    if lam > 1.0:
        lost = r > s.grid.r_max / lam
        if np.any(s.u[lost] != 0) or np.any(s.ut[lost] != 0):
            warnings.warn("rescaled data extends past r_max and is truncated", stacklevel=2)
    elif s.u[-1] != 0 or s.ut[-1] != 0:
        warnings.warn("data is nonzero at r_max; values beyond the grid are taken as 0",
                      stacklevel=2)
    inside = src <= s.grid.r_max
    u = lam ** -0.5 * np.where(inside, interp_cubic(s.u, s.grid, src), 0.0)
    ut = lam ** -1.5 * np.where(inside, interp_cubic(s.ut, s.grid, src), 0.0)
    brk = tuple(lam * b for b in s.breaks if lam * b < s.grid.r_max)
    return State(s.grid, u, ut, s.t, brk)


def states_allclose(a: State, b: State, atol: float = 0.0, rtol: float = 0.0) -> bool:
    return bool(np.allclose(a.u, b.u, atol=atol, rtol=rtol)
                and np.allclose(a.ut, b.ut, atol=atol, rtol=rtol))
