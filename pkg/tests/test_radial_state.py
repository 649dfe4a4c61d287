import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from channelwave.energetics import norms
from channelwave.errors import InvalidArgument, InvalidState
from channelwave.ground_state import SolitonParams, soliton_state, w_value
from channelwave.radial_state import (BLOWUP, BumpPreset, Field, SolitonPreset, State, SumPreset,
                                      Trajectory, ZeroPreset, bump_profile, cumulative_integral,
                                      integrate_from, interp_cubic, make_grid, preset_from_dict,
                                      radial_derivative, rescale_state, sample_preset,
                                      suffix_integrals, zero_state)


class TestGrid:
    def test_spacing_and_midpoint(self):
        g = make_grid(10.0, 1000)
        assert g.dr == pytest.approx(0.01)
        assert g.r[500] == pytest.approx(5.0, abs=1e-15)

    def test_nine_nodes(self):
        g = make_grid(1.0, 8)
        np.testing.assert_array_equal(g.r, np.arange(9) / 8)

    def test_end_nodes_exact(self):
        g = make_grid(3.7, 777)
        assert g.r[0] == 0.0 and g.r[-1] == 3.7
        assert np.all(np.diff(g.r) > 0)
        np.testing.assert_allclose(np.diff(g.r), g.dr, rtol=1e-12)

    @pytest.mark.parametrize("r_max,n", [(0.0, 100), (-1.0, 100), (1.0, 7), (1.0, 8.5), (math.inf, 10)])
    def test_invalid(self, r_max, n):
        with pytest.raises(InvalidArgument):
            make_grid(r_max, n)


class TestStateAndField:
    def test_shape_mismatch(self):
        g = make_grid(1.0, 8)
        with pytest.raises(InvalidState):
            State(g, np.zeros(8), np.zeros(9))

    def test_immutable(self):
        s = zero_state(make_grid(1.0, 8))
        with pytest.raises(ValueError):
            s.u[0] = 1.0

    def test_grid_mismatch(self):
        a = zero_state(make_grid(1.0, 8))
        b = zero_state(make_grid(1.0, 16))
        with pytest.raises(InvalidState):
            a + b

    def test_field_linear_interpolation(self):
        g = make_grid(1.0, 8)
        f = Field(g, g.r ** 2)
        assert f(0.0625) == pytest.approx(0.5 * (0 + 0.125 ** 2))
        assert f(2.0) == 0.0


class TestPresets:
    def test_zero(self, grid20):
        s = sample_preset(ZeroPreset(), grid20)
        assert not np.any(s.u) and not np.any(s.ut)
        assert norms(s).energy == 0.0

    def test_soliton_value_at_origin(self, grid20):
        s = sample_preset(SolitonPreset(1.0, 1), grid20)
        assert s.u[0] == 1.0
        np.testing.assert_array_equal(s.u, w_value(grid20.r))
        assert not np.any(s.ut)

    def test_sum_is_pointwise(self, grid20):
        a = SolitonPreset(1.0, 1)
        b = BumpPreset(3.0, 0.5, 0.1, "u")
        s = sample_preset(SumPreset((a, b)), grid20)
        np.testing.assert_allclose(s.u, sample_preset(a, grid20).u + sample_preset(b, grid20).u,
                                   rtol=0, atol=0)

    def test_bump_support_exact(self, grid20):
        s = sample_preset(BumpPreset(3.0, 0.5, 1.0, "ut"), grid20)
        nz = grid20.r[s.ut != 0]
        assert nz.min() > 2.5 and nz.max() < 3.5
        assert nz.min() - 2.5 <= grid20.dr and 3.5 - nz.max() <= grid20.dr
        assert not np.any(s.u)

    def test_bump_power(self):
        r = np.linspace(0, 2, 9)
        np.testing.assert_allclose(bump_profile(r, 1.0, 1.0, 6), np.clip(1 - (r - 1) ** 2, 0, None) ** 6)

    @pytest.mark.parametrize("spec", [SolitonPreset(0.0), SolitonPreset(-1.0),
                                      BumpPreset(3, 0.0, 1.0), BumpPreset(3, 1, 1, "v"),
                                      BumpPreset(3, 1, 1, "u", 0)])
    def test_invalid(self, spec, grid20):
        with pytest.raises(InvalidArgument):
            sample_preset(spec, grid20)

    def test_from_dict(self):
        spec = preset_from_dict({"kind": "sum", "parts": [
            {"kind": "soliton", "lam": 2, "iota": -1},
            {"kind": "bump", "center": 3, "width": 1, "amplitude": 0.1, "slot": "ut", "power": 4}]})
        assert spec == SumPreset((SolitonPreset(2.0, -1), BumpPreset(3.0, 1.0, 0.1, "ut", 4)))
        with pytest.raises(InvalidArgument):
            preset_from_dict({"kind": "nope"})

    def test_soliton_norm_second_order_or_better(self):
        # quadrature error of ||grad W||^2 on [0, 10] against scipy quad of the closed form
        exact = 4 * math.pi * integrate.quad(lambda r: r ** 4 / 9 * (1 + r * r / 3) ** -3, 0, 10,
                                             epsabs=1e-14, epsrel=1e-14)[0]
        errs = []
        for n in (160, 320, 640):
            g = make_grid(10.0, n)
            errs.append(abs(norms(soliton_state(SolitonParams(1.0, 1), g)).h1_sq - exact))
        assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5


class TestQuadrature:
    def test_derivative_fourth_order(self):
        errs = []
        for n in (64, 128, 256):
            g = make_grid(4.0, n)
            errs.append(np.max(np.abs(radial_derivative(np.cos(g.r), g.dr) + np.sin(g.r))))
        assert errs[0] / errs[1] > 12 and errs[1] / errs[2] > 12

    def test_odd_parity_at_axis(self):
        g = make_grid(2.0, 64)
        d = radial_derivative(np.sin(g.r), g.dr, parity=-1)
        assert d[0] == pytest.approx(1.0, abs=1e-6)

    @given(a=st.floats(0.0, 3.0), b=st.floats(0.0, 3.0))
    @settings(max_examples=60, deadline=None)
    def test_integrate_matches_antiderivative(self, a, b):
        lo, hi = sorted((a, b))
        g = make_grid(3.0, 300)
        val = integrate_from(np.exp(g.r), g, lo, hi)
        assert val == pytest.approx(math.exp(hi) - math.exp(lo), rel=1e-9, abs=1e-11)

    def test_additivity(self):
        g = make_grid(3.0, 300)
        f = np.sin(3 * g.r) ** 2
        whole = integrate_from(f, g, 0.3, 2.9)
        parts = integrate_from(f, g, 0.3, 1.234) + integrate_from(f, g, 1.234, 2.9)
        assert whole == pytest.approx(parts, rel=1e-8)

    def test_suffix_matches_pointwise(self):
        g = make_grid(3.0, 90)
        f = np.exp(-g.r) * (1 + g.r)
        suf = suffix_integrals(f, g)
        direct = np.array([integrate_from(f, g, x) for x in g.r])
        np.testing.assert_allclose(suf, direct, atol=1e-12)

    def test_cumulative_corrected(self):
        g = make_grid(2.0, 200)
        c = cumulative_integral(np.cos(g.r), g.dr, corrected=True)
        np.testing.assert_allclose(c, np.sin(g.r), atol=1e-9)

    def test_interp_cubic_exact_on_cubics(self):
        g = make_grid(2.0, 20)
        p = lambda x: 1 - 2 * x + 0.5 * x ** 3
        xs = np.linspace(0, 2, 37)
        np.testing.assert_allclose(interp_cubic(p(g.r), g, xs), p(xs), atol=1e-12)

    def test_invalid_interval(self):
        g = make_grid(1.0, 8)
        with pytest.raises(InvalidArgument):
            integrate_from(g.r, g, 0.0, 2.0)


class TestRescale:
    def test_identity(self, grid20):
        s = sample_preset(BumpPreset(3, 1, 0.2), grid20)
        assert rescale_state(s, 1.0) is s

    def test_soliton_family_closed(self, grid20):
        s = soliton_state(SolitonParams(1.0, 1), grid20)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r2 = rescale_state(s, 2.0)
        np.testing.assert_allclose(r2.u, soliton_state(SolitonParams(2.0, 1), grid20).u, atol=1e-8)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 4.0])
    def test_energy_invariant(self, lam, grid20):
        # bump inside r <= 4 so that every rescaling fits; oracle: analytic rescaled sampling
        s = sample_preset(BumpPreset(2.5, 1.0, 0.3, "u", 6), grid20)
        out = rescale_state(s, lam)
        ref = State(grid20, lam ** -0.5 * 0.3 * bump_profile(grid20.r / lam, 2.5, 1.0, 6),
                    grid20.zeros())
        assert norms(out).energy == pytest.approx(norms(s).energy, rel=1e-5)
        assert norms(out).energy == pytest.approx(norms(ref).energy, rel=1e-5)

    def test_composition(self, grid20):
        s = sample_preset(BumpPreset(2.0, 1.0, 0.3, "u", 6), grid20)
        ab = rescale_state(rescale_state(s, 0.5), 3.0)
        direct = rescale_state(s, 1.5)
        np.testing.assert_allclose(ab.u, direct.u, atol=1e-6)

    def test_invalid(self, grid20):
        with pytest.raises(InvalidArgument):
            rescale_state(zero_state(grid20), 0.0)


class TestTrajectory:
    def _traj(self, times, n_diag=None):
        g = make_grid(1.0, 8)
        states = [zero_state(g, t) for t in times]
        n = len(times) if n_diag is None else n_diag
        return Trajectory(g, 0.1, 1, states, {"t": np.zeros(n), "energy": np.zeros(len(times))})

    def test_increasing_times(self):
        with pytest.raises(InvalidState):
            self._traj([0.0, 0.2, 0.1])

    def test_diag_lengths(self):
        with pytest.raises(InvalidState):
            self._traj([0.0, 0.1], n_diag=3)

    def test_bad_termination(self):
        g = make_grid(1.0, 8)
        with pytest.raises(InvalidArgument):
            Trajectory(g, 0.1, 1, [zero_state(g)], {}, "exploded")

    def test_subsample_keeps_last(self):
        tr = self._traj([0.0, 0.1, 0.2, 0.3, 0.4])
        tr.termination = BLOWUP
        sub = tr.subsampled(2)
        assert [s.t for s in sub.states] == [0.0, 0.2, 0.4]
        assert sub.termination == BLOWUP
