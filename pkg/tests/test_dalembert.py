import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from channelwave.dalembert import (CharacteristicProfile, asymptotic_channels,
                                   easy_channel_construct, exterior_energy_exact,
                                   from_characteristic, measured_exterior, psi_truncated_profile,
                                   solve_rho0, to_characteristic)
from channelwave.energetics import exterior_energy, flux_seminorm, norms
from channelwave.errors import HorizonExceeded, InvalidArgument
from channelwave.nlw import evolve_to
from channelwave.radial_state import BumpPreset, make_grid, sample_preset
from channelwave.synthetic import random_bump_state, random_profile

G = make_grid(20.0, 20 * 256)


def gaussian_profile(grid, c=3.0, w=0.5, a=1.0):
    """fdot = a exp(-((s-c)/w)^2) with its exact primitive."""
    n = grid.n
    s = (np.arange(2 * n + 1) - n) * grid.dr
    fdot = a * np.exp(-((s - c) / w) ** 2)
    f = a * w * math.sqrt(math.pi) / 2 * (special.erf((s - c) / w) + special.erf((grid.r_max + c) / w))
    return CharacteristicProfile(grid.r_max, fdot, 0.0, f), (c, w, a)


def exact_ru(t, r, c, w, a):
    F = lambda x: a * w * math.sqrt(math.pi) / 2 * special.erf((x - c) / w)
    return F(t + r) - F(t - r)


class TestProfile:
    def test_validation(self):
        with pytest.raises(InvalidArgument):
            CharacteristicProfile(1.0, np.zeros(10))
        with pytest.raises(InvalidArgument):
            CharacteristicProfile(1.0, np.full(11, np.nan))
        with pytest.raises(InvalidArgument):
            CharacteristicProfile(1.0, np.zeros(11), 0.0, np.zeros(9))

    def test_mesh(self):
        p = CharacteristicProfile(2.0, np.zeros(17))
        assert p.n == 8 and p.ds == 0.25
        assert p.s[0] == -2.0 and p.s[-1] == 2.0

    def test_zero_outside(self):
        p, _ = gaussian_profile(G)
        assert p.fdot_at(25.0) == 0.0
        assert p.f_at(-25.0) == 0.0
        assert p.f_at(25.0) == p.f[-1]

    def test_cumulative_primitive(self):
        p, (c, w, a) = gaussian_profile(G)
        bare = CharacteristicProfile(p.s_max, p.fdot)
        np.testing.assert_allclose(bare.f, p.f, atol=1e-10)
        assert bare.total == pytest.approx(2 * a * a * w * math.sqrt(math.pi / 2), rel=1e-10)

    def test_shifted(self):
        p, _ = gaussian_profile(G)
        q = p.shifted(1.5)
        assert q.t0 == 1.5
        np.testing.assert_array_equal(q.fdot, p.fdot)


class TestRepresentation:
    @pytest.mark.parametrize("t", [0.0, 1.0, 2.5, 6.0])
    def test_gaussian_oracle(self, t):
        p, prm = gaussian_profile(G)
        s = from_characteristic(p, t, G)
        r = G.r[1:]
        np.testing.assert_allclose(r * s.u[1:], exact_ru(t, r, *prm), atol=1e-10)

    def test_round_trip(self, rng):
        s = random_bump_state(G, rng)
        back = from_characteristic(to_characteristic(s), s.t, G)
        np.testing.assert_allclose(back.u[1:], s.u[1:], atol=1e-12)
        np.testing.assert_allclose(back.ut[1:], s.ut[1:], atol=1e-8)

    def test_anchored_time(self, rng):
        s = random_bump_state(G, rng).at_time(3.0)
        p = to_characteristic(s)
        assert p.t0 == 3.0
        np.testing.assert_allclose(from_characteristic(p, 3.0, G).u[1:], s.u[1:], atol=1e-12)

    def test_energy_conserved(self, rng):
        s = random_bump_state(G, rng)
        p = to_characteristic(s)
        E0 = norms(s).norm_sq
        for t in (1.0, 3.0):
            assert norms(from_characteristic(p, t, G)).norm_sq == pytest.approx(E0, rel=1e-8)

    def test_matches_linear_solver(self):
        # leapfrog in linear mode converges to the exact wave at second order
        errs = []
        for n in (1024, 2048):
            g = make_grid(12.0, n)
            s = sample_preset(BumpPreset(4.0, 1.5, 1.0, "u", 6), g)
            exact = from_characteristic(to_characteristic(s), 2.0, g)
            num = evolve_to(s, 2.0, cfl=0.5, mode="linear")
            errs.append(math.sqrt(norms(num - exact).norm_sq))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


class TestExterior:
    @given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 3.0), st.sampled_from([0.0, 1.0, 5.0]))
    @settings(max_examples=25, deadline=None)
    def test_identity(self, seed, rho0, t):
        p = random_profile(G, np.random.default_rng(seed))
        exact = exterior_energy_exact(p, rho0, t)
        assert measured_exterior(p, rho0, t, G) == pytest.approx(exact, rel=1e-6, abs=1e-12)

    def test_at_t0_is_state_exterior(self, rng):
        s = random_bump_state(G, rng)
        p = to_characteristic(s)
        for R in (1.0, 4.0, 9.0):
            assert 4 * math.pi * exterior_energy_exact(p, R, 0.0) == pytest.approx(
                exterior_energy(s, R), rel=1e-8)

    def test_negative_radius(self):
        p, _ = gaussian_profile(G)
        with pytest.raises(InvalidArgument):
            exterior_energy_exact(p, -2.0, 1.0)

    def test_limit_is_forward_channel(self, rng):
        p = to_characteristic(random_bump_state(G, rng))
        fw, _ = asymptotic_channels(p, 1.0)
        # past the mesh only the forward channel and a 1/(rho0 + t) term remain
        c = (p.f[-1] - float(p.f_at(-1.0))) ** 2
        for t in (40.0, 400.0):
            assert exterior_energy_exact(p, 1.0, t) == pytest.approx(fw + c / (1.0 + t), rel=1e-10)


class TestChannels:
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.0, 1.0, 5.0]))
    @settings(max_examples=25, deadline=None)
    def test_split_and_half(self, seed, R):
        s = random_bump_state(G, np.random.default_rng(seed), centers=(2.0, 9.0))
        fw, bw = asymptotic_channels(to_characteristic(s), R)
        flux = flux_seminorm(s, R)
        assert fw + bw == pytest.approx(flux, rel=1e-9, abs=1e-14)
        assert max(fw, bw) >= 0.5 * flux - 1e-12

    def test_one_sided_profile(self):
        # fdot supported on s > 0: all of it travels inward first, nothing leaves forward
        p, (c, w, a) = gaussian_profile(G, c=6.0, w=0.4)
        fw, bw = asymptotic_channels(p, 0.0)
        assert fw == pytest.approx(0.0, abs=1e-12)
        assert bw == pytest.approx(p.total, rel=1e-10)

    def test_invalid(self):
        p, _ = gaussian_profile(G)
        with pytest.raises(InvalidArgument):
            asymptotic_channels(p, -1.0)


class TestEasyChannel:
    def test_rho0_bisection(self, rng):
        p = random_profile(G, rng)
        eps = 0.1 * p.total
        rho0 = solve_rho0(p, eps)
        left = lambda x: 2 * p.square_integral(-math.inf, -x)
        assert left(rho0) >= eps
        assert left(rho0 + 1e-6) <= eps * (1 + 1e-3)

    @pytest.mark.parametrize("frac", [0.02, 0.1, 0.3])
    def test_window(self, rng, frac):
        s = random_bump_state(G, rng, centers=(2.0, 6.0))
        p = to_characteristic(s)
        eps = frac * p.total
        ch = easy_channel_construct(p, eps, horizon=20.0)
        for t in np.linspace(ch.t0, 20.0, 41):
            val = ch.exterior_at(t)
            assert eps * (1 - 1e-9) <= val <= 2 * eps * (1 + 1e-9)
        with pytest.raises(InvalidArgument):
            ch.exterior_at(ch.t0 - 1.0)

    def test_bad_eps(self, rng):
        p = random_profile(G, rng)
        with pytest.raises(InvalidArgument):
            easy_channel_construct(p, 2 * p.total)
        with pytest.raises(InvalidArgument):
            easy_channel_construct(CharacteristicProfile(1.0, np.zeros(17)), 0.1)

    def test_horizon_too_short(self, rng):
        p = random_profile(G, rng)
        with pytest.raises(HorizonExceeded):
            easy_channel_construct(p, 1e-3 * p.total, horizon=0.5 * p.ds)


class TestTruncatedProfile:
    def test_total_equals_exterior(self, rng):
        p = to_characteristic(random_bump_state(G, rng))
        for t, R in ((0.0, 5.0), (2.0, 6.0), (1.0, 3.0)):
            tr = psi_truncated_profile(p, t, R)
            assert tr.t0 == t
            # measured at the cut, so no quadrature reads across the jumps at +-R
            assert exterior_energy_exact(tr, R, t) == pytest.approx(
                exterior_energy_exact(p, R - t, t), rel=1e-9)

    def test_state_agrees_outside(self, rng):
        p = to_characteristic(random_bump_state(G, rng))
        tr = psi_truncated_profile(p, 1.0, 5.0)
        a, b = from_characteristic(p, 1.0, G), from_characteristic(tr, 1.0, G)
        out = G.r > 5.0 + 1e-9
        np.testing.assert_allclose(b.u[out], a.u[out], atol=1e-10)
        inside = G.r < 5.0 - 1e-9
        np.testing.assert_allclose(b.u[inside], b.u[1], atol=1e-10)

    def test_off_node_rejected(self):
        p, _ = gaussian_profile(G)
        with pytest.raises(InvalidArgument):
            psi_truncated_profile(p, 0.0, 5.0 + 0.3 * G.dr)
