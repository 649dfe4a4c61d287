import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from channelwave.energetics import norms
from channelwave.errors import InvalidArgument
from channelwave.ground_state import (GRAD_W_SQ_EXACT, SolitonParams, gradient_energy_within,
                                      grad_w_sq, ode_residual, pohozaev_report, soliton_state,
                                      tail_exponent, tail_series, truncated_potential,
                                      w_derivative, w_value)
from channelwave.radial_state import SolitonPreset, make_grid, sample_preset


def test_w_values():
    assert w_value(0.0) == 1.0
    assert w_value(math.sqrt(3.0)) == pytest.approx(2 ** -0.5, rel=1e-15)
    assert 1e6 * w_value(1e6) == pytest.approx(math.sqrt(3.0), rel=1e-10)


def test_w_negative_radius():
    with pytest.raises(InvalidArgument):
        w_value(-1.0)


@given(st.floats(0.0, 1e3), st.floats(1e-6, 10.0))
@settings(max_examples=50, deadline=None)
def test_w_decreasing(r, dx):
    assert w_value(r + dx) < w_value(r)


def test_ode_residual_analytic():
    r = np.linspace(0.01, 50, 2001)
    assert np.max(np.abs(ode_residual(r))) <= 1e-8


def test_derivative_matches_mpmath():
    for r in (0.3, 1.0, 7.0):
        d = mpmath.diff(lambda x: (1 + x * x / 3) ** -0.5, r)
        assert w_derivative(r) == pytest.approx(float(d), rel=1e-12)


def test_soliton_state_sign_and_identity(grid20):
    p = soliton_state(SolitonParams(1.0, 1), grid20)
    m = soliton_state(SolitonParams(1.0, -1), grid20)
    np.testing.assert_array_equal(p.u, sample_preset(SolitonPreset(1.0, 1), grid20).u)
    np.testing.assert_array_equal(m.u, -p.u)


def test_soliton_params_validation():
    with pytest.raises(InvalidArgument):
        SolitonParams(0.0, 1)
    with pytest.raises(InvalidArgument):
        SolitonParams(1.0, 0)


def test_grad_norm_scale_invariant():
    g = make_grid(400.0, 400 * 512)
    # tails past r_max differ by lam/r_max; add them analytically (12 pi lam / R leading order)
    vals = []
    for lam in (1.0, 2.0):
        h1 = norms(soliton_state(SolitonParams(lam, 1), g)).h1_sq
        vals.append(h1 + 4 * math.pi * tail_series(4.0, 6.0, g.r_max / lam) / 9.0)
    assert vals[1] == pytest.approx(vals[0], rel=1e-6)


def test_grad_w_sq_oracles():
    # quadrature oracle of the closed-form integrand, and the closed form itself
    quad = 4 * math.pi * integrate.quad(lambda r: r ** 4 / 9 * (1 + r * r / 3) ** -3, 0, math.inf,
                                        epsabs=0, epsrel=1e-13)[0]
    assert GRAD_W_SQ_EXACT == pytest.approx(quad, rel=1e-12)
    assert GRAD_W_SQ_EXACT == pytest.approx(12.8205, abs=1e-3)
    assert grad_w_sq() == pytest.approx(quad, rel=1e-9)


def test_pohozaev_report():
    rep = pohozaev_report(make_grid(200.0, 200 * 512))
    assert abs(rep.gradW_sq - rep.W6) / rep.gradW_sq <= 1e-5
    assert abs(rep.E_W - rep.gradW_sq / 3) <= 1e-5 * rep.gradW_sq
    assert rep.gradW_sq == pytest.approx(GRAD_W_SQ_EXACT, rel=1e-5)


@pytest.mark.parametrize("rho", [0.5, 1.0, 3.0, 20.0])
def test_gradient_energy_within(rho):
    quad = 4 * math.pi * integrate.quad(lambda r: r ** 4 / 9 * (1 + r * r / 3) ** -3, 0, rho,
                                        epsabs=0, epsrel=1e-13)[0]
    assert gradient_energy_within(rho) == pytest.approx(quad, rel=1e-12)


def test_b1_value():
    assert gradient_energy_within(1.0) == pytest.approx(0.15032, abs=1e-4)


@pytest.mark.parametrize("a,b,R", [(2.0, 6.0, 10.0), (4.0, 6.0, 40.0), (0.0, 8.0, 5.0)])
def test_tail_series(a, b, R):
    quad = integrate.quad(lambda r: r ** a * (1 + r * r / 3) ** (-b / 2), R, math.inf,
                          epsabs=0, epsrel=1e-12)[0]
    assert tail_series(a, b, R) == pytest.approx(quad, rel=1e-10)


class TestTruncatedPotential:
    g = make_grid(20.0, 2000)

    def test_plateau(self):
        V = truncated_potential(5.0, 0.0, self.g)
        assert V.values[0] == pytest.approx((1 + 25 / 3) ** -0.5)

    def test_exterior(self):
        V = truncated_potential(5.0, 0.0, self.g)
        assert V.values[self.g.index_of(10.0)] == pytest.approx(w_value(10.0))

    def test_junction_continuous(self):
        V = truncated_potential(5.0, 3.0, self.g)
        assert V(8.0 - 1e-9) == pytest.approx(w_value(8.0), rel=1e-8)
        assert V(8.0 + 1e-9) == pytest.approx(w_value(8.0), rel=1e-8)

    def test_monotone_bounded(self):
        for t in (0.0, -2.0, 4.0):
            v = truncated_potential(2.0, t, self.g).values
            assert np.all(np.diff(v) <= 0) and v.max() <= 1.0

    def test_invalid(self):
        with pytest.raises(InvalidArgument):
            truncated_potential(0.0, 0.0, self.g)


class TestTailExponent:
    R = [10.0, 20.0, 40.0, 80.0]

    @pytest.mark.parametrize("k,p", [(1, 8.0), (2, 4.0)])
    def test_value_mode(self, k, p):
        assert tail_exponent(k, p, self.R) == pytest.approx(-(k * p - 3), rel=0.05)

    def test_gradient_mode(self):
        assert tail_exponent(2, 2.0, self.R, "gradient") == pytest.approx(-3.0, rel=0.05)

    def test_divergent(self):
        with pytest.raises(InvalidArgument):
            tail_exponent(1, 3.0, self.R)

    def test_error_shrinks_with_radius(self):
        lo = abs(tail_exponent(1, 6.0, [10, 20, 40]) + 3)
        hi = abs(tail_exponent(1, 6.0, [40, 80, 160]) + 3)
        assert hi < lo

    def test_bad_radii(self):
        with pytest.raises(InvalidArgument):
            tail_exponent(1, 8.0, [5.0, 10.0, 20.0])
