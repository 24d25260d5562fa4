"""Closed-form Volterra solvers, product integration and the oracle."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracwear.special_functions import mittag_leffler
from fracwear.volterra import (
    MlKernel,
    SampledFunction,
    TimeGrid,
    power_kernel,
    product_convolution,
    residual,
    solve_abel_first_kind,
    solve_abel_first_kind_high,
    solve_abel_second_kind,
    solve_script_e_first_kind,
    solve_script_e_second_kind,
    volterra_oracle,
)

GRID = TimeGrid.uniform_grid(5.0, 401)
T = GRID.nodes


def sampled(f, df=None, d2f=None, grid=GRID):
    return SampledFunction.from_callable(grid, f, df, d2f)


# {{{ grids


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 0.2, 0.2]))
    with pytest.raises(ValueError):
        TimeGrid.uniform_grid(1.0, 1)
    assert GRID.uniform
    assert GRID.step == pytest.approx(5.0 / 400)
    assert not TimeGrid(np.array([0.0, 0.1, 0.3])).uniform


# }}}


# {{{ product integration


@pytest.mark.parametrize("gam", [0.3, 1.0, 1.7])
def test_power_kernel_convolution_of_linear_density_is_exact(gam):
    # linear densities are integrated exactly against exact kernel moments
    values = 2.0 - 0.5 * T
    conv = product_convolution(power_kernel(gam), GRID, values)
    exact = 2.0 * T**gam / math.gamma(gam + 1.0) - 0.5 * T ** (gam + 1.0) / math.gamma(gam + 2.0)
    assert np.allclose(conv, exact, rtol=1.0e-12, atol=1.0e-14)


def test_ml_kernel_convolution_of_constant():
    alpha, rate = 0.7, 1.3
    conv = product_convolution(MlKernel(alpha, alpha, rate=rate), GRID, np.ones_like(T))
    exact = T**alpha * mittag_leffler(alpha, alpha + 1.0, -rate * T**alpha)
    assert np.allclose(conv, exact, rtol=1.0e-12, atol=1.0e-15)


def test_convolution_second_order_for_smooth_density():
    errs = []
    for n in (101, 201):
        g = TimeGrid.uniform_grid(2.0, n)
        conv = product_convolution(power_kernel(0.5), g, np.cos(g.nodes))
        t = g.nodes[-1]
        ref = integrate.quad(lambda s: np.cos(t - s), 0.0, t, weight="alg", wvar=(-0.5, 0.0))[0]
        errs.append(abs(conv[-1] - ref / math.gamma(0.5)))
    assert errs[0] / errs[1] > 3.5


# }}}


# {{{ Abel, second kind


def test_abel_second_alpha_one_is_exponential():
    u = solve_abel_second_kind(1.0, 1.0, sampled(lambda t: np.ones_like(t)))
    assert np.max(np.abs(u.values - np.exp(-T))) <= 1.0e-6


def test_abel_second_zero_coupling_is_identity():
    f = sampled(np.sin)
    assert np.array_equal(solve_abel_second_kind(0.6, 0.0, f).values, f.values)


def test_abel_second_matches_oracle():
    f = sampled(lambda t: t)
    u = solve_abel_second_kind(0.6, 2.0, f)
    kernel = lambda s: s**-0.4 / math.gamma(0.6)  # noqa: E731
    oracle = volterra_oracle(kernel, -0.4, 2.0, f, "second")
    assert np.max(np.abs(u.values - oracle.values)) <= 1.0e-4 * np.max(np.abs(oracle.values))


def test_abel_second_domain():
    with pytest.raises(ValueError):
        solve_abel_second_kind(0.0, 1.0, sampled(np.sin))


# }}}


# {{{ Abel, first kind


def test_abel_first_recovers_constant():
    # I^alpha 1 = t^alpha / Gamma(1 + alpha); a fine grid resolves f' ~ t^(-1/2)
    g = TimeGrid.uniform_grid(5.0, 4001)
    f = sampled(
        lambda t: t**0.5 / math.gamma(1.5),
        lambda t: np.where(t > 0, t**-0.5, 0.0) / math.gamma(0.5),
        grid=g,
    )
    u = solve_abel_first_kind(0.5, f)
    assert np.max(np.abs(u.values[g.nodes >= 0.5] - 1.0)) <= 1.0e-5


def test_abel_first_zero_data():
    u = solve_abel_first_kind(0.3, sampled(lambda t: 0.0 * t, lambda t: 0.0 * t))
    assert np.isnan(u.values[0])
    assert np.all(u.values[1:] == 0.0)


def test_abel_first_power_data_is_exact():
    # D^0.7 t^2 = Gamma(3) / Gamma(2.3) t^1.3
    u = solve_abel_first_kind(0.7, sampled(lambda t: t**2, lambda t: 2 * t))
    exact = 2.0 / math.gamma(2.3) * T**1.3
    assert np.allclose(u.values[1:], exact[1:], rtol=1.0e-12)


def test_abel_first_needs_derivative():
    with pytest.raises(ValueError):
        solve_abel_first_kind(0.5, sampled(np.sin))
    with pytest.raises(ValueError):
        solve_abel_first_kind(1.2, sampled(np.sin, np.cos))


def test_abel_first_high_alpha_one_is_derivative():
    u = solve_abel_first_kind_high(1.0, sampled(np.sin, np.cos, lambda t: -np.sin(t)))
    assert np.max(np.abs(u.values[1:] - np.cos(T[1:]))) <= 1.0e-8


def test_abel_first_high_recovers_constant():
    g = TimeGrid.uniform_grid(5.0, 4001)
    f = sampled(
        lambda t: t**1.5 / math.gamma(2.5),
        lambda t: t**0.5 / math.gamma(1.5),
        lambda t: np.where(t > 0, t**-0.5, 0.0) / math.gamma(0.5),
        grid=g,
    )
    u = solve_abel_first_kind_high(1.5, f)
    assert np.max(np.abs(u.values[g.nodes >= 0.5] - 1.0)) <= 1.0e-4


def test_abel_first_high_power_data_is_exact():
    # D^1.2 t^2 = Gamma(3) / Gamma(1.8) t^0.8
    u = solve_abel_first_kind_high(1.2, sampled(lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t))
    assert np.allclose(u.values[1:], 2.0 / math.gamma(1.8) * T[1:] ** 0.8, rtol=1.0e-12)


def test_abel_first_high_needs_second_derivative():
    with pytest.raises(ValueError):
        solve_abel_first_kind_high(1.5, sampled(np.sin, np.cos))


# }}}


# {{{ rescaled Mittag-Leffler kernel


def _ml_kernel(alpha, mu):
    return lambda s: s ** (alpha - 1.0) * mittag_leffler(alpha, alpha, -mu * s**alpha)


def test_script_e_second_zero_coupling():
    f = sampled(np.cos)
    assert np.array_equal(solve_script_e_second_kind(0.8, 1.1, 0.0, f).values, f.values)


def test_script_e_second_alpha_one_against_ode():
    # u + lam int_0^t exp(-mu (t - s)) u(s) ds = 1 is u' = -(mu + lam) u + mu, u(0) = 1
    mu, lam = 1.2, 2.0
    u = solve_script_e_second_kind(1.0, mu, lam, sampled(lambda t: np.ones_like(t)))
    ode = integrate.solve_ivp(
        lambda t, y: [-(mu + lam) * y[0] + mu], (0.0, 5.0), [1.0], t_eval=T, rtol=1e-12, atol=1e-14
    )
    assert np.max(np.abs(u.values - ode.y[0])) <= 1.0e-6


def test_script_e_second_matches_oracle():
    f = sampled(lambda t: t)
    u = solve_script_e_second_kind(0.6, 1.2, 2.0, f)
    oracle = volterra_oracle(_ml_kernel(0.6, 1.2), -0.4, 2.0, f, "second")
    assert np.max(np.abs(u.values - oracle.values)) <= 1.0e-4 * np.max(np.abs(oracle.values))


@pytest.mark.parametrize("alpha", [0.6, 1.2])
def test_script_e_second_small_mu_is_abel(alpha):
    f = sampled(lambda t: 1.0 + np.sin(t))
    a = solve_script_e_second_kind(alpha, 1.0e-8, 0.7, f).values
    b = solve_abel_second_kind(alpha, 0.7, f).values
    assert np.max(np.abs(a - b)) <= 1.0e-4 * np.max(np.abs(b))


def test_script_e_second_negative_mu():
    with pytest.raises(ValueError):
        solve_script_e_second_kind(0.6, -1.0, 1.0, sampled(np.sin))


def test_script_e_first_zero_data():
    u = solve_script_e_first_kind(0.5, 0.8, sampled(lambda t: 0 * t, lambda t: 0 * t))
    assert np.all(u.values[1:] == 0.0)


def test_script_e_first_alpha_one():
    u = solve_script_e_first_kind(1.0, 2.0, sampled(lambda t: t, lambda t: 1 + 0 * t, lambda t: 0 * t))
    assert np.allclose(u.values[1:], 2.0 * T[1:] + 1.0, rtol=1.0e-14)


def test_script_e_first_matches_oracle():
    f = sampled(lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t)
    u = solve_script_e_first_kind(0.6, 1.2, f)
    oracle = volterra_oracle(
        _ml_kernel(0.6, 1.2), -0.4, 1.0, f, "first", kernel_derivative=lambda s: -1.2 * np.exp(-1.2 * s)
    )
    m = T > 0
    assert np.max(np.abs(u.values[m] - oracle.values[m])) <= 1.0e-3 * np.max(np.abs(oracle.values[m]))


# }}}


# {{{ structural properties


SMALL = TimeGrid.uniform_grid(3.0, 81)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.2, 1.9),
    st.floats(0.0, 3.0),
    st.floats(-2.0, 2.0),
    st.floats(-2.0, 2.0),
)
def test_second_kind_linearity(alpha, mu, c1, c2):
    f1 = sampled(np.sin, grid=SMALL)
    f2 = sampled(lambda t: 1.0 + t, grid=SMALL)
    f12 = SampledFunction(SMALL, c1 * f1.values + c2 * f2.values)
    u = lambda f: solve_script_e_second_kind(alpha, mu, 0.9, f).values  # noqa: E731
    combo = c1 * u(f1) + c2 * u(f2)
    assert np.allclose(u(f12), combo, rtol=0.0, atol=1.0e-12 * (1.0 + np.max(np.abs(combo))))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.95), st.floats(-2.0, 2.0))
def test_first_kind_linearity(alpha, c):
    f1 = sampled(np.sin, np.cos)
    f2 = sampled(lambda t: t**2, lambda t: 2 * t)
    f12 = SampledFunction(GRID, f1.values + c * f2.values, f1.derivative + c * f2.derivative)
    lhs = solve_abel_first_kind(alpha, f12).values[1:]
    rhs = solve_abel_first_kind(alpha, f1).values[1:] + c * solve_abel_first_kind(alpha, f2).values[1:]
    assert np.allclose(lhs, rhs, rtol=1.0e-12, atol=1.0e-12)


# }}}


# {{{ oracle


def test_oracle_zero_kernel_is_identity():
    f = sampled(np.cos)
    u = volterra_oracle(lambda s: 0.0 * s, 0.0, 1.0, f, "second")
    assert np.allclose(u.values, f.values, rtol=0.0, atol=1.0e-15)


def test_oracle_exponential_kernel():
    u = volterra_oracle(lambda s: np.exp(-0.0 * s), 0.0, 1.0, sampled(lambda t: np.ones_like(t)), "second")
    assert np.max(np.abs(u.values - np.exp(-T))) <= 10.0 * GRID.step


def test_oracle_converges_to_solver():
    errs = []
    for n in (101, 201):
        g = TimeGrid.uniform_grid(5.0, n)
        f = sampled(np.sin, grid=g)
        exact = solve_abel_second_kind(0.6, 0.7, f).values
        oracle = volterra_oracle(lambda s: s**-0.4 / math.gamma(0.6), -0.4, 0.7, f, "second").values
        errs.append(np.max(np.abs(exact - oracle)))
    assert errs[0] / errs[1] >= 1.5


def test_residual_of_exact_solution_is_small():
    f = sampled(lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t)
    u = solve_abel_first_kind(0.6, f)
    kernel = lambda s: s**-0.4 / math.gamma(0.6)  # noqa: E731
    assert residual(kernel, -0.4, 1.0, u, f, "first") <= 1.0e-6
    u2 = solve_abel_second_kind(0.6, 0.7, f)
    assert residual(kernel, -0.4, 0.7, u2, f, "second") <= 1.0e-5
    # a wrong solution is detected
    wrong = SampledFunction(GRID, u2.values * 1.01)
    assert residual(kernel, -0.4, 0.7, wrong, f, "second") > 1.0e-3


# }}}
