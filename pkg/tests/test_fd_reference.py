"""Time-marching reference solver and the solution comparison."""

from __future__ import annotations

import numpy as np
import pytest
from _reference import P0, P1, T0, params_with

from fracwear.evolution import LoadProfile, PressureField
from fracwear.fd_reference import (
    FdConfig,
    StabilityError,
    compare_solutions,
    history_weights,
    solve_fd,
)
from fracwear.initial_state import InitialState, prescribed_initial_profile
from fracwear.special_functions import mittag_leffler
from fracwear.spectrum import KernelSpec, ModelAssumptionError, compute_spectrum, discretize
from fracwear.volterra import SampledFunction, TimeGrid, solve_script_e_second_kind

COSINE = LoadProfile.transitional_cosine(P0, P1, T0)
CONST = LoadProfile.constant(P0)


@pytest.fixture(scope="module")
def small_basis():
    return compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 60)


@pytest.fixture(scope="module")
def small_state(small_basis):
    return prescribed_initial_profile("semicircle", P0, small_basis.grid)


# {{{ configuration and weights


def test_config_validation():
    with pytest.raises(ValueError):
        FdConfig(dt=0.0)
    with pytest.raises(ValueError):
        FdConfig(t_end=-1.0)
    with pytest.raises(ValueError):
        FdConfig(weights_cache="lazy")
    assert FdConfig(dt=0.1, t_end=1.0).n_steps == 10
    assert FdConfig(dt=0.3, t_end=1.0).n_steps == 4


def test_stability_report(small_basis):
    rep = FdConfig().stability_report(params_with(), float(np.min(small_basis.sigma)))
    assert rep["heuristic_ok"]
    assert rep["leading_weight"] == pytest.approx(
        2.0 * (1 / 512) ** 0.6 * float(mittag_leffler(0.6, 1.6, -1.2 * (1 / 512) ** 0.6)), rel=1e-12
    )


@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.7])
def test_history_weights_telescope(alpha):
    prm = params_with(alpha=alpha)
    dt, n = 0.01, 300
    total = np.sum(history_weights(prm, dt, n))
    t = dt * n
    exact = prm.nu * t**alpha * float(mittag_leffler(alpha, alpha + 1.0, -prm.mu * t**alpha))
    assert total == pytest.approx(exact, rel=1e-12)


def test_history_weights_exponential():
    prm = params_with(alpha=1.0)
    w = history_weights(prm, 0.1, 5)
    edges = 0.1 * np.arange(6)
    exact = prm.nu / prm.mu * (np.exp(-prm.mu * edges[:-1]) - np.exp(-prm.mu * edges[1:]))
    assert np.allclose(w, exact, rtol=1e-13)


# }}}


# {{{ solver


def test_zero_wear_keeps_initial_state(small_basis, small_state):
    prm = params_with(nu=1e-300)
    field = solve_fd(prm, small_basis.operators, CONST, small_state, FdConfig(dt=0.05, t_end=1.0))
    assert np.allclose(field.p, small_state.p0[None, :], rtol=1e-12, atol=1e-12)


def test_mass_conservation(small_basis, small_state):
    field = solve_fd(params_with(), small_basis.operators, COSINE, small_state, FdConfig(dt=0.01, t_end=2.0))
    assert np.max(np.abs(field.mass() - field.load_values) / field.load_values) <= 1e-6


def test_time_refinement(small_basis, small_state):
    ops = small_basis.operators
    end = {}
    for dt in (1 / 64, 1 / 128, 1 / 256):
        f = solve_fd(params_with(), ops, COSINE, small_state, FdConfig(dt=dt, t_end=1.0), np.array([1.0]))
        end[dt] = f.p[0]
    g = small_basis.grid
    coarse = g.norm(end[1 / 64] - end[1 / 128])
    fine = g.norm(end[1 / 128] - end[1 / 256])
    assert coarse / fine >= 1.5


@pytest.mark.parametrize("alpha", [0.6, 1.3])
def test_eigenmode_matches_scalar_volterra(small_basis, alpha):
    # q0 = phi_k under constant load solves (eta + sigma_k) u + nu k * u = eta + sigma_k
    k = 2
    prm = params_with(alpha=alpha)
    g = small_basis.grid
    phi = small_basis.phi[:, k]
    state = InitialState(g, P0 / 2.0 + 0.3 * phi, 0.0, P0, True)
    dt, t_end = 1 / 256, 2.0
    field = solve_fd(prm, small_basis.operators, CONST, state, FdConfig(dt=dt, t_end=t_end))
    amp = field.q @ (g.weights * phi) / 0.3

    denom = prm.eta + small_basis.sigma[k]
    grid = TimeGrid.uniform_grid(t_end, field.t.size)
    exact = solve_script_e_second_kind(
        alpha, prm.mu, prm.nu / denom, SampledFunction(grid, np.ones(grid.nodes.size))
    ).values
    assert np.max(np.abs(amp - exact)) <= 0.01
    # the mode does not leak into the rest of the basis
    rest = field.q - np.outer(0.3 * amp, phi)
    assert np.max(np.abs(rest)) <= 1e-9


def test_output_time_interpolation(small_basis, small_state):
    ops = small_basis.operators
    cfg = FdConfig(dt=0.1, t_end=1.0)
    full = solve_fd(params_with(), ops, COSINE, small_state, cfg)
    part = solve_fd(params_with(), ops, COSINE, small_state, cfg, np.array([0.3, 0.35, 1.0]))
    assert np.allclose(part.p[0], full.p[3], rtol=1e-13)
    assert np.allclose(part.q[1], 0.5 * (full.q[3] + full.q[4]), rtol=1e-12, atol=1e-14)
    with pytest.raises(ValueError):
        solve_fd(params_with(), ops, COSINE, small_state, cfg, np.array([1.5]))


def test_per_step_weights_match_cache(small_basis, small_state):
    ops = small_basis.operators
    a = solve_fd(params_with(), ops, COSINE, small_state, FdConfig(dt=0.05, t_end=0.5))
    b = solve_fd(params_with(), ops, COSINE, small_state, FdConfig(dt=0.05, t_end=0.5, weights_cache="per_step"))
    assert np.allclose(a.p, b.p, rtol=1e-14)


def test_solver_errors(small_basis, small_state):
    ops = small_basis.operators
    with pytest.raises(ModelAssumptionError):
        solve_fd(params_with(eta=0.0), ops, COSINE, small_state)
    with pytest.raises(ValueError):
        solve_fd(params_with(a=2.0), ops, CONST, small_state)
    other = prescribed_initial_profile("semicircle", P0, compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 90).grid)
    with pytest.raises(ValueError):
        solve_fd(params_with(), ops, CONST, other)


def test_singular_step_matrix():
    # a constant kernel gives K2 = 0 on zero-mean functions; with eta = 0 and
    # negligible wear the step matrix is singular there
    ops = discretize(KernelSpec.tabulated(1.0, np.array([0.0, 2.0]), np.ones(2)), 30)
    state = InitialState(ops.grid, np.full(ops.grid.n, 3.0), 0.0, P0, True)
    with pytest.raises(StabilityError):
        solve_fd(params_with(eta=0.0, nu=1e-300), ops, CONST, state, FdConfig(dt=0.1, t_end=0.2))


# }}}


# {{{ comparison


def _field(grid, p, t=np.array([0.0, 1.0])):
    return PressureField(params_with(), grid, t, p, p @ grid.weights)


def test_compare_identical_and_scaled(small_basis, small_state):
    g = small_basis.grid
    p = np.vstack([small_state.p0, 1.5 * small_state.p0])
    assert np.all(compare_solutions(_field(g, p), _field(g, p)) == 0.0)
    assert np.allclose(compare_solutions(_field(g, 1.01 * p), _field(g, p)), 0.01, rtol=1e-12)


def test_compare_interpolates_other_grids(small_basis):
    g = small_basis.grid
    g2 = compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 90).grid
    smooth = lambda x: np.vstack([1 + x**2, 2 + x**2])  # noqa: E731
    d = compare_solutions(_field(g, smooth(g.nodes)), _field(g2, smooth(g2.nodes)))
    assert np.max(d) <= 1e-3


def test_compare_errors(small_basis):
    g = small_basis.grid
    p = np.ones((2, g.n))
    with pytest.raises(ValueError):
        compare_solutions(_field(g, p), _field(g, p), interior_fraction=0.0)
    with pytest.raises(ValueError):
        compare_solutions(_field(g, p), _field(g, p, np.array([0.0, 2.0])))
    g_wide = compute_spectrum(KernelSpec.log_kernel(1.5, 1.6), 60).grid
    with pytest.raises(ValueError):
        compare_solutions(_field(g, p), PressureField(params_with(a=1.5), g_wide, np.array([0.0, 1.0]), p, p @ g_wide.weights))


# }}}

