"""Kernel integrals, discretization and the K2 eigendecomposition."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracwear.spectrum import (
    KernelSpec,
    ModelAssumptionError,
    QuadratureGrid,
    c0_constant,
    compute_spectrum,
    discretize,
    eigendecompose,
    k1_profile,
    mode_loads,
    mode_parity,
    parity_residuals,
    sigma_bound,
    spectrum_diagnostics,
)

K0 = KernelSpec.log_kernel(1.0, 1.6)


# {{{ kernels


def test_kernel_validation():
    with pytest.raises(ValueError):
        KernelSpec.log_kernel(0.0, 1.0)
    with pytest.raises(ValueError):
        KernelSpec.log_kernel(2.0, 0.5)  # C_K must exceed log a
    with pytest.raises(ValueError):
        KernelSpec.tabulated(1.0, np.array([0.0, 1.0]), np.array([1.0, 0.0]))  # does not reach 2a
    with pytest.raises(ValueError):
        KernelSpec(a=1.0, kind="gauss")


def test_k1_at_centre():
    assert k1_profile(K0, 0.0) == pytest.approx(5.2, rel=1e-15)


@settings(max_examples=50)
@given(st.floats(-0.999, 0.999))
def test_k1_is_even(x):
    assert k1_profile(K0, x) == pytest.approx(k1_profile(K0, -x), rel=1e-13)


def test_k1_closed_form_against_quadrature():
    x = 0.5
    ref = integrate.quad(lambda z: -math.log(abs(z - x)) + 1.6, -1.0, 1.0, points=[x], limit=200)[0]
    assert k1_profile(K0, x) == pytest.approx(ref, abs=1e-8)


def test_k1_tabulated_matches_log():
    tx = np.linspace(0.0, 2.0, 4001)
    tab = KernelSpec.tabulated(1.0, tx, 1.6 - tx)  # linear kernel 1.6 - |x|
    # int_{-1}^{1} (1.6 - |z - x|) dz = 3.2 - (1 + x^2)
    x = np.array([-0.4, 0.0, 0.7])
    assert np.allclose(k1_profile(tab, x), 3.2 - (1.0 + x**2), atol=1e-10)


def test_k1_domain():
    with pytest.raises(ValueError):
        k1_profile(K0, 1.0)


def test_c0_zero_kernel():
    zero = KernelSpec.tabulated(1.0, np.array([0.0, 2.0]), np.zeros(2))
    assert c0_constant(zero) == 0.0


def test_c0_log_kernel():
    # -(1/2) int_{-1}^{1} K1 with the closed form, and by quadrature
    ref = -0.5 * integrate.quad(lambda x: k1_profile(K0, x), -1.0, 1.0)[0]
    assert c0_constant(K0) == pytest.approx(ref, rel=1e-12)
    assert c0_constant(K0) == pytest.approx(-(3.2 + 3.0 - 2.0 * math.log(2.0)), rel=1e-15)
    assert c0_constant(K0) < 0


# }}}


# {{{ grid and matrices


def test_grid_weights_and_symmetry():
    g = QuadratureGrid.with_nodes(1.3, 200)
    assert g.n == 201
    assert g.weights.sum() == pytest.approx(2.6, rel=1e-12)
    assert np.allclose(g.nodes, -g.nodes[::-1], atol=1e-15)
    assert np.all(np.abs(g.nodes) < 1.3)


@pytest.fixture(scope="module")
def ops():
    return discretize(K0, 200)


def test_matrices_are_symmetric(ops):
    assert np.array_equal(ops.matrix_k, ops.matrix_k.T)
    assert np.array_equal(ops.matrix_k2, ops.matrix_k2.T)


def test_k2_column_integral_is_c0(ops):
    col = ops.grid.integrate(ops.kernel_k2_samples)
    assert np.max(np.abs(col - ops.c0)) <= 1e-6 * abs(ops.c0)
    assert ops.c0 == pytest.approx(c0_constant(K0), rel=1e-6)


def test_k1_samples_match_closed_form(ops):
    x = ops.grid.nodes
    inner = np.abs(x) < 0.95
    assert np.allclose(ops.k1[inner], k1_profile(K0, x[inner]), rtol=1e-4)


def test_discretize_rejects_tiny_grids():
    with pytest.raises(ValueError):
        discretize(K0, 10)


def test_apply_k_to_constant_is_k1(ops):
    assert np.allclose(ops.apply_k(np.ones(ops.grid.n)), ops.k1, rtol=1e-12)


# }}}


# {{{ eigendecomposition


def test_sigma1_converges():
    s100 = compute_spectrum(K0, 100).sigma
    s200 = compute_spectrum(K0, 200).sigma
    assert abs(s100[0] - s200[0]) <= 1e-4 * s200[0]


def test_leading_modes_converge_from_default_resolution(basis):
    s400 = compute_spectrum(K0, 400).sigma
    assert np.all(np.abs(basis.sigma[:20] - s400[:20]) <= 1e-4 * s400[:20])


def test_sigma_sorted_and_psd(basis):
    assert np.all(np.diff(basis.sigma) <= 0)
    assert np.min(basis.sigma) >= -1e-10
    assert np.min(basis.lambda_k) >= -1e-10


def test_eigenvectors_orthonormal_and_zero_mean(basis):
    g = basis.grid
    gram = basis.phi.T @ (g.weights[:, None] * basis.phi)
    assert np.max(np.abs(gram - np.eye(basis.n_modes))) <= 1e-10
    assert np.max(np.abs(g.integrate(basis.phi))) <= 1e-10


def test_interlacing(basis):
    s, lam = basis.sigma, basis.lambda_k
    k = min(s.size, lam.size - 1)
    assert np.all(s[:k] <= lam[:k] + 1e-8)
    assert np.all(s[:k] >= lam[1 : k + 1] - 1e-8)


def test_no_null_mode_for_unit_half_width(basis):
    assert basis.null_vector is None
    assert basis.null_load == 0.0


def test_two_null_modes_are_rejected():
    # a rank-deficient tabulated kernel: K constant leaves K2 with a large null space
    const = KernelSpec.tabulated(1.0, np.array([0.0, 2.0]), np.ones(2))
    with pytest.raises(ModelAssumptionError):
        compute_spectrum(const, 30)


def test_parity(basis):
    assert np.max(parity_residuals(basis)) <= 1e-6
    par = mode_parity(basis)
    assert par[0] == -1  # the leading mode is odd
    assert set(np.unique(par)) == {-1, 1}


def test_odd_modes_carry_no_load(basis):
    odd = mode_parity(basis) == -1
    assert np.max(np.abs(basis.loads[odd])) <= 1e-10 * np.max(np.abs(basis.loads))
    assert np.min(np.abs(basis.loads[~odd][:10])) > 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_quadratic_forms_agree_on_zero_mean(basis, seed):
    rng = np.random.default_rng(seed)
    g = basis.grid
    f = rng.standard_normal(g.n)
    f -= g.integrate(f) / (2 * g.a)
    ops = basis.operators
    qk = g.inner(ops.apply_k(f), f)
    qk2 = g.inner(ops.apply_k2(f), f)
    assert qk == pytest.approx(qk2, rel=1e-10, abs=1e-10)


def test_load_shift_invariance(basis):
    shifted = mode_loads(basis, basis.k1 + 7.3)
    assert np.max(np.abs(shifted.loads - basis.loads)) <= 1e-10


def test_bessel_inequality(basis):
    assert np.sum(basis.loads**2) <= basis.grid.norm(basis.k1) ** 2


def test_truncation(basis):
    t = basis.truncated(5)
    assert t.n_modes == 5
    assert np.array_equal(t.phi, basis.phi[:, :5])
    with pytest.raises(ValueError):
        basis.truncated(0)


def test_projection_reconstructs_zero_mean_functions(basis):
    g = basis.grid
    f = np.sin(3 * g.nodes) + g.nodes**2
    f -= g.integrate(f) / 2.0
    rebuilt = basis.phi @ basis.project(f)
    assert g.norm(rebuilt - f) <= 1e-10 * g.norm(f)


def test_eigendecompose_accepts_discretized_operators(ops):
    b = eigendecompose(ops)
    assert b.sigma[0] == pytest.approx(1.5660051, abs=1e-6)


# }}}


# {{{ diagnostics


def test_sigma_bound_value():
    assert sigma_bound(K0) == pytest.approx(math.pi * math.log(2.0) + 3.2, rel=1e-15)
    assert sigma_bound(K0) == pytest.approx(5.377586090303602, rel=1e-14)


def test_sigma_bound_log_only():
    tab = KernelSpec.tabulated(1.0, np.array([0.0, 2.0]), np.ones(2))
    with pytest.raises(ValueError):
        sigma_bound(tab)


def test_diagnostics_report(basis):
    rep = spectrum_diagnostics(basis)
    assert rep["sigma_1_within_bound"]
    assert rep["psd"]
    assert rep["interlacing"]
    assert rep["n_sigma_ratio_10_40"] <= 10.0
    assert not rep["null_mode"]
    assert rep["orthonormality_error"] <= 1e-10
    assert len(rep["n_sigma"]) == basis.grid.n // 4


# }}}
