r"""Time evolution of the contact pressure under fractional hereditary wear.

The zero-mean part :math:`q = p - P/(2a)` is expanded in the eigenfunctions of
:math:`K_2`. With :math:`\beta_k = \mu + \nu/(\eta + \sigma_k)` each mode is

.. math::

    d_k(t) = d_k^0\left[1 + \frac{\nu}{\mu(\eta+\sigma_k)+\nu}
        \left(E_\alpha(-\beta_k t^\alpha) - 1\right)\right]
        - \frac{l_k\,(P(t) - P(0))}{2a(\eta+\sigma_k)}
        + \frac{\nu l_k}{2a(\eta+\sigma_k)^2}
          \int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\beta_k s^\alpha)
          \left[P(t-s) - P(0)\right] ds.

The rescaled kernel satisfies
:math:`\mu^{1/\alpha-1}\mathcal{E}_\alpha(\mu^{1/\alpha}s)
= -s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha)`, which is how every
convolution here is written; it stays valid at :math:`\mu = 0`, where the wear
term becomes a Riemann-Liouville integral.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from fracwear.initial_state import CoefficientSet, InitialState
from fracwear.special_functions import mittag_leffler, ml_kernel_integrals
from fracwear.spectrum import ModelAssumptionError, QuadratureGrid, SpectralBasis
from fracwear.volterra import MlKernel, TimeGrid, product_convolution

logger = logging.getLogger(__name__)


class ConsistencyError(RuntimeError):
    """Raised when an assembled field violates an exact invariant."""


# {{{ parameters and loads


@dataclass(frozen=True)
class ModelParams:
    """Material and geometry constants of the wear model."""

    a: float
    eta: float
    nu: float
    mu: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.eta >= 0:
            raise ValueError("eta must be non-negative")
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not self.mu >= 0:
            raise ValueError("mu must be non-negative")
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")

    def rates(self, sigma: np.ndarray) -> np.ndarray:
        r"""Mode rates :math:`\beta_k = \mu + \nu/(\eta + \sigma_k)`."""
        denom = self.eta + np.asarray(sigma, dtype=float)
        if np.any(denom <= 0):
            raise ModelAssumptionError("eta + sigma_k must be positive for every mode")
        return self.mu + self.nu / denom


@dataclass(frozen=True)
class LoadProfile:
    """A positive contact load :math:`P(t)`.

    Use the constructors :meth:`constant`, :meth:`transitional_cosine` and
    :meth:`sampled`.
    """

    kind: Literal["constant", "transitional_cosine", "sampled"]
    p0: float
    p1: float | None = None
    t0: float | None = None
    times: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not self.p0 > 0:
            raise ValueError("loads must be positive")
        if self.kind == "transitional_cosine":
            if self.p1 is None or self.t0 is None:
                raise ValueError("transitional loads need p1 and t0")
            if not (self.p1 > 0 and self.t0 > 0):
                raise ValueError("need p1 > 0 and t0 > 0")
        elif self.kind == "sampled":
            times = np.asarray(self.times, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if times.ndim != 1 or times.shape != values.shape or times.size < 2:
                raise ValueError("sampled loads need matching 1D times and values")
            if times[0] != 0.0 or np.any(np.diff(times) <= 0):
                raise ValueError("sample times must increase from 0")
            if np.any(values <= 0):
                raise ValueError("loads must be positive")
            if values[0] != self.p0:
                raise ValueError("p0 must equal the first sample")
            object.__setattr__(self, "times", times)
            object.__setattr__(self, "values", values)
        elif self.kind != "constant":
            raise ValueError(f"unknown load kind: {self.kind!r}")

    @classmethod
    def constant(cls, p0: float) -> LoadProfile:
        return cls("constant", p0)

    @classmethod
    def transitional_cosine(cls, p0: float, p1: float, t0: float) -> LoadProfile:
        """Cosine ramp from ``p0`` to ``p1`` on ``[0, t0]``, constant afterwards."""
        return cls("transitional_cosine", p0, p1=p1, t0=t0)

    @classmethod
    def sampled(cls, times: np.ndarray, values: np.ndarray) -> LoadProfile:
        """Piecewise linear load; the last value is held after the last sample."""
        values = np.asarray(values, dtype=float)
        return cls("sampled", float(values[0]), times=times, values=values)

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @property
    def variation_end(self) -> float:
        """Time after which the load stays constant."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "transitional_cosine":
            return float(self.t0)
        return float(self.times[-1])

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        tt = np.asarray(t, dtype=float)
        if np.any(tt < 0):
            raise ValueError("loads are defined for t >= 0")
        if self.kind == "constant":
            out = np.full(tt.shape, self.p0)
        elif self.kind == "transitional_cosine":
            p0, p1, t0 = self.p0, self.p1, self.t0
            ramp = 0.5 * (p0 + p1) - 0.5 * (p1 - p0) * np.cos(math.pi * np.minimum(tt, t0) / t0)
            out = np.where(tt < t0, ramp, p1)
        else:
            out = np.interp(tt, self.times, self.values)
        return float(out) if out.ndim == 0 else out


def load_value(profile: LoadProfile, t: float | np.ndarray) -> float | np.ndarray:
    """Evaluate :math:`P(t)`."""
    return profile(t)


# }}}


# {{{ load convolutions


def default_cells_per_unit(alpha: float) -> int:
    return 512 if alpha < 1 else 1024


def load_convolution(
    alpha: float,
    rates: float | np.ndarray,
    load: LoadProfile,
    t: float,
    cells_per_unit: int | None = None,
) -> np.ndarray:
    r"""Compute :math:`\int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\beta s^\alpha)[P(t-s) - P(0)]\,ds`.

    The load difference is piecewise linear on a uniform grid covering the
    part of :math:`[0, t]` where it varies, and is integrated exactly against
    the kernel. Where the load has settled the difference is constant and the
    integral is a closed-form Mittag-Leffler moment.

    Returns an array with the shape of ``rates``.
    """
    rates = np.asarray(rates, dtype=float)
    out = np.zeros(rates.shape)
    if load.is_constant or t <= 0:
        return out

    cpu = default_cells_per_unit(alpha) if cells_per_unit is None else cells_per_unit
    r = rates.reshape(-1, 1)
    t_var = load.variation_end

    length = min(t, t_var)
    n = max(int(math.ceil(length * cpu)), 8)
    s = (t - length) + length * np.arange(n + 1) / n
    s[-1] = t
    ds = length / n
    g = np.asarray(load(np.maximum(t - s, 0.0))) - load.p0

    a_mom, b_mom = ml_kernel_integrals(alpha, alpha, r, s)
    da = np.diff(a_mom, axis=1)
    db = np.diff(b_mom, axis=1)
    slope = np.diff(g) / ds
    # int_cell k(s) (s - s_j) ds = db - s_j da
    first = db - s[:-1] * da
    window = da @ g[:-1] + first @ slope

    tail = 0.0
    if t > t_var:
        settled = load(t_var) - load.p0
        tail = settled * ml_kernel_integrals(alpha, alpha, r[:, 0], np.array(t - t_var))[0]

    out = (window + tail).reshape(rates.shape)
    return out


def _grid_load_convolution(
    alpha: float, rates: np.ndarray, load: LoadProfile, grid: TimeGrid
) -> np.ndarray:
    """Load convolutions at every node of a uniform grid, shape ``(nt, len(rates))``."""
    out = np.zeros((len(grid), rates.size))
    if load.is_constant:
        return out
    g = np.asarray(load(grid.nodes)) - load.p0
    for k, rate in enumerate(rates):
        out[:, k] = product_convolution(MlKernel(alpha, alpha, rate=float(rate)), grid, g)
    return out


# }}}


# {{{ mode coefficients


def mode_coefficients(
    params: ModelParams,
    sigma: np.ndarray,
    d0: np.ndarray,
    loads: np.ndarray,
    load: LoadProfile,
    t: float | np.ndarray,
    cells_per_unit: int | None = None,
) -> np.ndarray:
    """Closed-form :math:`d_k(t)` for all modes, shape ``(len(t), len(sigma))``.

    When ``t`` is a uniform grid starting at 0 the load convolutions are
    computed for all nodes at once; otherwise each time uses its own window.
    """
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    d0 = np.atleast_1d(np.asarray(d0, dtype=float))
    loads = np.atleast_1d(np.asarray(loads, dtype=float))
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    if params.eta == 0 and not load.is_constant:
        raise ModelAssumptionError("eta = 0 is only supported for a constant load")

    alpha, mu, nu, a = params.alpha, params.mu, params.nu, params.a
    denom = params.eta + sigma
    beta = params.rates(sigma)

    relax = mittag_leffler(alpha, 1.0, -np.outer(times**alpha, beta))
    out = d0 * (1.0 + nu / (mu * denom + nu) * (relax - 1.0))

    if not load.is_constant:
        dp = np.asarray(load(times)) - load.p0
        out -= np.outer(dp, loads / (2.0 * a * denom))

        grid = _as_uniform_grid(times)
        if grid is not None and grid.step * default_cells_per_unit(alpha) <= 4.0:
            conv = _grid_load_convolution(alpha, beta, load, grid)
        else:
            conv = np.stack(
                [load_convolution(alpha, beta, load, ti, cells_per_unit) for ti in times]
            )
        out += conv * (nu * loads / (2.0 * a * denom**2))

    return out


def _as_uniform_grid(times: np.ndarray) -> TimeGrid | None:
    if times.size < 3 or times[0] != 0.0:
        return None
    steps = np.diff(times)
    if np.any(steps <= 0) or np.ptp(steps) > 1.0e-10 * steps[0]:
        return None
    return TimeGrid(times)


def mode_coefficient(
    params: ModelParams,
    sigma_k: float,
    d_k0: float,
    l_k: float,
    load: LoadProfile,
    t: float,
    cells_per_unit: int | None = None,
) -> float:
    """Single-mode, single-time version of :func:`mode_coefficients`."""
    if params.eta == 0 and not sigma_k > 0:
        raise ModelAssumptionError("eta = 0 needs sigma_k > 0")
    return float(
        mode_coefficients(params, [sigma_k], [d_k0], [l_k], load, t, cells_per_unit)[0, 0]
    )


def null_coefficient(
    params: ModelParams,
    d_perp0: float,
    l_perp: float,
    load: LoadProfile,
    t: float | np.ndarray,
    cells_per_unit: int | None = None,
) -> np.ndarray:
    """Coefficient of the null mode of :math:`K_2` (the mode formula with sigma = 0).

    Raises
    ------
    ModelAssumptionError
        If ``eta = 0`` and the initial state has a null component.
    """
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if params.eta == 0:
        if d_perp0 != 0.0:
            raise ModelAssumptionError(
                "eta = 0 requires the initial pressure to be orthogonal to the null mode"
            )
        return np.zeros(times.size)
    return mode_coefficients(params, [0.0], [d_perp0], [l_perp], load, times, cells_per_unit)[
        :, 0
    ]


# }}}


# {{{ pressure field


@dataclass(frozen=True)
class PressureField:
    """Pressure samples ``p[i, j]`` at time ``t[i]`` and node ``x[j]``."""

    params: ModelParams
    grid: QuadratureGrid
    t: np.ndarray
    p: np.ndarray
    load_values: np.ndarray
    #: present for spectral solutions only
    basis: SpectralBasis | None = None
    coefficients: np.ndarray | None = None
    null_coefficients: np.ndarray | None = None
    wear: np.ndarray | None = None
    delta_rel: np.ndarray | None = None

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def q(self) -> np.ndarray:
        """Zero-mean part :math:`p - P(t)/(2a)`."""
        return self.p - self.load_values[:, None] / (2.0 * self.params.a)

    def mass(self) -> np.ndarray:
        return self.p @ self.grid.weights


def pressure_field(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    load: LoadProfile,
    t_list: np.ndarray,
    n_modes: int | None = None,
    cells_per_unit: int | None = None,
) -> PressureField:
    """Assemble :math:`p(x, t) = P(t)/(2a) + \\sum_k d_k(t)\\varphi_k(x) + d_\\perp(t)\\varphi_\\perp(x)`.

    Raises
    ------
    ConsistencyError
        If the mass of the assembled field deviates from :math:`P(t)` by more
        than ``1e-6`` relative.
    """
    if not math.isclose(params.a, basis.a, rel_tol=1.0e-12):
        raise ValueError("model half-width differs from the basis half-width")
    m = coeffs.n_modes if n_modes is None else n_modes
    if not 0 < m <= min(coeffs.n_modes, basis.n_modes):
        raise ValueError("n_modes exceeds the available modes")

    times = np.atleast_1d(np.asarray(t_list, dtype=float))
    d = mode_coefficients(
        params,
        basis.sigma[:m],
        coeffs.d0[:m],
        basis.loads[:m],
        load,
        times,
        cells_per_unit,
    )
    p_load = np.asarray(load(times), dtype=float).reshape(times.shape)
    p = p_load[:, None] / (2.0 * params.a) + d @ basis.phi[:, :m].T

    d_perp = None
    if basis.null_vector is not None:
        d_perp = null_coefficient(
            params, coeffs.d_perp0 or 0.0, basis.null_load, load, times, cells_per_unit
        )
        p = p + np.outer(d_perp, basis.null_vector)

    mass = p @ basis.grid.weights
    err = np.max(np.abs(mass - p_load) / p_load)
    if err > 1.0e-6:
        raise ConsistencyError(f"mass of the pressure field is off by {err:.2e}")

    return PressureField(
        params=params,
        grid=basis.grid,
        t=times,
        p=p,
        load_values=p_load,
        basis=basis,
        coefficients=d,
        null_coefficients=d_perp,
    )


def pressure_history(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    load: LoadProfile,
    t_end: float,
    n_steps: int,
    n_modes: int | None = None,
) -> PressureField:
    """Pressure on the uniform grid ``t_end * [0, 1/n, ..., 1]``."""
    grid = TimeGrid.uniform_grid(t_end, n_steps)
    return pressure_field(params, basis, coeffs, load, grid.nodes, n_modes)


# }}}


# {{{ wear and indentation


def _wear_kernel(params: ModelParams) -> MlKernel:
    r""":math:`\nu s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha)`, the positive form of the wear kernel."""
    return MlKernel(params.alpha, params.alpha, rate=params.mu, scale=params.nu)


def _history_grid(history: PressureField) -> TimeGrid:
    grid = _as_uniform_grid(history.t)
    if grid is None:
        raise ValueError("wear needs a pressure history on a uniform grid starting at t = 0")
    return grid


def wear_field(
    params: ModelParams, history: PressureField, t: float | None = None
) -> np.ndarray:
    r"""Wear :math:`w[p](x, t) = \nu\int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha) p(x, t-s)\,ds`.

    Returns the samples at every history time, or at ``t`` if given (which
    must be a history node). Negative wear is logged, not clipped.
    """
    grid = _history_grid(history)
    wear = product_convolution(_wear_kernel(params), grid, history.p)

    if np.any(wear < 0):
        logger.warning(
            "negative wear found (min %.3e); the kernel oscillates for alpha > 1",
            float(np.min(wear)),
        )

    if t is None:
        return wear
    idx = np.nonzero(np.isclose(history.t, t, rtol=0.0, atol=1.0e-12 * max(1.0, t)))[0]
    if idx.size == 0:
        raise ValueError(f"t = {t} is not a node of the pressure history")
    return wear[idx[0]]


def wear_load_integral(
    params: ModelParams, load: LoadProfile, t: float | np.ndarray
) -> np.ndarray:
    r""":math:`\nu\int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha) P(t-s)\,ds` (the total worn volume)."""
    times = np.atleast_1d(np.asarray(t, dtype=float))
    kernel = _wear_kernel(params)
    base = load.p0 * kernel.moments(times)[0]
    extra = np.array(
        [
            params.nu * float(load_convolution(params.alpha, params.mu, load, ti))
            for ti in times
        ]
    )
    return base + extra


def indentation(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    load: LoadProfile,
    t: float | np.ndarray,
    n_modes: int | None = None,
) -> np.ndarray:
    r"""Indentation change :math:`\delta(t) - \delta(0)`.

    From the integrated balance

    .. math::

        2a(\delta(t) - \delta(0)) = (\eta - c_0)(P(t) - P(0))
            + \sum_k l_k (d_k(t) - d_k^0)
            + \nu\int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha) P(t-s)\,ds.
    """
    m = coeffs.n_modes if n_modes is None else n_modes
    times = np.atleast_1d(np.asarray(t, dtype=float))
    d = mode_coefficients(
        params, basis.sigma[:m], coeffs.d0[:m], basis.loads[:m], load, times
    )
    dp = np.asarray(load(times), dtype=float).reshape(times.shape) - load.p0

    total = (params.eta - basis.c0) * dp + (d - coeffs.d0[:m]) @ basis.loads[:m]
    if basis.null_vector is not None:
        d_perp = null_coefficient(params, coeffs.d_perp0 or 0.0, basis.null_load, load, times)
        total += basis.null_load * (d_perp - (coeffs.d_perp0 or 0.0))
    total += wear_load_integral(params, load, times)
    return total / (2.0 * params.a)


# }}}


# {{{ residual


def residual_check(
    history: PressureField,
    state: InitialState,
    load: LoadProfile,
) -> np.ndarray:
    r"""Relative residual of the zero-mean equation at every history time.

    Both sides of

    .. math::

        \eta q + \mathcal{K}_2[q] + \nu\int_0^t s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha)
            q(\cdot, t-s)\,ds
        = \eta q_0 + \mathcal{K}_2[q_0] - \frac{P(t) - P(0)}{2a}(K_1 + c_0)

    are evaluated on the grid with the discrete :math:`\mathcal{K}_2` and the
    product-integration convolution. ``q0`` is the full initial state, so the
    residual includes the modal truncation error.
    """
    params = history.params
    basis = history.basis
    if basis is None:
        raise ValueError("the residual check needs a spectral solution")
    ops = basis.operators
    grid = _history_grid(history)

    q = history.q
    memory = product_convolution(_wear_kernel(params), grid, q)
    lhs = params.eta * q + q @ ops.operator_k2.T + memory

    q0 = state.q0
    base = params.eta * q0 + ops.apply_k2(q0)
    dp = history.load_values - load.p0
    rhs = base[None, :] - np.outer(dp / (2.0 * params.a), basis.k1 + basis.c0)

    w = basis.grid.weights
    num = np.sqrt(((lhs - rhs) ** 2) @ w)
    den = np.sqrt((rhs**2) @ w)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / den, num)


# }}}
