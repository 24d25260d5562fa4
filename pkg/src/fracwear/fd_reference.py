r"""Direct time-marching reference solver for the zero-mean pressure equation.

The equation

.. math::

    \eta q + \mathcal{K}_2[q] + \int_0^t k(t - \tau) q(\cdot, \tau)\,d\tau = F(\cdot, t),
    \qquad k(s) = \nu s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha),

is discretized with the nodal :math:`\mathcal{K}_2` matrix in space and a
backward piecewise-constant rule in time: on the cell
:math:`(t_{j-1}, t_j]` the unknown is frozen at :math:`q^j` and the kernel is
integrated exactly over the cell. The newest cell holds the weak singularity
of :math:`k` and goes to the left-hand side, so every step solves

.. math::

    (\eta I + \mathcal{K}_2 + \omega_1 I)\,q^n
        = F^n - \sum_{j=1}^{n-1}\omega_{n-j+1} q^j,
    \qquad \omega_m = \int_{(m-1)h}^{mh} k(s)\,ds.

The step matrix does not change with ``n`` and is factorized once. No
eigendata enter, which is what makes this an independent check of the
spectral solution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import linalg

from fracwear.evolution import LoadProfile, ModelParams, PressureField
from fracwear.initial_state import InitialState
from fracwear.special_functions import ml_kernel_integrals
from fracwear.spectrum import DiscreteOperators, ModelAssumptionError

logger = logging.getLogger(__name__)


class StabilityError(RuntimeError):
    """Raised when the step matrix is numerically singular."""


# {{{ configuration


@dataclass(frozen=True)
class FdConfig:
    """Time step, horizon and bookkeeping of the reference solver.

    ``n_space`` is informational here; the spatial resolution is the one of
    the :class:`DiscreteOperators` passed to :func:`solve_fd`.
    """

    dt: float = 1.0 / 512.0
    t_end: float = 2.0
    n_space: int = 200
    weights_cache: Literal["precompute", "per_step"] = "precompute"

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if self.weights_cache not in ("precompute", "per_step"):
            raise ValueError("weights_cache must be 'precompute' or 'per_step'")

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_end / self.dt - 1.0e-9))

    def stability_report(self, params: ModelParams, sigma_min: float) -> dict[str, float | bool]:
        r"""Compare the newest-cell weight with :math:`\eta + \sigma_{\min}`.

        The weight is :math:`\omega_1 \approx \nu\,dt^\alpha/\Gamma(\alpha+1)`;
        a weight small against the instantaneous stiffness keeps the
        first-order splitting error small. This is a heuristic, reported and
        never enforced.
        """
        w1 = float(history_weights(params, self.dt, 1)[0])
        stiffness = params.eta + sigma_min
        return {
            "leading_weight": w1,
            "eta_plus_sigma_min": stiffness,
            "ratio": abs(w1) / stiffness if stiffness > 0 else math.inf,
            "heuristic_ok": bool(stiffness > 0 and abs(w1) < stiffness),
        }


# }}}


# {{{ history weights


def history_weights(params: ModelParams, dt: float, n: int) -> np.ndarray:
    r"""Cell integrals :math:`\omega_m`, ``m = 1..n``, of the wear kernel.

    They telescope: :math:`\sum_{m \le n}\omega_m = \nu t_n^\alpha
    E_{\alpha,\alpha+1}(-\mu t_n^\alpha)`, the exact integral over
    :math:`[0, t_n]`.
    """
    s = dt * np.arange(n + 1, dtype=float)
    # A(s) = int_0^s k / nu, evaluated in closed form
    cumulative = ml_kernel_integrals(params.alpha, params.alpha, params.mu, s)[0]
    return params.nu * np.diff(cumulative)


# }}}


# {{{ solver


def _step_matrix(params: ModelParams, ops: DiscreteOperators, w1: float) -> np.ndarray:
    n = ops.grid.n
    mat = ops.operator_k2 + (params.eta + w1) * np.eye(n)
    # Constants are an eigenvector of K2 with eigenvalue c0, so the matrix
    # may be singular on them even though the zero-mean subspace is fine.
    # A rank-one term moving that eigenvalue to eta + w1 + 1 leaves the
    # zero-mean dynamics untouched.
    a = ops.grid.a
    shift = 1.0 - ops.c0
    return mat + shift * np.outer(np.ones(n), ops.grid.weights) / (2.0 * a)


def solve_fd(
    params: ModelParams,
    ops: DiscreteOperators,
    load: LoadProfile,
    initial: InitialState,
    config: FdConfig | None = None,
    output_times: np.ndarray | None = None,
) -> PressureField:
    """March the reference scheme over ``[0, config.t_end]``.

    Returns every step, or linear-in-time interpolants at ``output_times``
    (which must lie in ``[0, t_end]``).

    Raises
    ------
    ModelAssumptionError
        For ``eta = 0`` with a non-constant load.
    StabilityError
        If the step matrix is numerically singular.
    """
    cfg = FdConfig() if config is None else config
    if params.eta == 0 and not load.is_constant:
        raise ModelAssumptionError("eta = 0 needs a constant load")
    if not math.isclose(params.a, ops.grid.a, rel_tol=1.0e-12):
        raise ValueError("model half-width differs from the grid half-width")
    if initial.grid.n != ops.grid.n:
        raise ValueError("initial state and operators live on different grids")

    n_steps = cfg.n_steps
    dt = cfg.dt
    a = params.a
    times = dt * np.arange(n_steps + 1, dtype=float)

    weights = history_weights(params, dt, n_steps) if cfg.weights_cache == "precompute" else None
    w1 = float(history_weights(params, dt, 1)[0])

    mat = _step_matrix(params, ops, w1)
    rcond = 1.0 / np.linalg.cond(mat, 1)
    if not rcond > 1.0e-13:
        raise StabilityError(
            f"step matrix is numerically singular (rcond {rcond:.1e}); try dt = {dt / 2:g}"
        )
    lu = linalg.lu_factor(mat)

    q0 = initial.q0
    base = params.eta * q0 + ops.apply_k2(q0)
    forcing_shape = ops.k1 + ops.c0
    p_load = np.asarray(load(times), dtype=float).reshape(times.shape)

    q = np.empty((n_steps + 1, q0.size))
    q[0] = q0
    for n in range(1, n_steps + 1):
        rhs = base - (p_load[n] - load.p0) / (2.0 * a) * forcing_shape
        if n > 1:
            # omega_{n-j+1} for j = 1..n-1, i.e. omega_n down to omega_2
            w = weights[n - 1 : 0 : -1] if weights is not None else history_weights(params, dt, n)[:0:-1]
            rhs = rhs - w @ q[1:n]
        q[n] = linalg.lu_solve(lu, rhs)

    if output_times is not None:
        t_out = np.atleast_1d(np.asarray(output_times, dtype=float))
        if np.any(t_out < 0) or np.any(t_out > times[-1] + 1.0e-12):
            raise ValueError("output times fall outside the marched interval")
        idx = np.clip(np.searchsorted(times, t_out, side="right") - 1, 0, n_steps - 1)
        theta = ((t_out - times[idx]) / dt)[:, None]
        q = (1.0 - theta) * q[idx] + theta * q[idx + 1]
        times = t_out
        p_load = np.asarray(load(times), dtype=float).reshape(times.shape)

    p = q + p_load[:, None] / (2.0 * a)
    mass_err = np.max(np.abs(p @ ops.grid.weights - p_load) / np.abs(p_load))
    if mass_err > 1.0e-6:
        logger.warning("FD mass deviates from the load by %.2e", mass_err)

    return PressureField(params=params, grid=ops.grid, t=times, p=p, load_values=p_load)


# }}}


# {{{ comparison


def compare_solutions(
    a_field: PressureField, b_field: PressureField, interior_fraction: float = 0.9
) -> np.ndarray:
    r"""Relative :math:`L^2` distance :math:`\|a - b\| / \|b\|` per time.

    Norms are taken over :math:`|x| \le` ``interior_fraction`` :math:`\cdot a`
    with the quadrature weights of ``a_field``. ``b_field`` is linearly
    interpolated in space when its nodes differ.

    Raises
    ------
    ValueError
        If the fields cover different intervals or different times.
    """
    if not 0 < interior_fraction <= 1:
        raise ValueError("interior_fraction must lie in (0, 1]")
    ga, gb = a_field.grid, b_field.grid
    if not math.isclose(ga.a, gb.a, rel_tol=1.0e-12):
        raise ValueError("fields live on different intervals")
    if a_field.t.shape != b_field.t.shape or not np.allclose(
        a_field.t, b_field.t, rtol=0.0, atol=1.0e-12
    ):
        raise ValueError("fields are sampled at different times")

    if ga.n == gb.n and np.allclose(ga.nodes, gb.nodes, rtol=0.0, atol=1.0e-14):
        pb = b_field.p
    else:
        pb = np.array([np.interp(ga.nodes, gb.nodes, row) for row in b_field.p])

    mask = np.abs(ga.nodes) <= interior_fraction * ga.a
    w = ga.weights * mask
    num = np.sqrt(((a_field.p - pb) ** 2) @ w)
    den = np.sqrt((pb**2) @ w)
    return num / den


# }}}
