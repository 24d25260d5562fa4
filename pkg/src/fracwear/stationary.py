r"""Large-time limits of the pressure and fits of the approach to them.

For a load that settles at :math:`P_\infty` (:math:`P_0` for a constant load,
:math:`P_1` for a transitional one) each mode tends to

.. math::

    c_k = \frac{\mu(\eta+\sigma_k)}{\mu(\eta+\sigma_k)+\nu}\,d_k^0
          - \frac{\mu\,(P_\infty - P_0)\,l_k}{2a\,(\mu(\eta+\sigma_k)+\nu)},

which follows from the final-value limit of the mode equation. The limit
does not depend on :math:`\alpha` or on the shape of the transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from fracwear.evolution import LoadProfile, ModelParams, mode_coefficients
from fracwear.initial_state import CoefficientSet
from fracwear.spectrum import ModelAssumptionError, SpectralBasis


class FitError(ValueError):
    """Raised when a decay fit has no usable samples."""


# {{{ stationary profiles


@dataclass(frozen=True)
class StationaryProfile:
    """Stationary pressure samples on the basis grid."""

    x: np.ndarray
    values: np.ndarray
    regime: Literal["constant_load", "transitional_load"]
    coefficients: np.ndarray
    null_coefficient: float | None
    terminal_load: float

    def mass(self, weights: np.ndarray) -> float:
        return float(self.values @ weights)


def _stationary(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    p_start: float,
    p_end: float,
    n_modes: int | None,
    regime: Literal["constant_load", "transitional_load"],
) -> StationaryProfile:
    m = coeffs.n_modes if n_modes is None else n_modes
    if not 0 < m <= min(coeffs.n_modes, basis.n_modes):
        raise ValueError("n_modes exceeds the available modes")
    a, eta, nu, mu = params.a, params.eta, params.nu, params.mu

    denom = eta + basis.sigma[:m]
    if np.any(denom <= 0):
        raise ModelAssumptionError("eta + sigma_k must be positive for every mode")
    shift = (p_end - p_start) / (2.0 * a)
    c = (mu * denom * coeffs.d0[:m] - mu * shift * basis.loads[:m]) / (mu * denom + nu)
    values = p_end / (2.0 * a) + basis.phi[:, :m] @ c

    c_perp = None
    if basis.null_vector is not None:
        d_perp0 = coeffs.d_perp0 or 0.0
        if eta == 0:
            # the null component must vanish initially and stays zero
            c_perp = 0.0
        else:
            c_perp = (mu * eta * d_perp0 - mu * shift * basis.null_load) / (mu * eta + nu)
        values = values + c_perp * basis.null_vector

    return StationaryProfile(
        x=basis.grid.nodes,
        values=values,
        regime=regime,
        coefficients=c,
        null_coefficient=c_perp,
        terminal_load=p_end,
    )


def stationary_constant_load(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    p0: float,
    n_modes: int | None = None,
) -> StationaryProfile:
    """Limit profile under the constant load ``p0``."""
    return _stationary(params, basis, coeffs, p0, p0, n_modes, "constant_load")


def stationary_transitional_load(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    p0: float,
    p1: float,
    n_modes: int | None = None,
) -> StationaryProfile:
    """Limit profile when the load moves from ``p0`` to ``p1`` and stays there.

    Raises
    ------
    ModelAssumptionError
        For ``eta = 0``, where this regime is not covered.
    """
    if params.eta == 0:
        raise ModelAssumptionError("the transitional regime needs eta > 0")
    return _stationary(params, basis, coeffs, p0, p1, n_modes, "transitional_load")


def stationary_for_load(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    load: LoadProfile,
    n_modes: int | None = None,
) -> StationaryProfile:
    """Dispatch on the load kind."""
    if load.is_constant:
        return stationary_constant_load(params, basis, coeffs, load.p0, n_modes)
    p_end = float(load(load.variation_end))
    return stationary_transitional_load(params, basis, coeffs, load.p0, p_end, n_modes)


# }}}


# {{{ distance to the limit


def distance_to_stationary(
    params: ModelParams,
    basis: SpectralBasis,
    coeffs: CoefficientSet,
    load: LoadProfile,
    stationary: StationaryProfile,
    times: np.ndarray,
    n_modes: int | None = None,
) -> np.ndarray:
    r""":math:`\|p(\cdot, t) - p_\infty\|` from the mode coefficients (Parseval).

    The null mode is not included; it is absent for the logarithmic kernel.
    """
    m = stationary.coefficients.size if n_modes is None else n_modes
    times = np.atleast_1d(np.asarray(times, dtype=float))
    d = mode_coefficients(
        params, basis.sigma[:m], coeffs.d0[:m], basis.loads[:m], load, times
    )
    mean_gap = (np.asarray(load(times)).reshape(times.shape) - stationary.terminal_load) / (
        2.0 * params.a
    )
    # ||const||^2 = 2a const^2 on (-a, a)
    sq = np.sum((d - stationary.coefficients[:m]) ** 2, axis=1) + 2.0 * params.a * mean_gap**2
    return np.sqrt(sq)


# }}}


# {{{ decay fits


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of the approach to the stationary state.

    ``kind="exponential"`` fits ``log ||.||`` against ``t`` and reports the
    rate; ``kind="algebraic"`` fits against ``log t`` and reports the
    exponent (negative for decay).
    """

    kind: Literal["exponential", "algebraic"]
    t_window: tuple[float, float]
    fitted: float
    predicted: float
    rel_dev: float
    n_samples: int
    envelope: bool


def upper_envelope(norms: np.ndarray) -> np.ndarray:
    """Running maximum from the right, a monotone envelope of an oscillating decay."""
    return np.maximum.accumulate(np.asarray(norms)[::-1])[::-1]


def decay_rate_fit(
    times: np.ndarray,
    norms: np.ndarray,
    params: ModelParams,
    sigma1: float,
    window: tuple[float, float] | None = None,
    floor: float = 1.0e-13,
    envelope: bool | None = None,
) -> DecayFit:
    r"""Fit the decay of :math:`\|p(\cdot,t) - p_\infty\|`.

    For :math:`\alpha = 1` the predicted rate is
    :math:`\mu + \nu/(\eta + \sigma_1)`; otherwise the predicted exponent is
    :math:`-\alpha`. By default the window starts where the norm first drops
    below 10% of its initial value, and for :math:`\alpha > 1` the fit uses
    the upper envelope of the oscillating norm.

    Raises
    ------
    FitError
        If fewer than three samples remain in the window.
    """
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if times.shape != norms.shape:
        raise ValueError("times and norms must have the same shape")

    use_env = params.alpha > 1 if envelope is None else envelope
    values = upper_envelope(norms) if use_env else norms

    if window is None:
        below = np.nonzero(norms < 0.1 * norms[0])[0]
        if below.size == 0:
            raise FitError("the norm never drops below 10% of its initial value")
        finite = np.nonzero(np.isfinite(norms))[0]
        window = (float(times[below[0]]), float(times[finite[-1]]))

    mask = (
        (times >= window[0])
        & (times <= window[1])
        & np.isfinite(values)
        & (values > floor)
        & (times > 0)
    )
    if np.count_nonzero(mask) < 3:
        raise FitError("fewer than three samples in the fit window")

    log_n = np.log(values[mask])
    if math.isclose(params.alpha, 1.0):
        slope = np.polyfit(times[mask], log_n, 1)[0]
        fitted = -slope
        predicted = params.mu + params.nu / (params.eta + sigma1)
        kind = "exponential"
    else:
        fitted = np.polyfit(np.log(times[mask]), log_n, 1)[0]
        predicted = -params.alpha
        kind = "algebraic"

    return DecayFit(
        kind=kind,
        t_window=(float(window[0]), float(window[1])),
        fitted=float(fitted),
        predicted=float(predicted),
        rel_dev=float(abs(fitted - predicted) / abs(predicted)),
        n_samples=int(np.count_nonzero(mask)),
        envelope=use_env,
    )


# }}}
