"""How fast the pressure settles under a constant load.

For order 1 the distance to the stationary profile decays exponentially
with the rate of the slowest mode present. For other orders it decays like
a power of t, and above order 1 the approach oscillates. The script fits
both laws and counts sign changes of the deviation at the centre.

Run with ``python3 demos/decay_laws.py``.
"""

from __future__ import annotations

import numpy as np

from fracwear.evolution import LoadProfile, ModelParams, mode_coefficients
from fracwear.initial_state import InitialState, project_initial
from fracwear.spectrum import KernelSpec, compute_spectrum, mode_parity
from fracwear.stationary import decay_rate_fit, distance_to_stationary, stationary_constant_load


def main() -> None:
    basis = compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 200)
    g = basis.grid
    # a tilted semicircle, so that the odd leading mode is present
    semi = 12.0 / np.pi * np.sqrt(np.maximum(1.0 - g.nodes**2, 0.0))
    state = InitialState(g, semi * (1.0 + 0.3 * g.nodes), 0.0, 6.0, True)
    coeffs = project_initial(state, basis, 60)
    load = LoadProfile.constant(6.0)
    print(f"leading mode parity {mode_parity(basis)[0]:+d}, d_1 = {coeffs.d0[0]:.4f}")

    centre = int(np.argmin(np.abs(g.nodes)))
    for alpha in (0.6, 1.0, 1.2, 1.8):
        params = ModelParams(a=1.0, eta=1.0, nu=2.0, mu=1.2, alpha=alpha)
        limit = stationary_constant_load(params, basis, coeffs, 6.0)
        if alpha == 1.0:
            t = np.linspace(0.0, 15.0, 301)
            window = (3.0, 15.0)
        else:
            # above order 1 the power law sets in late; an early window is biased
            t = np.geomspace(1.0, 1e4, 400)
            window = (50.0, 500.0) if alpha < 1 else (100.0, 1e4)
        norms = distance_to_stationary(params, basis, coeffs, load, limit, t)
        fit = decay_rate_fit(t, norms, params, float(basis.sigma[0]), window=window)

        ts = np.linspace(0.01, 40.0, 2000)
        d = mode_coefficients(params, basis.sigma[:60], coeffs.d0, basis.loads[:60], load, ts)
        dev = (d - limit.coefficients) @ basis.phi[centre, :60]
        flips = int(np.count_nonzero(np.diff(np.sign(dev)) != 0))
        label = "rate" if fit.kind == "exponential" else "exponent"
        print(
            f"alpha {alpha:3.1f}: fitted {label} {fit.fitted:+.4f}, predicted {fit.predicted:+.4f}"
            f" ({100 * fit.rel_dev:.1f}% off), sign changes at x=0 up to t=40: {flips}"
        )


if __name__ == "__main__":
    main()
