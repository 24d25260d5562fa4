"""Stationary profiles after a load step, for several relaxation constants.

Without wear relaxation the pressure ends uniform. Stronger relaxation keeps
more of the initial shape, and the limit does not depend on the fractional
order at all. The script prints the distance of each limit from the uniform
profile and checks the order independence.

Run with ``python3 demos/stationary_sweep.py``.
"""

from __future__ import annotations

import numpy as np

from fracwear.evolution import ModelParams
from fracwear.initial_state import prescribed_initial_profile, project_initial
from fracwear.spectrum import KernelSpec, compute_spectrum
from fracwear.stationary import stationary_transitional_load


def main() -> None:
    basis = compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 200)
    state = prescribed_initial_profile("semicircle", 6.0, basis.grid)
    coeffs = project_initial(state, basis, 60)
    g = basis.grid
    centre = int(np.argmin(np.abs(g.nodes)))

    print("  mu   ||p_inf - 5||   p_inf(0)   mass")
    for mu in (0.0, 0.5, 1.2, 3.0, 6.0):
        params = ModelParams(a=1.0, eta=1.0, nu=2.0, mu=mu, alpha=0.6)
        lim = stationary_transitional_load(params, basis, coeffs, 6.0, 10.0)
        dev = g.norm(lim.values - 5.0)
        print(f"{mu:4.1f}   {dev:13.6f}   {lim.values[centre]:8.5f}   {g.integrate(lim.values):.10f}")

    profiles = [
        stationary_transitional_load(
            ModelParams(a=1.0, eta=1.0, nu=2.0, mu=1.2, alpha=alpha), basis, coeffs, 6.0, 10.0
        ).values
        for alpha in (0.6, 1.2, 1.8)
    ]
    same = all(np.array_equal(profiles[0], p) for p in profiles[1:])
    print(f"\nlimits for alpha in (0.6, 1.2, 1.8) are bit-identical: {same}")


if __name__ == "__main__":
    main()
