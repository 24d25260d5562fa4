"""Reference run: spectral solution against the time-marching solver.

A punch of half-width 1 starts from a semicircular pressure profile while
the load ramps from 6 to 10 over half a time unit. The script prints the
interior relative L2 distance between the two solvers and the mass error of
each, then the centre and off-centre pressures over time.

Run with ``python3 demos/reference_run.py`` (a few seconds).
"""

from __future__ import annotations

import time

import numpy as np

from fracwear.evolution import LoadProfile, ModelParams, pressure_field
from fracwear.fd_reference import FdConfig, compare_solutions, solve_fd
from fracwear.initial_state import prescribed_initial_profile, project_initial
from fracwear.spectrum import KernelSpec, compute_spectrum


def main() -> None:
    params = ModelParams(a=1.0, eta=1.0, nu=2.0, mu=1.2, alpha=0.6)
    basis = compute_spectrum(KernelSpec.log_kernel(1.0, 1.6), 200)
    load = LoadProfile.transitional_cosine(6.0, 10.0, 0.5)
    state = prescribed_initial_profile("semicircle", 6.0, basis.grid)
    coeffs = project_initial(state, basis, 60)
    print(f"sigma_1 = {basis.sigma[0]:.7f}, 60-mode projection residual = {coeffs.residual:.3f}")

    times = np.array([0.1, 0.5, 1.0, 2.0])
    t0 = time.perf_counter()
    spectral = pressure_field(params, basis, coeffs, load, times)
    t1 = time.perf_counter()
    fd = solve_fd(params, basis.operators, load, state, FdConfig(dt=1 / 512, t_end=2.0), times)
    t2 = time.perf_counter()
    print(f"spectral {t1 - t0:.1f} s, time marching {t2 - t1:.1f} s")

    dist = compare_solutions(fd, spectral, 0.9)
    print("\n   t   interior rel L2   mass err (spectral)   mass err (FD)")
    for i, t in enumerate(times):
        ms = abs(spectral.mass()[i] - spectral.load_values[i]) / spectral.load_values[i]
        mf = abs(fd.mass()[i] - fd.load_values[i]) / fd.load_values[i]
        print(f"{t:4.1f}   {dist[i]:15.2e}   {ms:19.1e}   {mf:13.1e}")

    x = basis.grid.nodes
    print("\n   t   p(0) spectral   p(0) FD   p(0.5) spectral   p(0.5) FD")
    for i, t in enumerate(times):
        a = [np.interp(xp, x, f.p[i]) for f in (spectral, fd) for xp in (0.0, 0.5)]
        print(f"{t:4.1f}   {a[0]:13.4f}   {a[2]:7.4f}   {a[1]:15.4f}   {a[3]:9.4f}")


if __name__ == "__main__":
    main()
