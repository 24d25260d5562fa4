"""Closed-form convolution solvers next to a brute-force solve.

Each solver handles one Abel-type or Mittag-Leffler-type Volterra equation
with a known resolvent. The script solves with f(t) = t^2 on [0, 5] and
prints the largest difference to the product-integration oracle, together
with the residual obtained by substituting the solution back.

Run with ``python3 demos/volterra_tour.py``.
"""

from __future__ import annotations

import math

import numpy as np

from fracwear.special_functions import mittag_leffler
from fracwear.volterra import (
    SampledFunction,
    TimeGrid,
    residual,
    solve_abel_first_kind,
    solve_abel_second_kind,
    solve_script_e_first_kind,
    solve_script_e_second_kind,
    volterra_oracle,
)

MU, LAM = 1.2, 0.7


def main() -> None:
    grid = TimeGrid.uniform_grid(5.0, 400)
    f = SampledFunction.from_callable(grid, lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t)
    print("alpha  solver               max|u - oracle|/max|u|   residual")
    for alpha in (0.6, 1.0, 1.2, 1.8):
        power = lambda s, a=alpha: s ** (a - 1.0) / math.gamma(a)  # noqa: E731
        ml = lambda s, a=alpha: s ** (a - 1.0) * mittag_leffler(a, a, -MU * s**a)  # noqa: E731
        cases = [
            ("abel, 2nd kind", solve_abel_second_kind(alpha, LAM, f), power, LAM, "second"),
            ("ML, 2nd kind", solve_script_e_second_kind(alpha, MU, LAM, f), ml, LAM, "second"),
        ]
        if alpha < 1:
            cases += [
                ("abel, 1st kind", solve_abel_first_kind(alpha, f), power, 1.0, "first"),
                ("ML, 1st kind", solve_script_e_first_kind(alpha, MU, f), ml, 1.0, "first"),
            ]
        for name, u, kern, coef, kind in cases:
            oracle = volterra_oracle(kern, alpha - 1.0, coef, f, kind)
            m = grid.nodes > 0
            err = np.max(np.abs(u.values[m] - oracle.values[m])) / np.max(np.abs(oracle.values[m]))
            res = residual(kern, alpha - 1.0, coef, u, f, kind)
            print(f"{alpha:5.1f}  {name:19s}  {err:22.2e}   {res:8.1e}")


if __name__ == "__main__":
    main()
