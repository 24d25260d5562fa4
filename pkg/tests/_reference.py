"""Reference configuration shared by the test modules."""

from __future__ import annotations

import numpy as np

from fracwear.evolution import ModelParams

REF = {"a": 1.0, "eta": 1.0, "nu": 2.0, "mu": 1.2, "alpha": 0.6}
C_K = 1.6
P0, P1, T0 = 6.0, 10.0, 0.5
N_SPACE = 200
N_MODES = 60


def params_with(**override: float) -> ModelParams:
    return ModelParams(**{**REF, **override})


def interior_rel_l2(grid, p: np.ndarray, ref: np.ndarray, fraction: float = 0.9) -> float:
    """Relative L2 distance over the central ``fraction`` of the contact."""
    w = grid.weights * (np.abs(grid.nodes) <= fraction * grid.a)
    return float(np.sqrt(((p - ref) ** 2) @ w) / np.sqrt((ref**2) @ w))
