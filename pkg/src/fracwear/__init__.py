"""Spectral solution of a contact wear problem with fractional hereditary wear.

Modules
-------
special_functions
    Gamma and the Mittag-Leffler family.
volterra
    Abel and Mittag-Leffler kernel Volterra equations, product integration.
spectrum
    Discrete contact operators and the eigenbasis of the zero-mean part.
initial_state
    Initial pressure and indentation, projection onto the eigenbasis.
evolution
    Pressure, wear and indentation histories.
stationary
    Large-time limits and decay fits.
fd_reference
    Direct time-marching reference solver.
cli
    Command-line front end.

The package namespace stays light so that ``fracwear --threads`` can set the
BLAS thread count before numpy loads.
"""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
