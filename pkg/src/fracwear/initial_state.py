r"""Initial pressure and indentation of a punch pressed into the layer.

At :math:`t = 0` the pressure solves

.. math::

    \eta p_0(x) + \int_{-a}^{a} K(x - \xi) p_0(\xi)\,d\xi = \delta_0 - \Delta(x),
    \qquad \int_{-a}^{a} p_0 = P_0.

For :math:`\eta = 0` and the logarithmic kernel the solution is explicit,

.. math::

    p_0(x) = \frac{1}{\pi^2\sqrt{a^2 - x^2}}\left[
        \mathrm{PV}\!\int_{-a}^{a} \frac{\sqrt{a^2-\xi^2}\,\Delta'(\xi)}{\xi - x}\,d\xi
        + \pi P_0\right],
    \qquad
    \delta_0 = \frac{1}{\pi}\int_{-a}^{a}\frac{\Delta(\xi)\,d\xi}{\sqrt{a^2-\xi^2}}
        + P_0\left(C_K - \log\frac{a}{2}\right).

The principal value is evaluated by expanding :math:`\Delta'(a\tau)` in
Chebyshev polynomials of the second kind and using
:math:`\mathrm{PV}\int_{-1}^{1}\sqrt{1-\tau^2}\,U_n(\tau)/(\tau - t)\,d\tau
= -\pi T_{n+1}(t)`.
For :math:`\eta > 0` the pair :math:`(p_0, \delta_0)` comes from a bordered
Galerkin system.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import integrate, linalg

from fracwear.spectrum import DiscreteOperators, KernelSpec, QuadratureGrid, SpectralBasis

logger = logging.getLogger(__name__)


class ContractError(ValueError):
    """Raised when an input violates the preconditions of a closed form."""


# {{{ punch profiles


@dataclass(frozen=True)
class PunchProfile:
    """A punch shape :math:`\\Delta(x)` with its derivative.

    ``smooth`` declares that the shape is twice continuously differentiable,
    which the explicit :math:`\\eta = 0` solution requires.
    """

    shape: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    description: str = "custom"
    smooth: bool = True

    @classmethod
    def flat(cls, level: float = 0.0) -> PunchProfile:
        return cls(
            shape=lambda x: np.full_like(np.asarray(x, dtype=float), level),
            derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            description=f"flat({level:g})",
        )

    @classmethod
    def quadratic(cls, coefficient: float) -> PunchProfile:
        r""":math:`\Delta(x) = c x^2`."""
        return cls(
            shape=lambda x: coefficient * np.asarray(x, dtype=float) ** 2,
            derivative=lambda x: 2.0 * coefficient * np.asarray(x, dtype=float),
            description=f"quadratic({coefficient:g})",
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.shape(np.asarray(x, dtype=float)), dtype=float)


# }}}


# {{{ states


@dataclass(frozen=True)
class InitialState:
    """Initial pressure samples together with :math:`\\delta(0)` and :math:`P_0`."""

    grid: QuadratureGrid
    p0: np.ndarray
    delta0: float
    load: float
    square_integrable: bool
    #: evaluates p0 at arbitrary interior points when a closed form exists
    profile: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    @property
    def q0(self) -> np.ndarray:
        """Zero-mean part :math:`p_0 - P_0/(2a)`."""
        return self.p0 - self.load / (2.0 * self.grid.a)

    def mass(self) -> float:
        return float(self.grid.integrate(self.p0))


@dataclass(frozen=True)
class CoefficientSet:
    """Mode coefficients :math:`d_k^0 = \\langle q_0, \\varphi_k\\rangle`."""

    d0: np.ndarray
    d_perp0: float | None
    n_modes: int
    #: relative L2 residual of the truncated reconstruction of q0
    residual: float


# }}}


# {{{ principal value


def chebyshev_u_coefficients(
    func: Callable[[np.ndarray], np.ndarray], n_terms: int = 64
) -> np.ndarray:
    r"""Coefficients :math:`b_n` with :math:`f(\tau) \approx \sum_n b_n U_n(\tau)` on :math:`[-1, 1]`.

    Uses Gauss quadrature for the weight :math:`\sqrt{1 - \tau^2}`, which is
    exact for polynomials of degree below :math:`2m`.
    """
    m = n_terms + 1
    theta = np.arange(1, m + 1) * math.pi / (m + 1)
    tau = np.cos(theta)
    weights = math.pi / (m + 1) * np.sin(theta) ** 2
    values = np.asarray(func(tau), dtype=float)
    # U_n(cos th) = sin((n+1) th) / sin th
    u = np.sin(np.outer(np.arange(n_terms) + 1, theta)) / np.sin(theta)
    return (2.0 / math.pi) * (u * weights) @ values


def hilbert_weighted_derivative(
    punch: PunchProfile, a: float, x: np.ndarray, n_terms: int = 64
) -> np.ndarray:
    r""":math:`\mathrm{PV}\int_{-a}^{a}\sqrt{a^2-\xi^2}\,\Delta'(\xi)/(\xi - x)\,d\xi`.

    With :math:`\Delta'(a\tau) = \sum b_n U_n(\tau)` this is
    :math:`-a\pi\sum_n b_n T_{n+1}(x/a)`.
    """
    b = chebyshev_u_coefficients(lambda tau: punch.derivative(a * tau), n_terms)
    tail = np.max(np.abs(b[-4:])) if b.size > 4 else 0.0
    if tail > 1.0e-10 * max(np.max(np.abs(b)), 1.0):
        logger.warning("Chebyshev expansion of the punch slope has not converged (tail %.2e)", tail)
    t_coef = np.concatenate([[0.0], b])  # b_n multiplies T_{n+1}
    return -a * math.pi * cheb.chebval(np.asarray(x, dtype=float) / a, t_coef)


def principal_value_quad(
    func: Callable[[float], float], a: float, x: float
) -> float:
    r""":math:`\mathrm{PV}\int_{-a}^{a} f(\xi)/(\xi - x)\,d\xi` by Cauchy-weight adaptive quadrature."""
    return integrate.quad(func, -a, a, weight="cauchy", wvar=x, limit=400)[0]


# }}}


# {{{ projection onto the grid


def project_onto_grid(
    func: Callable[[np.ndarray], np.ndarray], grid: QuadratureGrid, order: int = 24
) -> np.ndarray:
    r"""Nodal values of the L2 projection of ``func`` onto the cell polynomials.

    Cell integrals use the substitution :math:`x = a\cos\theta`, so profiles
    behaving like :math:`(a^2 - x^2)^{\pm 1/2}` at the ends are integrated to
    full accuracy. Because the Lagrange basis sums to one, the quadrature of
    the result reproduces :math:`\int f` exactly.
    """
    a = grid.a
    r = grid.points_per_cell
    edges = np.linspace(-a, a, grid.n_cells + 1)
    theta_edges = np.arccos(np.clip(edges / a, -1.0, 1.0))
    gx, gw = np.polynomial.legendre.leggauss(order)
    ref_nodes = np.polynomial.legendre.leggauss(r)[0]

    # theta runs from pi (x=-a) down to 0 (x=a)
    th_lo, th_hi = theta_edges[1:], theta_edges[:-1]
    half = 0.5 * (th_hi - th_lo)
    theta = 0.5 * (th_lo + th_hi)[:, None] + half[:, None] * gx
    x = a * np.cos(theta)
    jac = a * np.sin(theta) * half[:, None] * gw
    values = np.asarray(func(x), dtype=float) * jac

    # Lagrange basis of each cell evaluated at the transformed points
    centers = 0.5 * (edges[:-1] + edges[1:])
    s = (x - centers[:, None]) / (0.5 * grid.h)
    basis = np.ones((grid.n_cells, order, r))
    for i in range(r):
        for j in range(r):
            if j != i:
                basis[:, :, i] *= (s - ref_nodes[j]) / (ref_nodes[i] - ref_nodes[j])

    moments = np.einsum("cq,cqi->ci", values, basis).ravel()
    return moments / grid.weights


# }}}


# {{{ eta = 0


def _check_log_kernel(kernel: KernelSpec) -> None:
    if kernel.kind != "log":
        raise ContractError("the explicit initial state needs the logarithmic kernel")
    if math.isclose(kernel.a, 2.0, rel_tol=0.0, abs_tol=1.0e-12):
        raise ContractError("a = 2 makes log(a/2) vanish and is excluded")


def initial_pressure_eta_zero(
    kernel: KernelSpec,
    punch: PunchProfile,
    load: float,
    grid: QuadratureGrid,
    n_terms: int = 64,
) -> InitialState:
    """Explicit initial state for :math:`\\eta = 0` and the logarithmic kernel.

    Raises
    ------
    ContractError
        For ``a = 2``, a non-logarithmic kernel, or a punch not marked smooth.
    """
    _check_log_kernel(kernel)
    if not punch.smooth:
        raise ContractError("the explicit solution needs a twice differentiable punch")
    if not load > 0:
        raise ValueError("load must be positive")
    a = kernel.a

    def numerator(x: np.ndarray) -> np.ndarray:
        return (hilbert_weighted_derivative(punch, a, x, n_terms) + math.pi * load) / math.pi**2

    def profile(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) >= a):
            raise ValueError("p0 is only evaluated strictly inside (-a, a)")
        return numerator(x) / np.sqrt(a * a - x * x)

    # int Delta / sqrt(a^2 - xi^2) by Gauss-Chebyshev of the first kind
    m = 4 * n_terms
    tau = np.cos((2 * np.arange(1, m + 1) - 1) * math.pi / (2 * m))
    mean_shape = float(np.mean(punch(a * tau)))  # (1/pi) int
    delta0 = mean_shape + load * (kernel.c_k - math.log(a / 2.0))

    ends = numerator(np.array([-a, a]))
    scale = max(float(np.max(np.abs(numerator(grid.nodes)))), load / math.pi)
    square_integrable = bool(np.all(np.abs(ends) <= 1.0e-8 * scale))

    return InitialState(
        grid=grid,
        p0=project_onto_grid(profile, grid),
        delta0=delta0,
        load=load,
        square_integrable=square_integrable,
        profile=profile,
    )


# }}}


# {{{ eta > 0


def initial_pressure_eta_pos(
    operators: DiscreteOperators,
    eta: float,
    punch: PunchProfile,
    load: float,
) -> InitialState:
    r"""Solve the bordered system for :math:`(p_0, \delta_0)` when :math:`\eta > 0`.

    In Galerkin form the equations read

    .. math::

        (\eta W + A) p - w\,\delta_0 = -W\Delta, \qquad w^T p = P_0.

    Raises
    ------
    numpy.linalg.LinAlgError
        If the bordered system is numerically singular.
    """
    if not eta > 0:
        raise ValueError("eta must be positive (use initial_pressure_eta_zero for eta = 0)")
    if not load > 0:
        raise ValueError("load must be positive")

    grid = operators.grid
    w = grid.weights
    n = grid.n

    system = np.zeros((n + 1, n + 1))
    system[:n, :n] = operators.galerkin_k + eta * np.diag(w)
    system[:n, n] = -w
    system[n, :n] = w
    rhs = np.concatenate([-w * punch(grid.nodes), [load]])

    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1.0e14:
        raise np.linalg.LinAlgError(f"bordered system is numerically singular (cond={cond:.2e})")

    sol = linalg.solve(system, rhs)
    return InitialState(
        grid=grid,
        p0=sol[:n],
        delta0=float(sol[n]),
        load=load,
        square_integrable=True,
    )


def initial_residual(
    operators: DiscreteOperators, eta: float, punch: PunchProfile, state: InitialState
) -> float:
    """Relative residual of the discrete initial equation."""
    lhs = eta * state.p0 + operators.apply_k(state.p0)
    rhs = state.delta0 - punch(operators.grid.nodes)
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1.0e-300))


# }}}


# {{{ prescribed profiles


def semicircle_profile(load: float, a: float) -> Callable[[np.ndarray], np.ndarray]:
    r""":math:`p_0(x) = \frac{2P_0}{\pi a^2}\sqrt{a^2 - x^2}`."""

    def profile(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 2.0 * load / (math.pi * a * a) * np.sqrt(np.maximum(a * a - x * x, 0.0))

    return profile


def prescribed_initial_profile(
    kind: str, load: float, grid: QuadratureGrid, delta0: float = 0.0
) -> InitialState:
    """Initial state from a prescribed analytic pressure profile.

    Only ``kind="semicircle"`` is provided. The indentation is not determined
    by a prescribed profile and defaults to 0.
    """
    if kind != "semicircle":
        raise ValueError(f"unknown profile kind: {kind!r}")
    if not load > 0:
        raise ValueError("load must be positive")
    profile = semicircle_profile(load, grid.a)
    return InitialState(
        grid=grid,
        p0=project_onto_grid(profile, grid),
        delta0=delta0,
        load=load,
        square_integrable=True,
        profile=profile,
    )


# }}}


# {{{ projection


def project_initial(
    state: InitialState,
    basis: SpectralBasis,
    n_modes: int | None = None,
    allow_singular: bool = False,
) -> CoefficientSet:
    """Coefficients of :math:`q_0` in the eigenbasis of :math:`K_2`.

    Raises
    ------
    ContractError
        If the state is not square integrable and ``allow_singular`` is false.
    """
    if not state.square_integrable and not allow_singular:
        raise ContractError(
            "initial pressure is not square integrable; pass allow_singular=True to project anyway"
        )
    if state.grid.n != basis.grid.n or not np.allclose(state.grid.nodes, basis.grid.nodes):
        raise ValueError("state and basis live on different grids")

    m = basis.n_modes if n_modes is None else n_modes
    if not 0 < m <= basis.n_modes:
        raise ValueError(f"n_modes must lie in [1, {basis.n_modes}]")

    grid = basis.grid
    q0 = state.q0
    d0 = grid.inner(basis.phi[:, :m], q0[:, None])
    d_perp0 = (
        float(grid.inner(q0, basis.null_vector)) if basis.null_vector is not None else None
    )

    recon = basis.phi[:, :m] @ d0
    if d_perp0 is not None:
        recon = recon + d_perp0 * basis.null_vector
    norm = grid.norm(q0)
    residual = grid.norm(q0 - recon) / norm if norm > 0 else 0.0

    return CoefficientSet(d0=d0, d_perp0=d_perp0, n_modes=m, residual=float(residual))


# }}}
