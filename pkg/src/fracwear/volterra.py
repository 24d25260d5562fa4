r"""Closed-form solutions of Abel-type Volterra equations on a time grid.

All equations share convolution kernels of the form

.. math::

    k(s) = C s^{\gamma-1} E_{\alpha,\gamma}(-c s^\alpha),

which covers the Riemann-Liouville power law (:math:`c = 0`), the
derivative kernel :math:`e_\alpha(s;\lambda)` and the rescaled kernel
:math:`\mu^{1/\alpha-1}\mathcal{E}_\alpha(\mu^{1/\alpha}s)
= -s^{\alpha-1}E_{\alpha,\alpha}(-\mu s^\alpha)`.
Convolutions with sampled data use product integration: the density is
linear on each cell and the kernel moments are exact.

:func:`volterra_oracle` discretizes the equations directly, without using
any of the closed forms, and is used to validate them.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import linalg, signal, special

from fracwear.special_functions import ml_kernel_integrals, mittag_leffler

# {{{ grids and sampled functions


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing time nodes starting at zero."""

    nodes: np.ndarray
    uniform: bool = field(init=False)

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("time grid must be a non-empty 1D array")
        if nodes[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("time grid nodes must be strictly increasing")

        steps = np.diff(nodes)
        uniform = bool(steps.size == 0 or np.allclose(steps, steps[0], rtol=1e-12, atol=0))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "uniform", uniform)

    @classmethod
    def uniform_grid(cls, t_end: float, n: int) -> TimeGrid:
        """Grid of *n* equispaced nodes on ``[0, t_end]``."""
        if n < 2 or not t_end > 0:
            raise ValueError("need at least two nodes and t_end > 0")
        return cls(np.linspace(0.0, t_end, n))

    @property
    def step(self) -> float:
        if not self.uniform:
            raise ValueError("grid is not uniform")
        return float(self.nodes[1] - self.nodes[0]) if self.nodes.size > 1 else 0.0

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class SampledFunction:
    """Samples of a function (and optionally its derivatives) on a grid."""

    grid: TimeGrid
    values: np.ndarray
    #: first derivative samples, when known analytically
    derivative: np.ndarray | None = None
    #: second derivative samples, when known analytically
    second_derivative: np.ndarray | None = None

    def __post_init__(self) -> None:
        for name in ("values", "derivative", "second_derivative"):
            v = getattr(self, name)
            if v is None:
                continue
            v = np.asarray(v, dtype=float)
            if v.shape != self.grid.nodes.shape:
                raise ValueError(f"{name} must have one sample per grid node")
            object.__setattr__(self, name, v)

    @classmethod
    def from_callable(
        cls,
        grid: TimeGrid,
        f: Callable[[np.ndarray], np.ndarray],
        df: Callable[[np.ndarray], np.ndarray] | None = None,
        d2f: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> SampledFunction:
        t = grid.nodes

        def sample(g: Callable[[np.ndarray], np.ndarray] | None) -> np.ndarray | None:
            if g is None:
                return None
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.broadcast_to(np.asarray(g(t), dtype=float), t.shape).copy()

        return cls(grid, sample(f), sample(df), sample(d2f))

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes


# }}}


# {{{ kernels and product integration


@dataclass(frozen=True)
class MlKernel:
    r"""The kernel :math:`k(s) = C s^{\gamma-1} E_{\alpha,\gamma}(-c s^\alpha)`."""

    alpha: float
    gam: float
    rate: float = 0.0
    scale: float = 1.0

    def __call__(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            return self.scale * s ** (self.gam - 1.0) * mittag_leffler(
                self.alpha, self.gam, -self.rate * s**self.alpha
            )

    def moments(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(int_0^s k, int_0^s sigma k(sigma) dsigma)``."""
        s = np.asarray(s, dtype=float)
        if self.rate == 0.0:
            g = self.gam
            a = s**g * special.rgamma(g + 1.0)
            b = s ** (g + 1.0) * g * special.rgamma(g + 2.0)
        else:
            a, b = ml_kernel_integrals(self.alpha, self.gam, self.rate, s)
        return self.scale * a, self.scale * b


def power_kernel(exponent: float) -> MlKernel:
    r"""The Riemann-Liouville kernel :math:`s^{\gamma - 1} / \Gamma(\gamma)`."""
    return MlKernel(alpha=1.0, gam=exponent, rate=0.0, scale=1.0)


def _cell_density(
    grid: TimeGrid, values: np.ndarray, antiderivative: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and slope of a cellwise linear model of the sampled density.

    The mean comes from the antiderivative samples when given (this is exact)
    and from the trapezoidal rule otherwise. Cells touching a non-finite
    sample (e.g. an integrable singularity at ``t = 0``) get zero slope.
    """
    h = np.diff(grid.nodes).reshape((-1,) + (1,) * (values.ndim - 1))
    left, right = values[:-1], values[1:]
    finite = np.isfinite(left) & np.isfinite(right)

    if antiderivative is not None:
        mean = np.diff(antiderivative) / h
    else:
        if not np.all(finite):
            raise ValueError("density samples must be finite")
        mean = 0.5 * (left + right)

    with np.errstate(invalid="ignore"):
        slope = np.where(finite, (right - left) / h, 0.0)
    return mean, slope


def product_convolution(
    kernel: MlKernel,
    grid: TimeGrid,
    values: np.ndarray,
    antiderivative: np.ndarray | None = None,
) -> np.ndarray:
    r"""Evaluate :math:`\int_0^{t_n} k(t_n - \tau) g(\tau)\,d\tau` at all nodes.

    The density :math:`g` is modelled as linear on each cell (see
    :func:`_cell_density`) and integrated exactly against the kernel.
    ``values`` may carry trailing axes (e.g. one column per space node), in
    which case every column is convolved on a uniform grid.
    """
    nodes = grid.nodes
    n = nodes.size
    values = np.asarray(values, dtype=float)
    out = np.zeros(values.shape)
    if n < 2:
        return out

    mean, slope = _cell_density(grid, values, antiderivative)

    if values.ndim > 1:
        if not grid.uniform:
            raise ValueError("column-wise convolution needs a uniform grid")
        h = grid.step
        a, b = kernel.moments(h * np.arange(n))
        da = np.diff(a)
        dc = (np.arange(1, n) - 0.5) * h * da - np.diff(b)
        shape = (-1,) + (1,) * (values.ndim - 1)
        out[1:] = (
            signal.oaconvolve(mean, da.reshape(shape), axes=0)[: n - 1]
            + signal.oaconvolve(slope, dc.reshape(shape), axes=0)[: n - 1]
        )
        return out

    if grid.uniform:
        h = grid.step
        a, b = kernel.moments(h * np.arange(n))
        da = np.diff(a)
        db = np.diff(b)
        # moment about the cell midpoint for the cell at lag m = 1, 2, ...
        m = np.arange(1, n)
        dc = (m - 0.5) * h * da - db

        out[1:] = np.convolve(mean, da)[: n - 1] + np.convolve(slope, dc)[: n - 1]
        return out

    # general grids: all pairwise lags
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    for i in range(1, n):
        t = nodes[i]
        s_hi = t - nodes[:i]
        s_lo = t - nodes[1 : i + 1]
        a_hi, b_hi = kernel.moments(s_hi)
        a_lo, b_lo = kernel.moments(np.maximum(s_lo, 0.0))
        da = a_hi - a_lo
        db = b_hi - b_lo
        out[i] = np.dot(mean[:i], da) + np.dot(slope[:i], (t - mid[:i]) * da - db)

    return out


# }}}


# {{{ closed-form solvers


def _require_grid(f: SampledFunction) -> None:
    if len(f.grid) < 2:
        raise ValueError("need a grid with at least two nodes")


def _power_terms(t: np.ndarray, exponent: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(t > 0, t ** np.where(t > 0, exponent, 0.0), np.nan)


def _singular_start(f: SampledFunction, values: np.ndarray) -> SampledFunction:
    """Mark the solution at ``t = 0`` as undefined."""
    values = np.array(values, dtype=float)
    values[0] = np.nan
    return SampledFunction(f.grid, values)


def solve_abel_second_kind(alpha: float, lam: float, f: SampledFunction) -> SampledFunction:
    r"""Solve :math:`u + \frac{\lambda}{\Gamma(\alpha)} \int_0^t (t-\tau)^{\alpha-1} u\,d\tau = f`.

    The solution is :math:`u = f + \int_0^t e_\alpha(t-\tau;\lambda) f(\tau)\,d\tau`.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return solve_script_e_second_kind(alpha, 0.0, lam, f)


def solve_script_e_second_kind(
    alpha: float, mu: float, lam: float, f: SampledFunction
) -> SampledFunction:
    r"""Solve the second kind equation with the rescaled kernel,

    .. math::

        u(t) - \lambda \mu^{1/\alpha - 1}
            \int_0^t \mathcal{E}_\alpha(\mu^{1/\alpha}(t-\tau)) u(\tau)\,d\tau = f(t).

    The solution is

    .. math::

        u = f - \lambda \int_0^t (t-\tau)^{\alpha-1}
            E_{\alpha,\alpha}(-(\mu+\lambda)(t-\tau)^\alpha) f(\tau)\,d\tau,

    which equals :math:`f + \frac{\lambda}{\mu+\lambda}\int e_\alpha(t-\tau;\mu+\lambda)f`
    and stays regular when :math:`\mu + \lambda = 0`. At :math:`\mu = 0` the
    equation is the Abel equation of the second kind.
    """
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    _require_grid(f)

    if lam == 0.0:
        return SampledFunction(f.grid, f.values.copy())

    kernel = MlKernel(alpha, alpha, rate=mu + lam, scale=-lam)
    return SampledFunction(f.grid, f.values + product_convolution(kernel, f.grid, f.values))


def solve_abel_first_kind(alpha: float, f: SampledFunction) -> SampledFunction:
    r"""Solve :math:`\frac{1}{\Gamma(\alpha)}\int_0^t (t-\tau)^{\alpha-1} u\,d\tau = f`, :math:`0<\alpha<1`.

    Uses

    .. math::

        u(t) = \frac{1}{\Gamma(1-\alpha)}\left[\frac{f(0)}{t^\alpha}
            + \int_0^t \frac{f'(\tau)}{(t-\tau)^\alpha}\,d\tau\right].

    The value at ``t = 0`` is returned as NaN.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if f.derivative is None:
        raise ValueError("first derivative samples are required")
    _require_grid(f)

    t = f.t
    conv = product_convolution(power_kernel(1.0 - alpha), f.grid, f.derivative, f.values)
    u = f.values[0] * _power_terms(t, -alpha) * special.rgamma(1.0 - alpha) + conv
    return _singular_start(f, u)


def solve_abel_first_kind_high(alpha: float, f: SampledFunction) -> SampledFunction:
    r"""Solve the Abel equation of the first kind for :math:`1 \le \alpha < 2`.

    Uses

    .. math::

        u(t) = \frac{1}{\Gamma(2-\alpha)}\left[-\frac{(\alpha-1)f(0)}{t^\alpha}
            + \frac{f'(0)}{t^{\alpha-1}}
            + \int_0^t \frac{f''(\tau)}{(t-\tau)^{\alpha-1}}\,d\tau\right],

    where :math:`1/\Gamma(2-\alpha) = \Gamma(\alpha)\sin(\pi(\alpha-1))/(\pi(\alpha-1))`.
    At :math:`\alpha = 1` this is :math:`u = f'`.
    """
    if not 1 <= alpha < 2:
        raise ValueError("alpha must lie in [1, 2)")
    if f.derivative is None or f.second_derivative is None:
        raise ValueError("first and second derivative samples are required")
    _require_grid(f)

    if alpha == 1.0:
        return _singular_start(f, f.derivative)

    t = f.t
    conv = product_convolution(
        power_kernel(2.0 - alpha), f.grid, f.second_derivative, f.derivative
    )
    u = (
        -(alpha - 1.0) * f.values[0] * _power_terms(t, -alpha)
        + f.derivative[0] * _power_terms(t, 1.0 - alpha)
    ) * special.rgamma(2.0 - alpha) + conv
    return _singular_start(f, u)


def solve_script_e_first_kind(alpha: float, mu: float, f: SampledFunction) -> SampledFunction:
    r"""Solve :math:`-\mu^{1/\alpha-1}\int_0^t \mathcal{E}_\alpha(\mu^{1/\alpha}(t-\tau)) u\,d\tau = f`.

    The Laplace transform of the kernel is :math:`1/(s^\alpha + \mu)`, so
    :math:`U = (s^\alpha + \mu) F`. For :math:`0 < \alpha < 1` this gives

    .. math::

        u = \mu f(t) + \frac{f(0)}{\Gamma(1-\alpha)t^\alpha}
            + \frac{1}{\Gamma(1-\alpha)} \int_0^t \frac{f'(\tau)}{(t-\tau)^\alpha}\,d\tau,

    and for :math:`1 \le \alpha < 2`,

    .. math::

        u = \mu f(t) - \frac{(\alpha-1) f(0)}{\Gamma(2-\alpha) t^\alpha}
            + \frac{f'(0)}{\Gamma(2-\alpha) t^{\alpha-1}}
            + \frac{1}{\Gamma(2-\alpha)} \int_0^t \frac{f''(\tau)}{(t-\tau)^{\alpha-1}}\,d\tau.

    That is, :math:`\mu f` plus the Abel solution of the same order.
    """
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    if mu < 0:
        raise ValueError("mu must be non-negative")

    if alpha < 1:
        base = solve_abel_first_kind(alpha, f)
    else:
        base = solve_abel_first_kind_high(alpha, f)
    u = base.values + mu * f.values

    return _singular_start(f, u)


# }}}


# {{{ oracle


def _cell_moments(
    kernel: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    edges: np.ndarray,
    order: int = 24,
) -> tuple[np.ndarray, np.ndarray]:
    """Zeroth and first moments of the kernel over ``[edges[i], edges[i+1]]``.

    The first cell (which touches the singularity at zero) uses Gauss-Jacobi
    quadrature with the weight ``s**exponent``; all others use Gauss-Legendre.
    """
    lo, hi = edges[:-1], edges[1:]
    width = hi - lo

    m0 = np.empty(lo.size)
    m1 = np.empty(lo.size)

    # first cell: s = h (1 + x) / 2, weight s^exponent
    x, w = special.roots_jacobi(order, 0.0, exponent)
    h = width[0]
    s = 0.5 * h * (1.0 + x)
    smooth = kernel(s) * s ** (-exponent)
    scale = (0.5 * h) ** (1.0 + exponent)
    m0[0] = scale * np.dot(w, smooth)
    m1[0] = scale * np.dot(w, smooth * s)

    if lo.size > 1:
        x, w = special.roots_legendre(order)
        s = 0.5 * (lo[1:, None] + hi[1:, None]) + 0.5 * width[1:, None] * x[None, :]
        k = kernel(s.ravel()).reshape(s.shape)
        m0[1:] = 0.5 * width[1:] * (k @ w)
        m1[1:] = 0.5 * width[1:] * ((k * s) @ w)

    return m0, m1


def _start_exponent(exponent: float, f: SampledFunction) -> float:
    """Leading power of a first kind solution at zero.

    A kernel like ``s**exponent`` and ``f ~ t**r`` give ``u ~ t**(r - 1 - exponent)``;
    ``r`` is the order of the first nonzero sample among ``f(0), f'(0), f''(0)``.
    """
    r = 3
    for order, samples in enumerate((f.values, f.derivative, f.second_derivative)):
        if samples is not None and samples[0] != 0.0:
            r = order
            break
    return r - 1.0 - exponent


def _quadratic_basis(xi: np.ndarray) -> np.ndarray:
    """Lagrange basis on the nodes 0, 1, 2, evaluated at ``xi`` (last axis = basis index)."""
    return np.stack(
        [0.5 * (xi - 1.0) * (xi - 2.0), -xi * (xi - 2.0), 0.5 * xi * (xi - 1.0)], axis=-1
    )


def _singular_weight_matrix(
    kernel: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    h: float,
    n: int,
    p: float,
    degree: Literal[1, 2] = 1,
    order: int = 24,
) -> np.ndarray:
    r"""Matrix ``M`` with :math:`(Mv)_i = \int_0^{t_i} k(t_i - \tau)\,\tau^p v(\tau)\,d\tau`.

    With ``degree=1`` ``v`` is piecewise linear, and on the first cell it is
    continued along the line through :math:`(t_1, v_1)` and :math:`(t_2, v_2)`.

    With ``degree=2`` row ``i`` interpolates ``v`` on the cell
    :math:`[t_j, t_{j+1}]` at ``j, j+1, j+2`` when ``j + 2 <= i`` and at
    ``i-2, i-1, i`` on the newest cell; the first cell continues the parabola
    through ``t_1, t_2, t_3``, and the newest cell of row 2 stays linear.
    This is accurate for applying ``M`` to known samples but makes the first
    kind solve unstable, so the oracle uses ``degree=1``.

    Column 0 is unused; rows 1 and 2 may reach one or two columns past the
    diagonal through the first cell. The factor :math:`\tau^p` breaks
    translation invariance, so every (row, cell) pair gets its own
    quadrature; the kernel itself is tabulated once per lag.
    """
    if degree not in (1, 2):
        raise ValueError("degree must be 1 or 2")
    mat = np.zeros((n, n))
    nodes = h * np.arange(n)

    # first cell, in xi = tau/h against tau^p = h^p xi^p: expand the
    # extrapolating polynomial in powers of xi
    moments = [
        h**p * _first_cell_weights(kernel, exponent, h, nodes[1:], p + q, order)
        for q in range(degree + 1)
    ]
    if degree == 1 or n < 4:
        # line through xi = 1, 2: v_1 (2 - xi) + v_2 (xi - 1)
        mat[1:, 1] = 2.0 * moments[0] - moments[1]
        if n > 2:
            mat[1:, 2] += moments[1] - moments[0]
    else:
        # parabola through xi = 1, 2, 3
        coef = {1: (3.0, -2.5, 0.5), 2: (-3.0, 4.0, -1.0), 3: (1.0, -1.5, 0.5)}
        for col, (c0, c1, c2) in coef.items():
            mat[1:, col] += c0 * moments[0] + c1 * moments[1] + c2 * moments[2]

    # newest cell [t_{i-1}, t_i] (i >= 2): Jacobi weight in s = t_i - tau
    x, w = special.roots_jacobi(order, 0.0, exponent)
    s = 0.5 * h * (1.0 + x)
    ks = kernel(s) * s ** (-exponent) * (0.5 * h) ** (1.0 + exponent) * w
    first_quadratic = 3 if degree == 2 else n
    i = np.arange(2, min(first_quadratic, n))
    if i.size:
        g = (nodes[i, None] - s[None, :]) ** p * ks[None, :]
        mat[i, i] += g @ ((h - s) / h)
        mat[i, i - 1] += g @ (s / h)
    i = np.arange(first_quadratic, n)
    if i.size:
        g = (nodes[i, None] - s[None, :]) ** p * ks[None, :]
        basis = _quadratic_basis(2.0 - s / h)
        for m in range(3):
            mat[i, i - 2 + m] += g @ basis[:, m]

    # older cells [t_j, t_{j+1}], 1 <= j <= i - 2: Gauss-Legendre
    ii, jj = np.tril_indices(n, k=-2)
    keep = jj >= 1
    ii, jj = ii[keep], jj[keep]
    if ii.size:
        x, w = special.roots_legendre(order)
        offset = 0.5 * h * (1.0 + x)
        # the kernel only sees s = lag * h - offset: tabulate it once per lag
        lags = np.arange(2, n)
        table = kernel((lags[:, None] * h - offset[None, :]).ravel()).reshape(lags.size, order)
        g = table[ii - jj - 2] * (nodes[jj, None] + offset[None, :]) ** p * (0.5 * h * w)[None, :]
        if degree == 1:
            frac = offset / h
            np.add.at(mat, (ii, jj), g @ (1.0 - frac))
            np.add.at(mat, (ii, jj + 1), g @ frac)
        else:
            basis = _quadratic_basis(offset / h)
            for m in range(3):
                np.add.at(mat, (ii, jj + m), g @ basis[:, m])
    return mat


def volterra_oracle(
    kernel: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    coefficient: float,
    f: SampledFunction,
    kind: Literal["first", "second"] = "second",
    kernel_derivative: Callable[[np.ndarray], np.ndarray] | None = None,
    start_exponent: float | None = None,
) -> SampledFunction:
    r"""Brute-force product-integration solve of a Volterra equation.

    Solves

    * ``kind="second"``: :math:`u + c \int_0^t k(t-\tau) u(\tau)\,d\tau = f`,
    * ``kind="first"``: :math:`c \int_0^t k(t-\tau) u(\tau)\,d\tau = f`,

    for a kernel behaving like :math:`s^{\text{exponent}}` at the origin,
    ``-1 < exponent < 1``. The kernel is only ever evaluated pointwise; the
    cell moments come from Gauss quadrature.

    The second kind equation uses a continuous piecewise linear ``u`` (product
    trapezoidal rule). First kind solutions are usually singular at
    ``t = 0``, so there ``u = t^p v`` with ``v`` piecewise linear (see
    :func:`_singular_weight_matrix`); the factor ``t^p`` is integrated
    exactly by Gauss quadrature. ``p`` is *start_exponent*,
    inferred from the leading nonzero value of ``f``, ``f'`` or ``f''`` at
    zero when not given. The value at ``t = 0`` is NaN.

    Bounded kernels (``exponent >= 0``) make the direct first kind
    discretization unstable. For those, *kernel_derivative* must be given and
    the equation is differentiated once in time,
    :math:`c\,k(0) u + c \int_0^t k'(t-\tau) u\,d\tau = f'`, which is of
    the second kind when :math:`k(0) \ne 0` and of the first kind with a weakly
    singular kernel when :math:`k(0) = 0`. This needs ``f.derivative``.

    Raises
    ------
    ValueError
        For non-uniform grids or exponents outside ``(-1, 1)``.
    ArithmeticError
        If the leading weight is too small for forward substitution.
    """
    if not f.grid.uniform:
        raise ValueError("the oracle needs a uniform grid")
    if not -1 < exponent < 1:
        raise ValueError("singularity exponent must lie in (-1, 1)")
    _require_grid(f)

    nodes = f.t
    n = nodes.size
    h = f.grid.step
    m0, m1 = _cell_moments(kernel, exponent, h * np.arange(n))

    # cell at lag m covers s in [(m-1) h, m h]; index m - 1 in m0, m1
    if kind == "second":
        # linear u on [t_{j}, t_{j+1}]: weights on the left and right nodes
        m = np.arange(1, n)
        right = (m * h * m0 - m1) / h
        left = m0 - right
        u = np.empty(n)
        u[0] = f.values[0]
        lead = 1.0 + coefficient * right[0]
        if abs(lead) < 1.0e-13:
            raise ArithmeticError("leading weight vanishes")

        for i in range(1, n):
            # cells j = 0 .. i-1 have lag i - j
            lags = i - np.arange(i)
            hist = np.dot(left[lags - 1], u[:i]) + np.dot(right[lags[:-1] - 1], u[1:i])
            u[i] = (f.values[i] - coefficient * hist) / lead

        return SampledFunction(f.grid, u)

    if kind == "first" and exponent >= 0:
        if kernel_derivative is None or f.derivative is None:
            raise ValueError(
                "bounded kernels need kernel_derivative and f.derivative"
            )
        k0 = float(kernel(np.array([0.0]))[0]) if exponent == 0 else 0.0
        if k0 != 0.0:
            return volterra_oracle(
                kernel_derivative, 0.0, 1.0 / k0,
                SampledFunction(f.grid, f.derivative / (coefficient * k0)),
            )
        if start_exponent is None:
            start_exponent = _start_exponent(exponent, f)
        df = SampledFunction(f.grid, f.derivative, f.second_derivative)
        return volterra_oracle(
            kernel_derivative, exponent - 1.0, coefficient, df, "first",
            start_exponent=start_exponent,
        )

    if kind == "first":
        p = _start_exponent(exponent, f) if start_exponent is None else start_exponent
        mat = _singular_weight_matrix(kernel, exponent, h, n, p)
        sub = coefficient * mat[1:, 1:]
        try:
            v = linalg.solve(sub, f.values[1:])
        except linalg.LinAlgError as exc:
            raise ArithmeticError("singular product-integration system") from exc
        u = np.empty(n)
        u[0] = np.nan
        u[1:] = nodes[1:] ** p * v
        return SampledFunction(f.grid, u)

    raise ValueError(f"unknown equation kind: {kind!r}")


def _first_cell_weights(
    kernel: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    h: float,
    t: np.ndarray,
    power: float,
    order: int = 24,
) -> np.ndarray:
    r"""Integrals :math:`\int_0^h k(t - \tau) (\tau/h)^p\,d\tau` for each ``t >= h``."""
    out = np.empty(t.size)
    # t = h: singular at both ends, so split at h/2 and give each half the
    # Jacobi weight of its own endpoint
    half = 0.5 * h
    x, w = special.roots_jacobi(order, 0.0, power)
    tau = 0.5 * half * (1.0 + x)
    lower = 0.5 * half * 2.0 ** (-power) * (half / h) ** power * np.dot(w, kernel(h - tau))
    x, w = special.roots_jacobi(order, 0.0, exponent)
    s = 0.5 * half * (1.0 + x)
    smooth = kernel(s) * s ** (-exponent) * ((h - s) / h) ** power
    upper = (0.5 * half) ** (1.0 + exponent) * np.dot(w, smooth)
    out[0] = lower + upper

    if t.size > 1:
        x, w = special.roots_jacobi(order, 0.0, power)
        tau = 0.5 * h * (1.0 + x)
        s = t[1:, None] - tau[None, :]
        k = kernel(s.ravel()).reshape(s.shape)
        out[1:] = 0.5 * h * 2.0 ** (-power) * (k @ w)
    return out


def residual(
    kernel: Callable[[np.ndarray], np.ndarray],
    exponent: float,
    coefficient: float,
    u: SampledFunction,
    f: SampledFunction,
    kind: Literal["first", "second"] = "second",
    start_exponent: float | None = None,
    t_min: float = 0.0,
) -> float:
    """Relative residual of a sampled solution, measured with oracle quadrature.

    The convolution uses a piecewise linear model of ``u`` except on the
    first cell, where solutions of these equations typically behave like a
    power of ``t``; there ``u`` is modelled as ``u(0) + d (t/h)^p`` (or
    ``d (t/h)^p`` when ``u(0)`` is not finite) with ``p`` fitted to the first
    two samples. First kind equations use the ``t^p v`` model of
    :func:`volterra_oracle` with piecewise quadratic ``v``.

    Returns ``max |lhs - f| / max |f|`` over the nodes with ``t > 0`` and
    ``t >= t_min``.
    """
    if not u.grid.uniform:
        raise ValueError("residual check needs a uniform grid")

    nodes = u.t
    n = nodes.size
    if n < 4:
        raise ValueError("residual check needs at least four nodes")
    h = u.grid.step
    scale = max(float(np.max(np.abs(f.values[1:]))), 1e-300)
    keep = (nodes > 0) & (nodes >= t_min)

    if kind == "first":
        p = _start_exponent(exponent, f) if start_exponent is None else start_exponent
        mat = _singular_weight_matrix(kernel, exponent, h, n, p, degree=2)
        v = np.zeros(n)
        v[1:] = u.values[1:] / nodes[1:] ** p
        lhs = coefficient * (mat @ v)
        return float(np.max(np.abs(lhs[keep] - f.values[keep])) / scale)

    m0, m1 = _cell_moments(kernel, exponent, h * np.arange(n))
    m = np.arange(1, n)
    right = (m * h * m0 - m1) / h
    left = m0 - right

    vals = u.values
    if math.isfinite(vals[0]):
        base, d1, d2 = vals[0], vals[1] - vals[0], vals[2] - vals[0]
    else:
        base, d1, d2 = 0.0, vals[1], vals[2]
    ratio = d2 / d1 if d1 != 0 else 2.0
    power = math.log2(ratio) if ratio > 0 else 1.0
    power = min(max(power, -0.95), 3.0)

    first = base * m0[: n - 1] + d1 * _first_cell_weights(
        kernel, exponent, h, nodes[1:], power
    )

    conv = np.zeros(n)
    conv[1:] = first
    for i in range(2, n):
        # cells j = 1 .. i-1 with lag i - j
        lags = i - np.arange(1, i)
        conv[i] += np.dot(left[lags - 1], vals[1:i]) + np.dot(right[lags - 1], vals[2 : i + 1])

    lhs = coefficient * conv + u.values
    return float(np.max(np.abs(lhs[keep] - f.values[keep])) / scale)


# }}}
