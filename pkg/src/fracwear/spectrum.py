r"""Contact kernels on :math:`(-a, a)` and the spectrum of the reduced operator.

For an even kernel :math:`K` the integrated kernel and the reduced kernel are

.. math::

    K_1(x) = \int_{-a}^{a} K(\zeta - x)\,d\zeta,
    \qquad
    K_2(x, \xi) = K(x - \xi) - \frac{K_1(x)}{2a} - \frac{K_1(\xi)}{2a},

and :math:`\int K_2(x, \xi)\,dx = c_0 = -\frac{1}{2a}\int K_1` for every
:math:`\xi`. On functions with zero mean the quadratic forms of :math:`K` and
:math:`K_2` coincide, so the eigenvalues :math:`\sigma_n` of :math:`K_2` on
that subspace interlace with the eigenvalues :math:`\lambda_n` of :math:`K`.

The logarithmic kernel is :math:`K_0(x) = -\log|x| + C_K` with
:math:`C_K > \log a`.

Discretization is a Galerkin method with discontinuous piecewise polynomials
on uniform cells. Functions are represented by their values at the Gauss
points of each cell, so the Galerkin mass matrix is the diagonal matrix of
Gauss weights and every operator can be written in a symmetric form
:math:`W^{-1/2} A W^{-1/2}`. Constants lie in the trial space, which makes the
discrete :math:`c_0` exact.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate, linalg

logger = logging.getLogger(__name__)


class ModelAssumptionError(RuntimeError):
    """Raised when a discretized operator violates a structural assumption."""


# {{{ kernels


@dataclass(frozen=True)
class KernelSpec:
    """An even contact kernel on the interval ``(-a, a)``.

    ``kind="log"`` is :math:`-\\log|x| + C_K`; ``kind="tabulated"`` linearly
    interpolates ``table_k`` at ``|x|`` over the abscissas ``table_x``
    (which must start at 0 and cover ``[0, 2a]``).
    """

    a: float
    kind: Literal["log", "tabulated"] = "log"
    c_k: float = 0.0
    table_x: np.ndarray | None = None
    table_k: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.a > 0:
            raise ValueError("half-width a must be positive")
        if self.kind == "log":
            if not self.c_k > math.log(self.a):
                raise ValueError(f"need C_K > log(a) = {math.log(self.a):.6g}")
        elif self.kind == "tabulated":
            if self.table_x is None or self.table_k is None:
                raise ValueError("tabulated kernels need table_x and table_k")
            tx = np.asarray(self.table_x, dtype=float)
            tk = np.asarray(self.table_k, dtype=float)
            if tx.shape != tk.shape or tx.ndim != 1 or tx.size < 2:
                raise ValueError("kernel table must be two 1D arrays of equal length")
            if tx[0] != 0.0 or np.any(np.diff(tx) <= 0) or tx[-1] < 2 * self.a:
                raise ValueError("table abscissas must increase from 0 to at least 2a")
            if not np.all(np.isfinite(tk)):
                raise ValueError("kernel table must be finite")
            object.__setattr__(self, "table_x", tx)
            object.__setattr__(self, "table_k", tk)
        else:
            raise ValueError(f"unknown kernel kind: {self.kind!r}")

    @classmethod
    def log_kernel(cls, a: float, c_k: float) -> KernelSpec:
        return cls(a=a, kind="log", c_k=c_k)

    @classmethod
    def tabulated(cls, a: float, table_x: np.ndarray, table_k: np.ndarray) -> KernelSpec:
        return cls(a=a, kind="tabulated", table_x=table_x, table_k=table_k)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        ax = np.abs(np.asarray(x, dtype=float))
        if self.kind == "log":
            with np.errstate(divide="ignore"):
                return -np.log(ax) + self.c_k
        return np.interp(ax, self.table_x, self.table_k)

    def square_integrable(self) -> bool:
        """Numerical check that :math:`\\iint K(x - \\xi)^2` over the square is finite."""
        if self.kind == "log":
            return True
        a = self.a
        # int_{-a}^{a} int_{-a}^{a} K(x - xi)^2 = int_{-2a}^{2a} (2a - |u|) K(u)^2 du
        val = integrate.quad(
            lambda u: (2 * a - u) * float(self(np.array([u]))[0]) ** 2,
            0.0,
            2 * a,
            limit=200,
        )[0]
        return bool(np.isfinite(val))


def k1_profile(kernel: KernelSpec, x: float | np.ndarray) -> float | np.ndarray:
    r"""The integrated kernel :math:`K_1(x) = \int_{-a}^a K(\zeta - x)\,d\zeta`.

    For the logarithmic kernel,
    :math:`K_1(x) = 2aC_K + 2a - (a-x)\log(a-x) - (a+x)\log(a+x)`.
    """
    xa = np.asarray(x, dtype=float)
    a = kernel.a
    if np.any(np.abs(xa) >= a):
        raise ValueError("K1 is only evaluated strictly inside (-a, a)")

    if kernel.kind == "log":
        values = (
            2.0 * a * kernel.c_k
            + 2.0 * a
            - (a - xa) * np.log(a - xa)
            - (a + xa) * np.log(a + xa)
        )
    else:
        flat = xa.ravel()
        values = np.empty_like(flat)
        for i, xi in enumerate(flat):
            values[i] = integrate.quad(
                lambda z, xi=xi: float(kernel(np.array([z - xi]))[0]),
                -a,
                a,
                points=[xi],
                limit=200,
            )[0]
        values = values.reshape(xa.shape)

    return float(values) if values.ndim == 0 else values


def c0_constant(kernel: KernelSpec) -> float:
    r"""The constant :math:`c_0 = -\frac{1}{2a}\int_{-a}^a K_1(x)\,dx`.

    For the logarithmic kernel this is :math:`-(2aC_K + 3a - 2a\log 2a)`.
    """
    a = kernel.a
    if kernel.kind == "log":
        return -(2.0 * a * kernel.c_k + 3.0 * a - 2.0 * a * math.log(2.0 * a))

    total = integrate.quad(lambda x: float(k1_profile(kernel, x)), -a, a, limit=200)[0]
    return -total / (2.0 * a)


# }}}


# {{{ grid


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre points of ``n_cells`` uniform cells on ``(-a, a)``.

    Parameters
    ----------
    a
        Half-width of the interval.
    n_cells
        Number of uniform cells.
    points_per_cell
        Gauss points per cell; the trial space is polynomials of degree
        ``points_per_cell - 1`` on each cell.
    """

    a: float
    n_cells: int
    points_per_cell: int = 3

    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_cells < 1 or self.points_per_cell < 1:
            raise ValueError("need at least one cell and one point per cell")
        ref_x, ref_w = np.polynomial.legendre.leggauss(self.points_per_cell)
        h = self.h
        centers = -self.a + h * (np.arange(self.n_cells) + 0.5)
        nodes = (centers[:, None] + 0.5 * h * ref_x).ravel()
        weights = np.tile(0.5 * h * ref_w, self.n_cells)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def with_nodes(cls, a: float, n: int, points_per_cell: int = 3) -> QuadratureGrid:
        """Grid with at least ``n`` nodes (rounded up to whole cells)."""
        return cls(a, -(-n // points_per_cell), points_per_cell)

    @property
    def n(self) -> int:
        return self.n_cells * self.points_per_cell

    @property
    def h(self) -> float:
        return 2.0 * self.a / self.n_cells

    def inner(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Quadrature inner product along the first axis."""
        return np.tensordot(self.weights, np.asarray(f) * np.asarray(g), axes=(0, 0))

    def integrate(self, f: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, np.asarray(f), axes=(0, 0))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.inner(f, f)))

    def reflect(self, f: np.ndarray) -> np.ndarray:
        """Samples of ``f(-x)`` (the node set is symmetric)."""
        return np.asarray(f)[::-1]


# }}}


# {{{ galerkin assembly


def _overlap_polynomials(p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    r"""Coefficients in :math:`v` of :math:`\int s^p (s - v)^q\,ds` over the cell overlap.

    With unit cells centered at 0, the overlap for shift :math:`v \in [0, 1]`
    is :math:`s \in [v - 1/2, 1/2]` and for :math:`v \in [-1, 0]` it is
    :math:`s \in [-1/2, v + 1/2]`.
    """

    def antideriv_at(lo_coef: np.ndarray, hi_coef: np.ndarray) -> np.ndarray:
        out = np.zeros(1)
        for k in range(q + 1):
            m = p + q - k
            coef = math.comb(q, k) * (-1.0) ** k / (m + 1)
            term = npoly.polysub(npoly.polypow(hi_coef, m + 1), npoly.polypow(lo_coef, m + 1))
            out = npoly.polyadd(out, coef * npoly.polymul(term, npoly.polypow([0.0, 1.0], k)))
        return out

    right = antideriv_at(np.array([-0.5, 1.0]), np.array([0.5]))
    left = antideriv_at(np.array([-0.5]), np.array([0.5, 1.0]))
    return right, left


def _neg_log_moment(m: int, lo: float, hi: float) -> float:
    r""":math:`\int_{lo}^{hi} -u^m \log|u|\,du` in closed form."""

    def prim(u: float) -> float:
        if u == 0.0:
            return 0.0
        return -(u ** (m + 1)) / (m + 1) * (math.log(abs(u)) - 1.0 / (m + 1))

    return prim(hi) - prim(lo)


def _log_cell_moments(degree: int, n_cells: int, n_gauss: int = 24) -> np.ndarray:
    r"""Monomial moments of :math:`-\log|x - \xi|` between unit cells.

    Returns ``J[d + n_cells - 1, p, q]`` for the integral over two unit cells
    with center offset ``d`` of :math:`s^p t^q (-\log|d + s - t|)`.
    """
    r = degree + 1
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    lags = np.arange(-(n_cells - 1), n_cells, dtype=float)
    out = np.zeros((lags.size, r, r))

    far = np.abs(lags) > 2
    near_idx = np.nonzero(~far)[0]
    # Gauss nodes on each half of the shift interval
    v_right = 0.5 + 0.5 * gx
    v_left = -0.5 + 0.5 * gx
    log_right = -np.log(np.abs(lags[far, None] + v_right))
    log_left = -np.log(np.abs(lags[far, None] + v_left))

    for p in range(r):
        for q in range(r):
            right, left = _overlap_polynomials(p, q)
            wr = 0.5 * gw * npoly.polyval(v_right, right)
            wl = 0.5 * gw * npoly.polyval(v_left, left)
            out[far, p, q] = log_right @ wr + log_left @ wl

            for i in near_idx:
                d = lags[i]
                total = 0.0
                for poly, (lo, hi) in ((right, (0.0, 1.0)), (left, (-1.0, 0.0))):
                    # rewrite W(v) as a polynomial in u = d + v
                    shifted = np.zeros(1)
                    for k, ck in enumerate(poly):
                        shifted = npoly.polyadd(shifted, ck * npoly.polypow([-d, 1.0], k))
                    total += sum(
                        c * _neg_log_moment(m, d + lo, d + hi) for m, c in enumerate(shifted)
                    )
                out[i, p, q] = total

    return out


def _generic_cell_moments(
    kernel: KernelSpec, degree: int, n_cells: int, h: float, n_gauss: int = 24
) -> np.ndarray:
    """Monomial moments of a sampled kernel between cells of width ``h``."""
    r = degree + 1
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    lags = np.arange(-(n_cells - 1), n_cells, dtype=float)
    v_right = 0.5 + 0.5 * gx
    v_left = -0.5 + 0.5 * gx
    k_right = kernel(h * (lags[:, None] + v_right))
    k_left = kernel(h * (lags[:, None] + v_left))

    out = np.zeros((lags.size, r, r))
    for p in range(r):
        for q in range(r):
            right, left = _overlap_polynomials(p, q)
            out[:, p, q] = k_right @ (0.5 * gw * npoly.polyval(v_right, right)) + k_left @ (
                0.5 * gw * npoly.polyval(v_left, left)
            )
    return out


def _galerkin_matrix(kernel: KernelSpec, grid: QuadratureGrid) -> np.ndarray:
    r"""Galerkin matrix :math:`\iint L_i(x) K(x - \xi) L_j(\xi)` in the nodal basis."""
    r = grid.points_per_cell
    nc = grid.n_cells
    h = grid.h
    degree = r - 1

    # moments of monomials s^p over a unit cell centered at 0
    mono = np.array([(0.5 ** (p + 1) - (-0.5) ** (p + 1)) / (p + 1) for p in range(r)])

    if kernel.kind == "log":
        moments = _log_cell_moments(degree, nc)
        moments = moments + (kernel.c_k - math.log(h)) * np.outer(mono, mono)
    else:
        moments = _generic_cell_moments(kernel, degree, nc, h)
    moments *= h * h

    # monomials -> Lagrange basis at the Gauss points of the unit cell
    ref_x = 0.5 * np.polynomial.legendre.leggauss(r)[0]
    to_lagrange = np.linalg.inv(np.vander(ref_x, r, increasing=True)).T
    blocks = np.einsum("ip,lpq,jq->lij", to_lagrange, moments, to_lagrange)

    idx = np.arange(nc)
    lag_index = idx[:, None] - idx[None, :] + nc - 1
    full = blocks[lag_index]  # (nc, nc, r, r)
    matrix = full.transpose(0, 2, 1, 3).reshape(nc * r, nc * r)
    return 0.5 * (matrix + matrix.T)


# }}}


# {{{ discretization


@dataclass(frozen=True)
class DiscreteOperators:
    r"""Discrete forms of :math:`K` and :math:`K_2` on a :class:`QuadratureGrid`.

    ``matrix_k`` and ``matrix_k2`` are the symmetric forms
    :math:`W^{-1/2} A W^{-1/2}` of the Galerkin matrices; :meth:`apply_k`
    and :meth:`apply_k2` act on nodal samples.
    """

    kernel: KernelSpec
    grid: QuadratureGrid
    galerkin_k: np.ndarray
    galerkin_k2: np.ndarray
    #: nodal samples of the L2 projection of K1
    k1: np.ndarray
    #: the constant column integral of K2 (exact for constants in the trial space)
    c0: float

    @cached_property
    def _sqrt_w(self) -> np.ndarray:
        return np.sqrt(self.grid.weights)

    @cached_property
    def matrix_k(self) -> np.ndarray:
        s = self._sqrt_w
        return self.galerkin_k / np.outer(s, s)

    @cached_property
    def matrix_k2(self) -> np.ndarray:
        s = self._sqrt_w
        return self.galerkin_k2 / np.outer(s, s)

    @cached_property
    def operator_k(self) -> np.ndarray:
        """Nodal matrix of :math:`f \\mapsto \\int K(x - \\xi) f(\\xi)\\,d\\xi`."""
        return self.galerkin_k / self.grid.weights[:, None]

    @cached_property
    def operator_k2(self) -> np.ndarray:
        return self.galerkin_k2 / self.grid.weights[:, None]

    @cached_property
    def kernel_k2_samples(self) -> np.ndarray:
        """Nodal samples of :math:`K_2(x_i, \\xi_j)` (projected)."""
        w = self.grid.weights
        return self.galerkin_k2 / np.outer(w, w)

    def apply_k(self, f: np.ndarray) -> np.ndarray:
        return self.operator_k @ f

    def apply_k2(self, f: np.ndarray) -> np.ndarray:
        return self.operator_k2 @ f


def discretize(
    kernel: KernelSpec, n: int = 200, points_per_cell: int = 3
) -> DiscreteOperators:
    """Assemble the discrete :math:`K` and :math:`K_2`.

    Parameters
    ----------
    n
        Requested node count, rounded up to a whole number of cells.
    points_per_cell
        Gauss points per cell (polynomial degree plus one).
    """
    if n < 16:
        raise ValueError("need N >= 16 for a meaningful spectrum")

    grid = QuadratureGrid.with_nodes(kernel.a, n, points_per_cell)
    a = kernel.a
    w = grid.weights

    galerkin_k = _galerkin_matrix(kernel, grid)
    # (A 1)_i = int L_i K1, so A 1 / w are the nodal values of the projection
    k1_moments = galerkin_k.sum(axis=1)
    k1 = k1_moments / w
    c0 = -float(k1_moments.sum()) / (2.0 * a)

    galerkin_k2 = galerkin_k - (np.outer(k1_moments, w) + np.outer(w, k1_moments)) / (2.0 * a)
    galerkin_k2 = 0.5 * (galerkin_k2 + galerkin_k2.T)

    return DiscreteOperators(
        kernel=kernel,
        grid=grid,
        galerkin_k=galerkin_k,
        galerkin_k2=galerkin_k2,
        k1=k1,
        c0=c0,
    )


# }}}


# {{{ eigendecomposition


@dataclass(frozen=True)
class SpectralBasis:
    r"""Eigenpairs of :math:`K_2` on zero-mean functions.

    ``phi[:, k]`` holds :math:`\varphi_{k+1}` at the grid nodes, normalized in
    the quadrature inner product; ``sigma`` is non-increasing.
    """

    operators: DiscreteOperators
    sigma: np.ndarray
    phi: np.ndarray
    lambda_k: np.ndarray
    #: mode loads l_k = <K1, phi_k>
    loads: np.ndarray
    null_vector: np.ndarray | None = None
    null_load: float = 0.0

    @property
    def grid(self) -> QuadratureGrid:
        return self.operators.grid

    @property
    def k1(self) -> np.ndarray:
        return self.operators.k1

    @property
    def c0(self) -> float:
        return self.operators.c0

    @property
    def a(self) -> float:
        return self.operators.kernel.a

    @property
    def n_modes(self) -> int:
        return int(self.sigma.size)

    def truncated(self, n_modes: int) -> SpectralBasis:
        """Keep the leading ``n_modes`` modes."""
        if not 0 < n_modes <= self.sigma.size:
            raise ValueError(f"can keep between 1 and {self.sigma.size} modes")
        return replace(
            self,
            sigma=self.sigma[:n_modes],
            phi=self.phi[:, :n_modes],
            loads=self.loads[:n_modes],
        )

    def project(self, f: np.ndarray) -> np.ndarray:
        """Coefficients ``<f, phi_k>``."""
        return self.grid.inner(self.phi, np.asarray(f)[:, None])


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the first non-negligible component of each column positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        big = np.nonzero(np.abs(col) > 1.0e-8 * np.max(np.abs(col)))[0]
        if big.size and col[big[0]] < 0:
            out[:, k] = -col
    return out


def mode_loads(basis: SpectralBasis, k1: np.ndarray | None = None) -> SpectralBasis:
    """Recompute the loads ``l_k = <K1, phi_k>`` (optionally for another profile)."""
    profile = basis.k1 if k1 is None else np.asarray(k1, dtype=float)
    loads = basis.project(profile)
    null_load = (
        float(basis.grid.inner(profile, basis.null_vector))
        if basis.null_vector is not None
        else 0.0
    )
    return replace(basis, loads=loads, null_load=null_load)


def eigendecompose(
    operators: DiscreteOperators, null_tol: float = 1.0e-8
) -> SpectralBasis:
    """Eigenpairs of the discrete :math:`K_2` restricted to zero-mean functions.

    The constant direction is removed with an orthonormal basis of its
    weighted complement, so the reduced problem stays symmetric. Modes with
    ``|sigma| < null_tol * sigma_1`` are treated as null modes; at most one is
    allowed.

    Raises
    ------
    ModelAssumptionError
        If two or more null modes are found.
    """
    grid = operators.grid
    sqrt_w = np.sqrt(grid.weights)

    complement = linalg.null_space(sqrt_w[None, :])
    reduced = complement.T @ operators.matrix_k2 @ complement
    reduced = 0.5 * (reduced + reduced.T)
    sigma, vecs = linalg.eigh(reduced)
    order = np.argsort(sigma)[::-1]
    sigma = sigma[order]
    phi = _fix_signs((complement @ vecs[:, order]) / sqrt_w[:, None])

    lambda_k = np.sort(linalg.eigvalsh(operators.matrix_k))[::-1]

    scale = max(abs(sigma[0]), np.finfo(float).tiny)
    is_null = np.abs(sigma) < null_tol * scale
    if np.count_nonzero(is_null) >= 2:
        raise ModelAssumptionError(
            f"found {np.count_nonzero(is_null)} null modes of K2; at most one is allowed"
        )

    null_vector = None
    if np.any(is_null):
        idx = int(np.nonzero(is_null)[0][0])
        null_vector = phi[:, idx]
        logger.info("null mode of K2 found (sigma = %.3e)", sigma[idx])
        keep = ~is_null
        sigma, phi = sigma[keep], phi[:, keep]

    basis = SpectralBasis(
        operators=operators,
        sigma=sigma,
        phi=phi,
        lambda_k=lambda_k,
        loads=np.zeros(sigma.size),
        null_vector=null_vector,
    )
    return mode_loads(basis)


def compute_spectrum(kernel: KernelSpec, n: int = 200) -> SpectralBasis:
    """Discretize and decompose in one step."""
    return eigendecompose(discretize(kernel, n))


# }}}


# {{{ diagnostics


def sigma_bound(kernel: KernelSpec) -> float:
    r"""Upper bound :math:`a\pi\log 2 + 2a(C_K + |\log a|)` on :math:`\sigma_1` for the log kernel."""
    if kernel.kind != "log":
        raise ValueError("the bound is only available for the logarithmic kernel")
    a = kernel.a
    return a * math.pi * math.log(2.0) + 2.0 * a * (kernel.c_k + abs(math.log(a)))


def parity_residuals(basis: SpectralBasis) -> np.ndarray:
    """Distance of each mode from being exactly even or odd (sup norm, relative)."""
    phi = basis.phi
    mirrored = basis.grid.reflect(phi)
    scale = np.max(np.abs(phi), axis=0)
    even = np.max(np.abs(phi - mirrored), axis=0)
    odd = np.max(np.abs(phi + mirrored), axis=0)
    return np.minimum(even, odd) / scale


def mode_parity(basis: SpectralBasis) -> np.ndarray:
    """``+1`` for even modes and ``-1`` for odd modes."""
    phi = basis.phi
    mirrored = basis.grid.reflect(phi)
    even = np.max(np.abs(phi - mirrored), axis=0)
    odd = np.max(np.abs(phi + mirrored), axis=0)
    return np.where(even <= odd, 1, -1)


def spectrum_diagnostics(
    basis: SpectralBasis, kernel: KernelSpec | None = None, tol: float = 1.0e-8
) -> dict:
    """Structural checks on a computed spectrum, as a JSON-friendly dict."""
    kernel = basis.operators.kernel if kernel is None else kernel
    grid = basis.grid
    sigma = basis.sigma
    lam = basis.lambda_k

    nmax = min(sigma.size, lam.size - 1)
    upper = sigma[:nmax] - lam[:nmax]
    lower = lam[1 : nmax + 1] - sigma[:nmax]
    interlacing_violation = float(max(np.max(upper), np.max(lower), 0.0))

    gram = basis.phi.T @ (grid.weights[:, None] * basis.phi)
    ortho = float(np.max(np.abs(gram - np.eye(sigma.size))))
    means = np.abs(grid.integrate(basis.phi))

    ncheck = np.arange(1, max(grid.n // 4, 1) + 1)
    ncheck = ncheck[ncheck <= sigma.size]
    n_sigma = ncheck * sigma[: ncheck.size]
    window = (ncheck >= 10) & (ncheck <= 40)

    report = {
        "n_nodes": grid.n,
        "sigma_1": float(sigma[0]),
        "sigma_min": float(np.min(sigma)),
        "lambda_min": float(np.min(lam)),
        "psd": bool(np.min(sigma) >= -1.0e-10 and np.min(lam) >= -1.0e-10),
        "interlacing_max_violation": interlacing_violation,
        "interlacing": interlacing_violation <= tol,
        "orthonormality_error": ortho,
        "zero_mean_max": float(np.max(means)),
        "parity_residual_max": float(np.max(parity_residuals(basis))),
        "null_mode": basis.null_vector is not None,
        "n_sigma": [float(v) for v in n_sigma],
    }
    if np.any(window):
        report["n_sigma_ratio_10_40"] = float(
            np.max(n_sigma[window]) / np.min(n_sigma[window])
        )
    if kernel.kind == "log":
        bound = sigma_bound(kernel)
        report["sigma_1_bound"] = bound
        report["sigma_1_within_bound"] = bool(sigma[0] <= bound + 1.0e-6)

    return report


# }}}
