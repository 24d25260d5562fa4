r"""Gamma and Mittag-Leffler type functions on the real line.

The two-parameter Mittag-Leffler function

.. math::

    E_{\alpha,\beta}(z) = \sum_{k=0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)}

is evaluated for real :math:`z`, :math:`0 < \alpha < 2` and :math:`\beta > 0`
with three branches selected by the scaled magnitude
:math:`\rho = |z|^{1/\alpha}`:

* the power series for small :math:`\rho` (and for all positive arguments of
  moderate size, where there is no cancellation),
* a contour integral collapsed onto the negative real axis for intermediate
  :math:`\rho`,
* the algebraic asymptotic expansion for large :math:`\rho`.

For :math:`1 < \alpha < 2` and :math:`z < 0`, the integral and asymptotic
branches also carry the two complex-conjugate pole contributions
:math:`(2/\alpha)\,\mathrm{Re}[e^{s_*} s_*^{1-\beta}]` with
:math:`s_* = \rho e^{i\pi/\alpha}`, which decay only like
:math:`\exp(\rho\cos(\pi/\alpha))`.

The derived kernels used by the wear model are

.. math::

    e_\alpha(z;\lambda) = \frac{d}{dz} E_\alpha(-\lambda z^\alpha)
        = -\lambda z^{\alpha-1} E_{\alpha,\alpha}(-\lambda z^\alpha),
    \qquad
    \mathcal{E}_\alpha(z) = e_\alpha(z; 1).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate, special

Branch = Literal["exact", "series", "integral", "asymptotic", "closed_form"]

# exp-sinh quadrature nodes for the collapsed contour integral
_DE_STEP = 1.0 / 64.0
_DE_LEFT = -5.6
_DE_RIGHT = 4.2


@dataclass(frozen=True)
class MlEvalPolicy:
    """Branch selection for :func:`mittag_leffler`.

    The cutoffs are expressed in the scaled magnitude ``rho = |z|**(1/alpha)``,
    which controls both the cancellation in the power series (terms grow like
    ``exp(rho)``) and the remainder of the asymptotic expansion (roughly
    ``exp(-rho)``).
    """

    #: largest ``rho`` for which negative arguments use the power series
    series_cutoff: float = 5.0
    #: smallest ``rho`` for which negative arguments use the asymptotic series
    asymptotic_cutoff: float = 36.0
    #: positive arguments switch to the asymptotic form beyond this ``rho``
    positive_cutoff: float = 600.0
    #: requested relative accuracy, used for term truncation
    target_rel_tol: float = 1.0e-10
    #: hard cap on the number of power series terms
    max_series_terms: int = 4000

    def __post_init__(self) -> None:
        if not 0 < self.series_cutoff <= self.asymptotic_cutoff:
            raise ValueError("need 0 < series_cutoff <= asymptotic_cutoff")
        if self.target_rel_tol <= 0:
            raise ValueError("target_rel_tol must be positive")


DEFAULT_POLICY = MlEvalPolicy()


@dataclass(frozen=True)
class MlValue:
    """A single Mittag-Leffler evaluation with its branch and error estimate."""

    value: float
    branch: Branch
    est_rel_err: float


# {{{ gamma


def gamma(z: float) -> float:
    """Euler gamma function for real arguments.

    Raises
    ------
    ValueError
        At the poles ``z = 0, -1, -2, ...``.
    OverflowError
        If the result is not representable as a double.
    """
    z = float(z)
    if z <= 0 and z == math.floor(z):
        raise ValueError(f"gamma has a pole at z = {z:g}")

    return math.gamma(z)


# }}}


# {{{ parameter checks


def _check_parameters(alpha: float, beta: float) -> None:
    if not 0 < alpha < 2:
        raise ValueError(f"alpha must lie in (0, 2): got {alpha!r}")
    if not beta > 0:
        raise ValueError(f"beta must be positive: got {beta!r}")


# }}}


# {{{ branches


def _series(alpha: float, beta: float, z: np.ndarray, policy: MlEvalPolicy):
    """Power series; returns values and the estimated relative error."""
    result = np.empty_like(z)
    err = np.empty_like(z)
    eps = np.finfo(float).eps

    for i, zi in enumerate(z):
        if zi == 0.0:
            result[i] = special.rgamma(beta)
            err[i] = 0.0
            continue

        rho = abs(zi) ** (1.0 / alpha)
        nterms = int(math.ceil((2.0 * rho + 60.0) / alpha)) + 10
        if nterms > policy.max_series_terms:
            raise ArithmeticError(
                f"power series needs {nterms} terms (cap {policy.max_series_terms})"
            )

        k = np.arange(nterms, dtype=float)
        logterm = k * math.log(abs(zi)) - special.gammaln(alpha * k + beta)
        terms = np.exp(logterm)
        if zi < 0:
            terms[1::2] = -terms[1::2]

        value = math.fsum(terms)
        result[i] = value
        # rounding of the individual terms is the dominant error source
        scale = float(np.max(np.abs(terms)))
        err[i] = 4.0 * eps * math.sqrt(nterms) * scale / max(abs(value), 1e-300)

    return result, err


def _pole_terms(alpha: float, beta: float, rho: np.ndarray) -> np.ndarray:
    """Contribution of the poles at ``rho exp(+-i pi / alpha)`` for alpha > 1."""
    s = rho * np.exp(1j * np.pi / alpha)
    return (2.0 / alpha) * np.real(np.exp(s) * s ** (1.0 - beta))


def _de_nodes() -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(_DE_LEFT, _DE_RIGHT + _DE_STEP / 2, _DE_STEP)
    u = 0.5 * np.pi * np.sinh(t)
    v = np.exp(u)
    w = _DE_STEP * 0.5 * np.pi * np.cosh(t) * v
    return v, w


_DE_V, _DE_W = _de_nodes()


def _sinpi(x: float) -> float:
    """``sin(pi x)`` with the argument reduced first, accurate near integers."""
    n = round(x)
    return (-1.0) ** n * math.sin(math.pi * (x - n))


def _cospi(x: float) -> float:
    n = round(x)
    return (-1.0) ** n * math.cos(math.pi * (x - n))


def _cut_density(alpha: float, beta: float, v: np.ndarray) -> np.ndarray:
    """Non-exponential part of the collapsed contour integrand."""
    num = v * _sinpi(beta) + _sinpi(beta - alpha)
    den = v * v + 2.0 * v * _cospi(alpha) + 1.0
    return v ** ((1.0 - beta) / alpha) * num / den


def _quad(f: Callable[[float], float], lo: float, hi: float, points: list[float] | None = None):
    # full_output keeps quad from warning; the error estimate is returned instead
    out = integrate.quad(f, lo, hi, points=points, limit=400, epsabs=0, epsrel=1e-12, full_output=1)
    return out[0], out[1]


def _cut_integral_adaptive(alpha: float, beta: float, rho: float) -> tuple[float, float]:
    r"""Collapsed contour integral when :math:`\sin\pi\alpha` is small.

    The rational factor has poles at :math:`x_0 \pm i y` with
    :math:`x_0 = -\cos\pi\alpha`, :math:`y = \sin\pi\alpha`. For
    :math:`\alpha` near 1 they pinch the path at :math:`v \approx 1`, so on
    :math:`[0, 2x_0]` the linear Taylor model of the smooth factor around
    :math:`x_0` is subtracted and integrated in closed form (its odd parts
    vanish on the symmetric window). Returns the integral and a relative error
    estimate.
    """

    def smooth(v: float) -> float:
        return math.exp(-rho * v ** (1.0 / alpha)) * v ** ((1.0 - beta) / alpha)

    def full(v: float) -> float:
        return math.exp(-rho * v ** (1.0 / alpha)) * float(_cut_density(alpha, beta, np.array([v]))[0])

    x0 = -_cospi(alpha)
    if x0 <= 0.5:
        # alpha near 0 or 2: the poles sit near v = -1, away from the path
        a, ea = _quad(full, 0.0, 1.0)
        b, eb = _quad(full, 1.0, math.inf)
        return a + b, (ea + eb) / max(abs(a + b), 1e-300)

    y = abs(_sinpi(alpha))
    s_b = _sinpi(beta)
    # s_b x0 + sin(pi (beta - alpha)), rewritten without cancellation
    c = -_sinpi(alpha) * _cospi(beta)
    g0 = smooth(x0)
    slope = -(rho / alpha) * x0 ** (1.0 / alpha - 1.0) + (1.0 - beta) / (alpha * x0)
    g1 = g0 * slope
    rx = rho * x0 ** (1.0 / alpha)

    def remainder(v: float) -> float:
        u = v - x0
        # g(v) - g0 - g1 u through the change of the exponent, so the rounding
        # error is O(u) and stays bounded against the 1/(u^2 + y^2) factor
        lr = math.log1p(u / x0)
        dphi = -rx * math.expm1(lr / alpha) + (1.0 - beta) / alpha * lr
        return g0 * (math.expm1(dphi) - slope * u) * (s_b * u + c) / (u * u + y * y)

    # int (g0 + g1 u)(s_b u + c) / (u^2 + y^2) over |u| <= x0; alpha = 1 itself
    # never gets here, so y > 0
    i0 = 2.0 * math.atan(x0 / y) / y
    local = g0 * c * i0 + g1 * s_b * (2.0 * x0 - y * y * i0)
    # the remainder still has structure on the scale y around x0
    marks = [x0 + k * y for k in (-100.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 100.0)]
    a, ea = _quad(remainder, 0.0, 2.0 * x0, points=[m for m in marks if 0.0 < m < 2.0 * x0])
    b, eb = _quad(full, 2.0 * x0, math.inf)
    total = a + local + b
    return total, (ea + eb) / max(abs(total), 1e-300) + 1.0e-15


def _integral(alpha: float, beta: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r"""Collapsed Hankel contour integral for negative arguments.

    For :math:`z = -x < 0`, :math:`\rho = x^{1/\alpha}` and
    :math:`\beta < 1 + \alpha`,

    .. math::

        E_{\alpha,\beta}(-x) = \frac{\rho^{1-\beta}}{\pi\alpha}
            \int_0^\infty e^{-\rho v^{1/\alpha}} v^{(1-\beta)/\alpha}
            \frac{v \sin\pi\beta + \sin\pi(\beta-\alpha)}
                 {v^2 + 2 v \cos\pi\alpha + 1} \,dv

    plus the pole terms when :math:`\alpha > 1`.
    """
    rho = np.abs(z) ** (1.0 / alpha)
    prefactor = rho ** (1.0 - beta) / (np.pi * alpha)

    if abs(math.sin(np.pi * alpha)) > 0.25:
        density = _cut_density(alpha, beta, _DE_V) * _DE_W
        expo = np.exp(-np.outer(rho, _DE_V ** (1.0 / alpha)))
        values = prefactor * (expo @ density)
        err = np.full_like(values, 1.0e-13)
    else:
        values = np.empty_like(rho)
        err = np.empty_like(rho)
        for i, r in enumerate(rho):
            values[i], err[i] = _cut_integral_adaptive(alpha, beta, float(r))
        values = prefactor * values

    if alpha > 1:
        poles = _pole_terms(alpha, beta, rho)
        total = values + poles
        # the two parts can cancel; refer both error sources to the sum
        scale = np.maximum(np.abs(total), 1e-300)
        err = (err * np.abs(values) + 1.0e-15 * np.abs(poles)) / scale
        values = total

    return values, err


def _asymptotic(
    alpha: float, beta: float, z: np.ndarray, policy: MlEvalPolicy
) -> tuple[np.ndarray, np.ndarray]:
    r"""Asymptotic expansion :math:`-\sum_k z^{-k} / \Gamma(\beta - \alpha k)`."""
    result = np.empty_like(z)
    err = np.empty_like(z)

    k = np.arange(1, 600, dtype=float)
    for i, zi in enumerate(z):
        rho = abs(zi) ** (1.0 / alpha)
        logz = math.log(abs(zi))
        # |1/Gamma(beta - alpha k)| <= Gamma(1 + alpha k - beta) / pi for large k;
        # truncate where this smooth envelope is smallest
        envelope = special.gammaln(np.maximum(1.0 + alpha * k - beta, 1.0)) - k * logz
        kmax = int(np.argmin(envelope)) + 1
        small = np.nonzero(envelope[:kmax] < math.log(1.0e-18))[0]
        if small.size:
            kmax = int(small[0]) + 1

        kk = k[:kmax]
        sign = np.where(zi > 0, 1.0, (-1.0) ** kk)
        terms = -sign * np.exp(-kk * logz) * special.rgamma(beta - alpha * kk)
        total = math.fsum(terms)
        tail = math.exp(envelope[kmax - 1]) / math.pi if kmax < k.size else 0.0

        if zi > 0:
            total += rho ** (1.0 - beta) * math.exp(rho) / alpha
        elif alpha > 1:
            total += float(_pole_terms(alpha, beta, np.array([rho]))[0])

        result[i] = total
        err[i] = tail / max(abs(total), 1e-300)

    return result, err


def _alpha_one(beta: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed forms of the one-parameter case alpha = 1."""
    if beta == 1.0:
        return np.exp(z), np.full_like(z, 1.0e-15)

    if beta == math.floor(beta) and beta <= 8:
        # E_{1,m}(z) = (e^z - sum_{k<m-1} z^k/k!) / z^{m-1}, stable for |z| > 1
        m = int(beta)
        values = np.empty_like(z)
        small = np.abs(z) <= 1.0
        if np.any(small):
            values[small], _ = _series(1.0, beta, z[small], DEFAULT_POLICY)
        zl = z[~small]
        acc = np.expm1(zl)
        for k in range(1, m - 1):
            acc = acc - zl**k / math.factorial(k)
        values[~small] = acc / zl ** (m - 1)
        return values, np.full_like(z, 1.0e-14)

    # Kummer transformation keeps the hypergeometric argument positive
    values = np.where(
        z >= 0,
        special.hyp1f1(1.0, beta, z),
        np.exp(z) * special.hyp1f1(beta - 1.0, beta, -z),
    ) * special.rgamma(beta)
    return values, np.full_like(z, 1.0e-13)


# }}}


# {{{ mittag_leffler


def _reduce_beta(alpha: float, beta: float) -> int:
    """Number of downward recurrence steps keeping the contour integral regular."""
    steps = 0
    while beta > 1.0 + 0.75 * alpha and beta - alpha > 0:
        beta -= alpha
        steps += 1
    return steps


def _evaluate(
    alpha: float, beta: float, z: np.ndarray, policy: MlEvalPolicy
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = np.empty_like(z)
    errors = np.empty_like(z)
    branch = np.empty(z.shape, dtype=object)

    if alpha == 1.0:
        values[:], errors[:] = _alpha_one(beta, z)
        branch[:] = "closed_form"
        branch[z == 0] = "exact"
        return values, errors, branch

    rho = np.abs(z) ** (1.0 / alpha)
    is_zero = z == 0
    is_series = ~is_zero & (
        ((z < 0) & (rho <= policy.series_cutoff))
        | ((z > 0) & (rho <= policy.positive_cutoff))
    )
    is_asym = ~is_zero & ~is_series & (
        (z > 0) | (rho >= policy.asymptotic_cutoff)
    )
    is_integral = ~is_zero & ~is_series & ~is_asym

    values[is_zero] = special.rgamma(beta)
    errors[is_zero] = 0.0
    branch[is_zero] = "exact"

    if np.any(is_series):
        values[is_series], errors[is_series] = _series(alpha, beta, z[is_series], policy)
        branch[is_series] = "series"

    if np.any(is_asym):
        values[is_asym], errors[is_asym] = _asymptotic(alpha, beta, z[is_asym], policy)
        branch[is_asym] = "asymptotic"

    if np.any(is_integral):
        zi = z[is_integral]
        steps = _reduce_beta(alpha, beta)
        b = beta - steps * alpha
        vi, ei = _integral(alpha, b, zi)
        # E_{a,b+a}(z) = (E_{a,b}(z) - 1/Gamma(b)) / z
        for _ in range(steps):
            vi = (vi - special.rgamma(b)) / zi
            b += alpha
        values[is_integral] = vi
        errors[is_integral] = ei
        branch[is_integral] = "integral"

    return values, errors, branch


def mittag_leffler(
    alpha: float,
    beta: float,
    z: float | np.ndarray,
    policy: MlEvalPolicy | None = None,
) -> float | np.ndarray:
    r"""Two-parameter Mittag-Leffler function :math:`E_{\alpha,\beta}(z)`.

    Parameters
    ----------
    alpha
        Order in :math:`(0, 2)`.
    beta
        Second parameter, :math:`\beta > 0`.
    z
        Real argument (scalar or array).
    policy
        Branch selection; defaults to :data:`DEFAULT_POLICY`.

    Returns
    -------
    float or numpy.ndarray
        Values with the same shape as *z*.
    """
    _check_parameters(alpha, beta)
    policy = DEFAULT_POLICY if policy is None else policy

    zarr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(zarr)):
        raise ValueError("argument must be finite")

    values, _, _ = _evaluate(float(alpha), float(beta), zarr.ravel(), policy)
    values = values.reshape(zarr.shape)
    return float(values) if values.ndim == 0 else values


def mittag_leffler_info(
    alpha: float, beta: float, z: float, policy: MlEvalPolicy | None = None
) -> MlValue:
    """Evaluate :math:`E_{\\alpha,\\beta}(z)` at a scalar and report the branch."""
    _check_parameters(alpha, beta)
    policy = DEFAULT_POLICY if policy is None else policy
    if not math.isfinite(z):
        raise ValueError("argument must be finite")

    values, errors, branch = _evaluate(
        float(alpha), float(beta), np.array([float(z)]), policy
    )
    return MlValue(
        value=float(values[0]),
        branch=branch[0],
        est_rel_err=float(max(errors[0], np.finfo(float).eps)),
    )


# }}}


# {{{ derived kernels


def _check_positive(z: np.ndarray) -> None:
    if np.any(z <= 0):
        raise ValueError("kernel is only defined for positive arguments")


def ml_e(
    alpha: float, lam: float, z: float | np.ndarray
) -> float | np.ndarray:
    r"""Derivative kernel :math:`e_\alpha(z;\lambda) = \frac{d}{dz}E_\alpha(-\lambda z^\alpha)`.

    Only defined for :math:`z > 0`; it is integrably singular at the origin
    when :math:`\alpha < 1`.
    """
    zarr = np.asarray(z, dtype=float)
    _check_positive(zarr)

    za = zarr**alpha
    values = -lam * zarr ** (alpha - 1.0) * mittag_leffler(alpha, alpha, -lam * za)
    return float(values) if np.ndim(values) == 0 else values


def ml_script_e(alpha: float, z: float | np.ndarray) -> float | np.ndarray:
    r"""The kernel :math:`\mathcal{E}_\alpha(z) = e_\alpha(z; 1)`."""
    return ml_e(alpha, 1.0, z)


def ml_script_e_antiderivative(
    alpha: float, lam: float, z0: float | np.ndarray
) -> float | np.ndarray:
    r"""Closed-form integral of the rescaled kernel.

    .. math::

        \int_0^{z_0} \mathcal{E}_\alpha(\lambda^{1/\alpha} z)\,dz
            = \lambda^{-1/\alpha}\left[E_\alpha(-\lambda z_0^\alpha) - 1\right],
        \qquad \lambda > 0.
    """
    if not lam > 0:
        raise ValueError(f"lam must be positive: got {lam!r}")

    z0arr = np.asarray(z0, dtype=float)
    if np.any(z0arr < 0):
        raise ValueError("upper limit must be non-negative")

    values = lam ** (-1.0 / alpha) * (
        mittag_leffler(alpha, 1.0, -lam * z0arr**alpha) - 1.0
    )
    return float(values) if np.ndim(values) == 0 else values


def ml_kernel_integrals(
    alpha: float, gam: float, rate: float, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    r"""Running moments of the kernel :math:`k(s) = s^{\gamma-1} E_{\alpha,\gamma}(-c s^\alpha)`.

    Returns

    .. math::

        A(s) = \int_0^s k = s^\gamma E_{\alpha,\gamma+1}(-c s^\alpha),
        \qquad
        B(s) = \int_0^s \sigma k(\sigma)\,d\sigma
             = s A(s) - s^{\gamma+1} E_{\alpha,\gamma+2}(-c s^\alpha).

    With ``rate = 0`` this is the power law :math:`s^{\gamma-1}/\Gamma(\gamma)`.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("moments need non-negative arguments")

    arg = -rate * s**alpha
    first = s**gam * mittag_leffler(alpha, gam + 1.0, arg)
    second = s * first - s ** (gam + 1.0) * mittag_leffler(alpha, gam + 2.0, arg)
    return first, second


# }}}
