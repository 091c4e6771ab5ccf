r"""The integral with respect to :math:`(d\tau)^\alpha`.

For a continuous :math:`f` and :math:`0 < \alpha \le 1`,

.. math::

    \int_0^t f(\tau) (d\tau)^\alpha
        = \alpha \int_0^t (t - \tau)^{\alpha - 1} f(\tau) \, d\tau
        = \Gamma(\alpha + 1) \, I^\alpha f(t),

where :math:`I^\alpha` is the Riemann-Liouville fractional integral.  It is
*not* the limit of Riemann sums :math:`\sum f(s_i) (\Delta s_i)^\alpha`; see
:mod:`dtalpha.riemann_probe` for what that reading produces.

Symbolic integrands (constants, powers, the Dirac delta) are evaluated in
closed form.  Anything else goes through one of two numerical schemes:

``substitution``
    :math:`s = (t - \tau)^\alpha` turns the integral into
    :math:`\int_0^{t^\alpha} f(t - s^{1/\alpha}) \, ds`, whose integrand is
    bounded, and hands it to adaptive Gauss-Kronrod.
``gauss_jacobi``
    keeps the kernel and absorbs it into a Gauss-Jacobi weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence, Union

import numpy as np

from . import specialfn
from .errors import ConvergenceError, DomainError, NumericRefusalError
from .quadrature import (
    QuadratureResult,
    adaptive_gk15,
    vectorize,
    weakly_singular_quad,
)

__all__ = [
    "FractionalOrder",
    "Constant",
    "Power",
    "DiracDelta",
    "Function",
    "Integrand",
    "QuadratureConfig",
    "QuadratureResult",
    "jumarie_integral",
    "closed_form",
    "riemann_liouville",
    "prefix_profile",
    "kernel_integral",
]


@dataclass(frozen=True)
class FractionalOrder:
    """Order ``alpha`` in ``(0, 1]``.

    With ``strict=True`` the order must also satisfy ``alpha < 1``, which is
    what computations at the complementary order ``1 - alpha`` need.
    """

    alpha: float
    strict: bool = False

    def __post_init__(self) -> None:
        a = self.alpha
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise DomainError(f"order must be a real number, got {a!r}")
        a = float(a)
        object.__setattr__(self, "alpha", a)
        if not math.isfinite(a) or not 0.0 < a <= 1.0:
            raise DomainError(f"order must lie in (0, 1], got {a!r}")
        if self.strict and a >= 1.0:
            raise DomainError(f"order must lie in (0, 1) here, got {a!r}")

    def complement(self) -> FractionalOrder:
        """The order ``1 - alpha``; only defined for ``alpha < 1``."""
        if self.alpha >= 1.0:
            raise DomainError("the complementary order 1 - alpha vanishes at alpha = 1")
        return FractionalOrder(1.0 - self.alpha)


def as_order(alpha: FractionalOrder | float) -> FractionalOrder:
    return alpha if isinstance(alpha, FractionalOrder) else FractionalOrder(alpha)


# {{{ integrands


@dataclass(frozen=True)
class Constant:
    c: float = 1.0

    def __call__(self, tau):
        return np.full(np.shape(tau), float(self.c)) if np.ndim(tau) else float(self.c)


@dataclass(frozen=True)
class Power:
    """``tau ** gamma_exp`` with ``gamma_exp > -1``."""

    gamma_exp: float

    def __post_init__(self) -> None:
        g = float(self.gamma_exp)
        if not math.isfinite(g) or g <= -1.0:
            raise DomainError(f"power exponent must be > -1, got {g!r}")
        object.__setattr__(self, "gamma_exp", g)

    def __call__(self, tau):
        tau = np.maximum(np.asarray(tau, dtype=float), 0.0)
        g = self.gamma_exp
        if g == 0.0:
            out = np.ones_like(tau)
        else:
            # log space away from 0, the limit value at 0
            with np.errstate(divide="ignore"):
                out = np.where(
                    tau > 0.0,
                    np.exp(g * np.log(np.where(tau > 0.0, tau, 1.0))),
                    0.0 if g > 0.0 else math.inf,
                )
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class DiracDelta:
    """The Dirac delta at the origin.  Only usable symbolically."""

    def __call__(self, tau):
        raise NumericRefusalError("the Dirac delta has no pointwise values")


@dataclass(frozen=True)
class Function:
    """A black-box integrand, finite on the integration interval.

    ``f`` may accept arrays; if it does not, it is applied elementwise.
    ``smoothness`` is a hint only (``"smooth"`` or ``"continuous"``).
    """

    f: Callable
    smoothness: Literal["smooth", "continuous"] = "smooth"

    def __post_init__(self) -> None:
        if self.smoothness not in ("smooth", "continuous"):
            raise DomainError(f"unknown smoothness hint {self.smoothness!r}")

    def __call__(self, tau):
        return self.f(tau)


Integrand = Union[Constant, Power, DiracDelta, Function]


def as_integrand(f) -> Integrand:
    if isinstance(f, (Constant, Power, DiracDelta, Function)):
        return f
    if isinstance(f, (int, float)) and not isinstance(f, bool):
        return Constant(float(f))
    if callable(f):
        return Function(f)
    raise DomainError(f"cannot interpret {f!r} as an integrand")


# }}}


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and scheme for the numerical paths.

    ``force_numeric`` sends constants and powers through quadrature instead
    of their closed forms (the Dirac delta is refused in that case).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_evals: int = 100_000
    scheme: Literal["substitution", "gauss_jacobi"] = "substitution"
    force_numeric: bool = False

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("tolerances must be positive")
        if self.max_evals < 15:
            raise DomainError("max_evals must be at least 15")
        if self.scheme not in ("substitution", "gauss_jacobi"):
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")


DEFAULT_CONFIG = QuadratureConfig()


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"t must be finite and >= 0, got {t!r}")
    return t


def closed_form(f: Integrand, alpha: FractionalOrder | float, t: float) -> float:
    """Exact value of the integral for the symbolic integrand kinds.

    * ``Constant(c)`` gives ``c t^alpha``;
    * ``Power(g)`` gives ``Gamma(alpha+1) Gamma(g+1) / Gamma(alpha+g+1) t^(alpha+g)``;
    * ``DiracDelta()`` gives ``alpha t^(alpha-1)``.
    """
    a = as_order(alpha).alpha
    t = _check_time(t)
    if isinstance(f, Constant):
        return float(f.c) * t**a
    if isinstance(f, Power):
        g = f.gamma_exp
        if t == 0.0:
            return 0.0
        # Gamma(a+1) Gamma(g+1) / Gamma(a+g+1) = a B(a, g+1)
        coeff = a * specialfn.beta(a, g + 1.0)
        return coeff * t ** (a + g)
    if isinstance(f, DiracDelta):
        if t == 0.0:
            if a < 1.0:
                raise DomainError("alpha t^(alpha-1) is singular at t = 0 for alpha < 1")
            return 1.0
        return a * t ** (a - 1.0)
    raise DomainError(f"no closed form for {type(f).__name__}")


def kernel_integral(
    f: Integrand,
    alpha: FractionalOrder | float,
    t: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    breakpoints: Sequence[float] | None = None,
) -> QuadratureResult:
    """Numerically compute ``int_0^t (t - tau)^(alpha-1) f(tau) dtau``.

    ``breakpoints`` are abscissae in ``[0, t]`` where ``f`` may have kinks.
    """
    a = as_order(alpha).alpha
    t = _check_time(t)
    if isinstance(f, DiracDelta):
        raise NumericRefusalError("numerical quadrature cannot integrate a Dirac delta")
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    fv = vectorize(f)

    if cfg.scheme == "gauss_jacobi":
        return weakly_singular_quad(
            fv, t, 1.0 - a,
            rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_evals=cfg.max_evals,
            breakpoints=breakpoints,
        )

    inv = 1.0 / a

    def g(s: np.ndarray) -> np.ndarray:
        return fv(np.maximum(t - np.power(s, inv), 0.0))

    upper = t**a
    points = None
    if breakpoints is not None:
        points = [(t - p) ** a for p in breakpoints if 0.0 < p < t]
    res = adaptive_gk15(
        g, 0.0, upper,
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol / a, max_evals=cfg.max_evals,
        breakpoints=points,
    )
    # ds = alpha (t - tau)^(alpha - 1) dtau
    return QuadratureResult(res.value * inv, res.error_estimate * inv, res.evals, res.converged)


def jumarie_integral(
    f: Integrand | Callable | float,
    alpha: FractionalOrder | float,
    t: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    breakpoints: Sequence[float] | None = None,
) -> QuadratureResult:
    r"""Evaluate :math:`\int_0^t f(\tau)(d\tau)^\alpha = \alpha\int_0^t(t-\tau)^{\alpha-1}f(\tau)d\tau`.

    Symbolic kinds return their closed form with a zero error estimate
    unless ``cfg.force_numeric`` is set.  Quadrature that exhausts its
    budget is reported through ``converged=False``, not raised.

    >>> jumarie_integral(Constant(1.0), 0.5, 1.0).value
    1.0
    """
    f = as_integrand(f)
    order = as_order(alpha)
    t = _check_time(t)
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    if isinstance(f, (Constant, Power, DiracDelta)) and not cfg.force_numeric:
        return QuadratureResult(closed_form(f, order, t), 0.0, 0, True)
    res = kernel_integral(f, order, t, cfg, breakpoints=breakpoints)
    a = order.alpha
    return QuadratureResult(a * res.value, a * res.error_estimate, res.evals, res.converged)


def riemann_liouville(
    f: Integrand | Callable | float,
    alpha: FractionalOrder | float,
    t: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    breakpoints: Sequence[float] | None = None,
) -> QuadratureResult:
    r"""Riemann-Liouville integral :math:`\frac{1}{\Gamma(\alpha)}\int_0^t(t-\tau)^{\alpha-1}f(\tau)d\tau`.

    Related to :func:`jumarie_integral` by a factor of :math:`\Gamma(\alpha+1)`.
    """
    f = as_integrand(f)
    a = as_order(alpha).alpha
    t = _check_time(t)
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)
    if isinstance(f, (Constant, Power, DiracDelta)) and not cfg.force_numeric:
        if isinstance(f, Constant):
            value = f.c * t**a / specialfn.gamma(a + 1.0)
        elif isinstance(f, Power):
            g = f.gamma_exp
            value = specialfn.gamma(g + 1.0) / specialfn.gamma(a + g + 1.0) * t ** (a + g)
        else:
            value = t ** (a - 1.0) / specialfn.gamma(a)
        return QuadratureResult(value, 0.0, 0, True)
    res = kernel_integral(f, a, t, cfg, breakpoints=breakpoints)
    scale = 1.0 / specialfn.gamma(a)
    return QuadratureResult(scale * res.value, scale * res.error_estimate, res.evals, res.converged)


def prefix_profile(
    f: Integrand | Callable | float,
    alpha: FractionalOrder | float,
    grid: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    *,
    breakpoints: Sequence[float] | None = None,
) -> list[QuadratureResult]:
    """``[jumarie_integral(f, alpha, t) for t in grid]`` for an ascending grid from 0.

    Every point is computed on its own.  A point that fails to converge
    raises :class:`ConvergenceError` carrying its grid index.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or grid[0] != 0.0:
        raise DomainError("grid must be a non-empty 1-d array starting at 0")
    if np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be strictly ascending")
    f = as_integrand(f)
    order = as_order(alpha)

    out = []
    for k, t in enumerate(grid):
        res = jumarie_integral(f, order, float(t), cfg, breakpoints=breakpoints)
        if not res.converged:
            raise ConvergenceError(
                f"quadrature did not converge at grid index {k} (t={t!r})",
                index=k, result=res,
            )
        out.append(res)
    return out
