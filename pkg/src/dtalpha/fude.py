r"""Pathwise Picard iteration for fractional uncertain differential equations

.. math::

    dX_t = g(t, X_t)\,dt + h(t, X_t)\,dF^\alpha_t, \qquad 0 < \alpha < 1.

Each run follows a single sample path of the driver.  The path is modelled
through a noise density :math:`\varphi` with
:math:`dF^\alpha_u = \varphi(u)\,(du)^{1-\alpha}` and
:math:`|\varphi| \le 2\kappa/(1-\alpha)`, so that

.. math::

    \int_0^t w(u)\,dF^\alpha_u = (1-\alpha)\int_0^t (t-u)^{-\alpha} w(u)\varphi(u)\,du.

Iterates live on the nodes of a grid; between nodes every integrand is the
piecewise-linear interpolant of its nodal values.  The Picard map uses
product-integration weights that integrate those interpolants exactly, and
the final defect is re-measured by adaptive quadrature as an independent
check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.stats import qmc

from .errors import (
    CoefficientConditionError,
    ConvergenceError,
    DomainError,
    NonContractionError,
)
from .jumarie import FractionalOrder, Function, QuadratureConfig, as_order, jumarie_integral
from .quadrature import adaptive_gk15, weakly_singular_quad

__all__ = [
    "DriverPath",
    "ConstantDriver",
    "SinusoidDriver",
    "SmoothDriver",
    "CoefficientPair",
    "PicardTrace",
    "FirstGapCheck",
    "uniform_grid",
    "make_driver",
    "driver_bound",
    "check_coefficients",
    "driver_integral",
    "product_weights",
    "picard_solve",
    "integral_residual",
    "first_gap_bound",
    "check_first_gap",
    "verify_driver_identity",
]

SPOT_CHECK_SAMPLES = 200

# {{{ driver paths


def _strict_order(alpha) -> FractionalOrder:
    a = as_order(alpha)
    if a.alpha >= 1.0:
        raise DomainError("the driver needs alpha < 1; its bound 2 kappa / (1 - alpha) is singular at 1")
    return FractionalOrder(a.alpha, strict=True)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise DomainError("grid needs at least two nodes")
    if grid[0] != 0.0:
        raise DomainError("grid must start at 0")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0.0):
        raise DomainError("grid must be finite and strictly ascending")
    return grid


def uniform_grid(horizon: float, m: int) -> np.ndarray:
    """``m`` equal intervals on ``[0, horizon]`` (``m + 1`` nodes)."""
    if not horizon > 0.0 or m < 1:
        raise DomainError("need horizon > 0 and m >= 1")
    return np.linspace(0.0, float(horizon), int(m) + 1)


def driver_bound(kappa: float, alpha: float) -> float:
    """Admissible sup-norm ``2 kappa / (1 - alpha)`` of the noise density."""
    return 2.0 * kappa / (1.0 - alpha)


@dataclass(frozen=True, eq=False)
class DriverPath:
    """Sampled noise density ``phi`` of one driver path on ``grid``.

    ``kappa`` is the path constant; construction rejects any ``phi`` that
    leaves the band ``|phi| <= 2 kappa / (1 - alpha)``.
    """

    alpha: FractionalOrder
    grid: np.ndarray
    phi: np.ndarray
    kappa: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _strict_order(self.alpha))
        grid = _check_grid(self.grid)
        phi = np.asarray(self.phi, dtype=float)
        if phi.shape != grid.shape:
            raise DomainError("phi must have one sample per grid node")
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise DomainError(f"kappa must be finite and > 0, got {self.kappa!r}")
        bound = driver_bound(self.kappa, self.alpha.alpha)
        sup = float(np.max(np.abs(phi)))
        if not sup <= bound:
            raise DomainError(
                f"driver density sup {sup!r} exceeds 2 kappa / (1 - alpha) = {bound!r}"
            )
        grid.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def node_index(self, t: float) -> int:
        k = int(np.searchsorted(self.grid, t))
        for j in (k - 1, k):
            if 0 <= j < self.grid.size and abs(self.grid[j] - t) <= 1e-12 * max(1.0, self.horizon):
                return j
        raise DomainError(f"t={t!r} is not a node of the driver grid")


@dataclass(frozen=True)
class ConstantDriver:
    level: float = 1.0

    def sample(self, grid: np.ndarray) -> np.ndarray:
        return np.full(grid.shape, float(self.level))


@dataclass(frozen=True)
class SinusoidDriver:
    """``amplitude * sin(2 pi frequency t)``."""

    amplitude: float = 1.0
    frequency: float = 1.0

    def sample(self, grid: np.ndarray) -> np.ndarray:
        return self.amplitude * np.sin(2.0 * np.pi * self.frequency * grid)


@dataclass(frozen=True)
class SmoothDriver:
    """Random trigonometric sum with ``modes`` terms and decaying amplitudes.

    ``phi(t) = kappa * sum_k a_k cos(k pi t / T + theta_k)`` with
    ``a_k ~ U(-1, 1) / k`` and ``theta_k ~ U(0, 2 pi)`` drawn from
    ``numpy.random.default_rng(seed)``.
    """

    seed: int = 0
    modes: int = 3

    def sample(self, grid: np.ndarray, kappa: float = 1.0) -> np.ndarray:
        if self.modes < 1:
            raise DomainError("modes must be >= 1")
        rng = np.random.default_rng(self.seed)
        k = np.arange(1, self.modes + 1, dtype=float)
        amp = rng.uniform(-1.0, 1.0, self.modes) / k
        phase = rng.uniform(0.0, 2.0 * np.pi, self.modes)
        horizon = grid[-1]
        arg = np.pi * np.outer(grid / horizon, k) + phase
        return kappa * (np.cos(arg) @ amp)


DriverModel = Union[ConstantDriver, SinusoidDriver, SmoothDriver]


def make_driver(model: DriverModel, kappa: float, alpha, grid) -> DriverPath:
    """Sample ``model`` on ``grid`` and wrap it as a :class:`DriverPath`.

    Models whose samples break the ``2 kappa / (1 - alpha)`` band are
    rejected with :class:`DomainError`, never clamped.
    """
    order = _strict_order(alpha)
    grid = _check_grid(grid)
    if isinstance(model, SmoothDriver):
        phi = model.sample(grid, kappa)
    else:
        phi = model.sample(grid)
    return DriverPath(order, grid, phi, kappa)


# }}}


# {{{ coefficients


def _eval2(fn: Callable, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(t, x), dtype=float)
        if out.shape == np.broadcast(t, x).shape:
            return out
        if out.ndim == 0:
            return np.full(np.broadcast(t, x).shape, float(out))
    except (TypeError, ValueError):
        pass
    tb, xb = np.broadcast_arrays(t, x)
    return np.array([float(fn(float(a), float(b))) for a, b in zip(tb.ravel(), xb.ravel())]).reshape(tb.shape)


@dataclass(frozen=True)
class CoefficientPair:
    """Drift ``g(t, x)``, driver coefficient ``h(t, x)`` and the constant ``L``
    of their linear growth and Lipschitz bounds."""

    g: Callable
    h: Callable
    growth_L: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.growth_L) and self.growth_L > 0.0):
            raise DomainError(f"growth_L must be finite and > 0, got {self.growth_L!r}")

    def drift(self, t, x) -> np.ndarray:
        return _eval2(self.g, np.asarray(t, float), np.asarray(x, float))

    def diffusion(self, t, x) -> np.ndarray:
        return _eval2(self.h, np.asarray(t, float), np.asarray(x, float))


def check_coefficients(
    coeffs: CoefficientPair, x0: float, horizon: float, samples: int = SPOT_CHECK_SAMPLES
) -> None:
    """Spot-check growth and Lipschitz bounds on a Halton sample of the
    working box ``[0, T] x [x0 - R, x0 + R]``, ``R = 2 (1 + |x0|) exp(L T)``.

    Raises :class:`CoefficientConditionError` on the first violation.
    """
    L = coeffs.growth_L
    radius = 2.0 * (1.0 + abs(x0)) * math.exp(min(L * horizon, 700.0))
    pts = qmc.Halton(d=3, scramble=False).random(samples + 1)[1:]
    t = pts[:, 0] * horizon
    x = x0 + radius * (2.0 * pts[:, 1] - 1.0)
    y = x0 + radius * (2.0 * pts[:, 2] - 1.0)

    growth = L * (1.0 + np.abs(x))
    slack = 1e-12
    for name, fn in (("g", coeffs.drift), ("h", coeffs.diffusion)):
        fx = fn(t, x)
        fy = fn(t, y)
        if not (np.all(np.isfinite(fx)) and np.all(np.isfinite(fy))):
            raise CoefficientConditionError(f"{name} is not finite on the working box")
        bad = np.abs(fx) > growth * (1.0 + slack) + slack
        if np.any(bad):
            i = int(np.argmax(bad))
            raise CoefficientConditionError(
                f"{name} breaks |{name}(t,x)| <= L(1+|x|) at t={t[i]!r}, x={x[i]!r}"
            )
        lip = np.abs(fx - fy) > L * np.abs(x - y) * (1.0 + 1e-9) + slack * (1.0 + np.abs(fx))
        if np.any(lip):
            i = int(np.argmax(lip))
            raise CoefficientConditionError(
                f"{name} breaks the Lipschitz bound with L={L!r} at t={t[i]!r}, "
                f"x={x[i]!r}, y={y[i]!r}"
            )


# }}}


# {{{ integrals on the grid


def _interpolant(grid: np.ndarray, values: np.ndarray) -> Function:
    return Function(lambda u: np.interp(u, grid, values), smoothness="continuous")


def driver_integral(
    w: Sequence[float],
    path: DriverPath,
    t: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    r"""Pathwise :math:`\int_0^t w(u)\,dF^\alpha_u`.

    Computed as the order ``1 - alpha`` integral of the piecewise-linear
    interpolant of ``w * phi`` with the substitution scheme, splitting at
    every grid node below ``t``.  ``t`` must be a grid node.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != path.grid.shape:
        raise DomainError("w must be sampled on the driver grid")
    k = path.node_index(t)
    if k == 0:
        return 0.0
    grid = path.grid[: k + 1]
    f = _interpolant(grid, (w * path.phi)[: k + 1])
    cfg = QuadratureConfig(cfg.rel_tol, cfg.abs_tol, cfg.max_evals, "substitution", True)
    res = jumarie_integral(f, path.alpha.complement(), grid[-1], cfg, breakpoints=grid[1:-1])
    if not res.converged:
        raise ConvergenceError(f"driver integral did not converge at t={t!r}", index=k, result=res)
    return res.value


def _plain_integral(values: np.ndarray, grid: np.ndarray, k: int, cfg: QuadratureConfig) -> float:
    if k == 0:
        return 0.0
    f = _interpolant(grid[: k + 1], values[: k + 1])
    res = adaptive_gk15(
        f, 0.0, float(grid[k]),
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_evals=cfg.max_evals,
        breakpoints=grid[1:k],
    )
    if not res.converged:
        raise ConvergenceError(f"time integral did not converge at node {k}", index=k, result=res)
    return res.value


def product_weights(grid, alpha) -> tuple[np.ndarray, np.ndarray]:
    r"""Exact integration weights for piecewise-linear data on ``grid``.

    Returns ``(A, B)`` with

    * ``(A @ v)[k] = int_0^{t_k} v(u) du``,
    * ``(B @ v)[k] = (1 - alpha) int_0^{t_k} (t_k - u)^(-alpha) v(u) du``,

    where ``v`` is the hat-function interpolant of the nodal values.
    """
    grid = _check_grid(grid)
    beta = 1.0 - _strict_order(alpha).alpha
    m = grid.size
    h = np.diff(grid)

    A = np.zeros((m, m))
    for k in range(1, m):
        A[k, :k] += 0.5 * h[:k]
        A[k, 1 : k + 1] += 0.5 * h[:k]

    B = np.zeros((m, m))
    for k in range(1, m):
        t = grid[k]
        a = grid[:k]
        b = grid[1 : k + 1]
        da = t - a
        db = t - b
        # I0 = int_a^b (t-u)^(-alpha) du, I1 = int_a^b (t-u)^(1-alpha) du
        i0 = (da**beta - db**beta) / beta
        i1 = (da ** (beta + 1.0) - db ** (beta + 1.0)) / (beta + 1.0)
        left = (i1 - db * i0) / h[:k]
        right = (da * i0 - i1) / h[:k]
        B[k, :k] += beta * left
        B[k, 1 : k + 1] += beta * right
    return A, B


# }}}


# {{{ Picard iteration


@dataclass
class PicardTrace:
    """Iterates ``X^(0), X^(1), ...`` on the grid with their sup-norm gaps.

    ``gaps[n]`` is ``max |X^(n+1) - X^(n)|`` over the grid nodes in
    ``(0, T]``.  ``residual`` is the largest defect of the last iterate in
    the integral equation, measured by adaptive quadrature.
    """

    grid: np.ndarray
    iterates: list[np.ndarray]
    gaps: list[float]
    converged: bool
    iterations_used: int
    residual: float
    contraction_factor: float = math.nan

    @property
    def solution(self) -> np.ndarray:
        return self.iterates[-1]

    def to_dict(self) -> dict:
        return {
            "grid": [float(v) for v in self.grid],
            "iterates": [[float(v) for v in x] for x in self.iterates],
            "gaps": [float(g) for g in self.gaps],
            "converged": bool(self.converged),
            "iterations_used": int(self.iterations_used),
            "residual": float(self.residual),
            "contraction_factor": float(self.contraction_factor),
        }

    @classmethod
    def from_dict(cls, data: dict) -> PicardTrace:
        return cls(
            grid=np.asarray(data["grid"], dtype=float),
            iterates=[np.asarray(x, dtype=float) for x in data["iterates"]],
            gaps=[float(g) for g in data["gaps"]],
            converged=bool(data["converged"]),
            iterations_used=int(data["iterations_used"]),
            residual=float(data["residual"]),
            contraction_factor=float(data.get("contraction_factor", math.nan)),
        )


def _picard_map(coeffs, x0, path, A, B, X):
    grid = path.grid
    return x0 + A @ coeffs.drift(grid, X) + B @ (coeffs.diffusion(grid, X) * path.phi)


def integral_residual(
    coeffs: CoefficientPair,
    x0: float,
    path: DriverPath,
    X: np.ndarray,
    cfg: QuadratureConfig = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14),
) -> np.ndarray:
    """Nodewise defect ``X - x0 - int g dt - int h dF`` by adaptive quadrature."""
    grid = path.grid
    X = np.asarray(X, dtype=float)
    gv = coeffs.drift(grid, X)
    hv = coeffs.diffusion(grid, X)
    out = np.zeros(grid.size)
    out[0] = X[0] - x0
    for k in range(1, grid.size):
        out[k] = X[k] - x0 - _plain_integral(gv, grid, k, cfg) - driver_integral(hv, path, grid[k], cfg)
    return out


def contraction_factor(coeffs: CoefficientPair, path: DriverPath) -> float:
    """Sup-norm Lipschitz constant ``L (T + max|phi| T^(1-alpha))`` of the Picard map."""
    T = path.horizon
    return coeffs.growth_L * (T + float(np.max(np.abs(path.phi))) * T ** (1.0 - path.alpha.alpha))


def picard_solve(
    coeffs: CoefficientPair,
    x0: float,
    path: DriverPath,
    tol: float = 1e-8,
    max_iter: int = 50,
    *,
    check: bool = True,
) -> PicardTrace:
    """Run the Picard iteration from ``X^(0) = x0`` until the gap drops to ``tol``.

    Raises :class:`CoefficientConditionError` when the spot check of the
    coefficients fails and :class:`NonContractionError` once the gap has
    failed to decrease three times in a row.  Running out of ``max_iter``
    returns a trace with ``converged=False``.
    """
    if not tol > 0.0:
        raise DomainError("tol must be > 0")
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    x0 = float(x0)
    if check:
        check_coefficients(coeffs, x0, path.horizon)

    A, B = product_weights(path.grid, path.alpha)
    iterates = [np.full(path.grid.size, x0)]
    gaps: list[float] = []
    converged = False
    for _ in range(max_iter):
        nxt = _picard_map(coeffs, x0, path, A, B, iterates[-1])
        if not np.all(np.isfinite(nxt)):
            raise ConvergenceError("Picard iterate is not finite")
        gaps.append(float(np.max(np.abs(nxt[1:] - iterates[-1][1:]))))
        iterates.append(nxt)
        if gaps[-1] <= tol:
            converged = True
            break
        if len(gaps) >= 4 and gaps[-1] >= gaps[-2] >= gaps[-3] >= gaps[-4]:
            trace = PicardTrace(path.grid, iterates, gaps, False, len(gaps), math.nan,
                                contraction_factor(coeffs, path))
            raise NonContractionError(
                f"Picard gaps stopped decreasing: {gaps[-4:]}", result=trace
            )

    residual = float(np.max(np.abs(integral_residual(coeffs, x0, path, iterates[-1]))))
    return PicardTrace(
        path.grid, iterates, gaps, converged, len(gaps), residual,
        contraction_factor(coeffs, path),
    )


# }}}


# {{{ first gap and the driver identity


def first_gap_bound(L: float, x0: float, kappa: float, alpha, t: float) -> float:
    """``L (1 + |x0|) (t + 2 t^(1-alpha) kappa / (1 - alpha))``, the bound on ``D^(0)``."""
    a = _strict_order(alpha).alpha
    if not (L > 0.0 and kappa > 0.0 and t > 0.0):
        raise DomainError("need L > 0, kappa > 0 and t > 0")
    return L * (1.0 + abs(x0)) * (t + 2.0 * t ** (1.0 - a) * kappa / (1.0 - a))


@dataclass(frozen=True)
class FirstGapCheck:
    d0: float
    bound: float
    satisfied: bool


def check_first_gap(
    coeffs: CoefficientPair, x0: float, path: DriverPath, tol: float = 1e-10
) -> FirstGapCheck:
    """Compare ``D^(0) = max |X^(1) - x0|`` with :func:`first_gap_bound` at the horizon.

    ``X^(1)`` is computed by adaptive quadrature to relative tolerance ``tol``.
    """
    x0 = float(x0)
    check_coefficients(coeffs, x0, path.horizon)
    cfg = QuadratureConfig(rel_tol=tol, abs_tol=min(tol, 1e-12))
    grid = path.grid
    X0 = np.full(grid.size, x0)
    gv = coeffs.drift(grid, X0)
    hv = coeffs.diffusion(grid, X0)
    d0 = 0.0
    for k in range(1, grid.size):
        step = _plain_integral(gv, grid, k, cfg) + driver_integral(hv, path, grid[k], cfg)
        d0 = max(d0, abs(step))
    bound = first_gap_bound(coeffs.growth_L, x0, path.kappa, path.alpha, path.horizon)
    return FirstGapCheck(d0, bound, d0 < bound)


def verify_driver_identity(
    w: Sequence[float],
    grid,
    kappa: float,
    alpha,
    t: float,
    cfg: QuadratureConfig = QuadratureConfig(),
) -> float:
    r"""Relative residual between the two sides of

    .. math::

        \frac{2\kappa}{1-\alpha}\int_0^t w(u)\,(du)^{1-\alpha}
        = \frac{2\kappa}{1-\alpha}(1-\alpha)\int_0^t (t-u)^{-\alpha} w(u)\,du.

    The left side goes through the substitution scheme of
    :func:`~dtalpha.jumarie.jumarie_integral`; the right side keeps the
    kernel and uses composite Gauss-Jacobi quadrature.  Returns
    ``|lhs - rhs| / max(1, |lhs|)``.
    """
    grid = _check_grid(grid)
    a = _strict_order(alpha).alpha
    w = np.asarray(w, dtype=float)
    if w.shape != grid.shape:
        raise DomainError("w must be sampled on the grid")
    if np.any(w < 0.0):
        raise DomainError("w must be non-negative")
    if not kappa > 0.0:
        raise DomainError("kappa must be > 0")
    path = DriverPath(FractionalOrder(a, strict=True), grid, np.zeros_like(grid), kappa)
    k = path.node_index(t)
    if k == 0:
        return 0.0
    nodes = grid[: k + 1]
    f = _interpolant(nodes, w[: k + 1])
    scale = 2.0 * kappa / (1.0 - a)

    lcfg = QuadratureConfig(cfg.rel_tol, cfg.abs_tol, cfg.max_evals, "substitution", True)
    lhs_res = jumarie_integral(f, 1.0 - a, nodes[-1], lcfg, breakpoints=nodes[1:-1])
    rhs_res = weakly_singular_quad(
        f, nodes[-1], a,
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_evals=cfg.max_evals,
        breakpoints=nodes[1:-1],
    )
    for side, res in (("left", lhs_res), ("right", rhs_res)):
        if not res.converged:
            raise ConvergenceError(f"{side} side of the driver identity did not converge", result=res)
    lhs = scale * lhs_res.value
    rhs = scale * (1.0 - a) * rhs_res.value
    return abs(lhs - rhs) / max(1.0, abs(lhs))


# }}}
