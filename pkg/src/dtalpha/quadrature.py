"""Quadrature engines used by the fractional integral routines.

Two independent discretisations live here:

* :func:`adaptive_gk15` -- globally adaptive 7/15-point Gauss-Kronrod
  bisection, with the panels refined in vectorised batches.  The error
  estimate of a panel is the raw Kronrod/Gauss difference.
* :func:`weakly_singular_quad` -- composite Gauss-Jacobi rule for
  ``int_0^t (t - u)^(-e) f(u) du``.  The kernel is absorbed into the
  weight of the last panel; the remaining panels are smooth and use
  Gauss-Legendre.  Node counts are doubled until two successive rules agree.

Both accept ``breakpoints`` at which the integrand may have kinks
(piecewise-linear interpolants, for instance).
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_jacobi

__all__ = [
    "QuadratureResult",
    "adaptive_gk15",
    "weakly_singular_quad",
    "vectorize",
]

ArrayFunction = Callable[[np.ndarray], np.ndarray]

_EPS = np.finfo(float).eps

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric node set, ordered -1 .. 1
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (counting from 1 in _XGK)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of one quadrature: value, error estimate, evaluation count
    and whether the requested tolerance was met."""

    value: float
    error_estimate: float
    evals: int
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> QuadratureResult:
        return cls(
            value=float(data["value"]),
            error_estimate=float(data["error_estimate"]),
            evals=int(data["evals"]),
            converged=bool(data["converged"]),
        )


def vectorize(f: Callable) -> ArrayFunction:
    """Wrap ``f`` so it maps a float array to a float array of equal shape.

    Functions that already broadcast are used as is; anything else is
    applied elementwise.
    """

    def wrapped(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
            if y.ndim == 0:
                return np.full(x.shape, float(y))
        except (TypeError, ValueError):
            pass
        return np.array([float(f(float(xi))) for xi in x.ravel()]).reshape(x.shape)

    return wrapped


def _gk15_panels(f: ArrayFunction, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = f(x)
    if not np.all(np.isfinite(fx)):
        raise FloatingPointError("integrand returned a non-finite value")
    kronrod = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    resabs = np.abs(half) * (np.abs(fx) @ _KRONROD_W)
    return kronrod, np.abs(kronrod - gauss), resabs


def adaptive_gk15(
    f: ArrayFunction,
    a: float,
    b: float,
    *,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    max_evals: int = 100_000,
    breakpoints: Sequence[float] | None = None,
) -> QuadratureResult:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    Each round bisects every panel whose error exceeds an equal share of
    the current tolerance, so endpoint singularities get geometric
    refinement while smooth regions are left alone.  The achievable
    tolerance is floored at ``100 eps`` times the integral of ``|f|``.
    """
    if b < a:
        raise ValueError("adaptive_gk15 expects a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)

    edges = [a, b]
    if breakpoints is not None:
        inner = [p for p in breakpoints if a < p < b]
        edges = sorted({a, b, *inner})
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]

    vals, errs, absv = _gk15_panels(f, lo, hi)
    evals = 15 * lo.size
    min_width = 64.0 * _EPS * max(abs(a), abs(b), b - a)

    while True:
        total = math.fsum(vals)
        err = float(np.sum(errs))
        tol = max(abs_tol, rel_tol * abs(total), 100.0 * _EPS * float(np.sum(absv)))
        if err <= tol:
            return QuadratureResult(total, err, evals, True)

        refine = (errs > tol / errs.size) & ((hi - lo) > min_width)
        n_new = 2 * int(np.count_nonzero(refine))
        if n_new == 0 or evals + 15 * n_new > max_evals:
            return QuadratureResult(total, err, evals, False)

        keep = ~refine
        rl, rh = lo[refine], hi[refine]
        rm = 0.5 * (rl + rh)
        new_lo = np.concatenate([rl, rm])
        new_hi = np.concatenate([rm, rh])
        nv, ne, na = _gk15_panels(f, new_lo, new_hi)
        evals += 15 * n_new

        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        absv = np.concatenate([absv[keep], na])


@functools.lru_cache(maxsize=256)
def _jacobi_rule(n: int, exponent: float) -> tuple[np.ndarray, np.ndarray]:
    # weight (1 - x)^(-exponent) on [-1, 1]
    x, w = roots_jacobi(n, -exponent, 0.0)
    return x, w


@functools.lru_cache(maxsize=64)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _composite_jacobi(f, t, exponent, lo, hi, n):
    """One composite rule with ``n`` nodes per panel; the last panel ends at t."""
    total = []
    xl, wl = _legendre_rule(n)
    if lo.size > 1:
        a, b = lo[:-1], hi[:-1]
        half = 0.5 * (b - a)
        u = 0.5 * (a + b)[:, None] + half[:, None] * xl[None, :]
        vals = np.power(t - u, -exponent) * f(u)
        total.extend(half * (vals @ wl))
    xj, wj = _jacobi_rule(n, exponent)
    a = lo[-1]
    half = 0.5 * (t - a)
    u = 0.5 * (a + t) + half * xj
    total.append(half ** (1.0 - exponent) * float(f(u) @ wj))
    return math.fsum(total), n * lo.size


def weakly_singular_quad(
    f: ArrayFunction,
    t: float,
    exponent: float,
    *,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
    max_evals: int = 100_000,
    breakpoints: Sequence[float] | None = None,
    start_nodes: int = 8,
) -> QuadratureResult:
    """Compute ``int_0^t (t - u)^(-exponent) f(u) du`` for ``0 <= exponent < 1``."""
    if not 0.0 <= exponent < 1.0:
        raise ValueError(f"kernel exponent must lie in [0, 1), got {exponent!r}")
    if t == 0.0:
        return QuadratureResult(0.0, 0.0, 0, True)

    edges = [0.0, t]
    if breakpoints is not None:
        edges = sorted({0.0, t, *(p for p in breakpoints if 0.0 < p < t)})
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]

    n = start_nodes
    prev, evals = _composite_jacobi(f, t, exponent, lo, hi, n)
    while True:
        if evals + 2 * n * lo.size > max_evals:
            return QuadratureResult(prev, math.inf, evals, False)
        n *= 2
        cur, used = _composite_jacobi(f, t, exponent, lo, hi, n)
        evals += used
        err = abs(cur - prev)
        if err <= max(abs_tol, rel_tol * abs(cur)):
            return QuadratureResult(cur, err, evals, True)
        prev = cur
