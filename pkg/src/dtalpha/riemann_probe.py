r"""Riemann-sum reading of the :math:`(dt)^\alpha` integral, as a counterexample.

Reading :math:`\int_0^t f(s)(ds)^\alpha` as
:math:`\lim_n \sum_{i=1}^n f(s_i)(\Delta s_i)^\alpha` on a uniform partition
gives sums growing like :math:`n^{1-\alpha}` for any :math:`f` with a
non-vanishing mean, e.g. exactly :math:`\sqrt{n}` for :math:`f = 1`,
:math:`\alpha = 1/2`, :math:`t = 1`.  This module computes those sums,
fits the growth exponent on a log-log scale and puts the result next to the
finite value returned by :func:`dtalpha.jumarie.jumarie_integral`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, NumericRefusalError
from .jumarie import (
    DEFAULT_CONFIG,
    DiracDelta,
    FractionalOrder,
    QuadratureConfig,
    as_integrand,
    as_order,
    jumarie_integral,
)
from .quadrature import vectorize

__all__ = [
    "PartitionScheme",
    "DivergenceReport",
    "SideBySide",
    "riemann_sum",
    "divergence_scan",
    "side_by_side",
    "SLOPE_THRESHOLD",
    "R2_THRESHOLD",
]

#: fitted exponents at or below this magnitude count as bounded growth
SLOPE_THRESHOLD = 0.05
#: minimum coefficient of determination for a "diverges" verdict
R2_THRESHOLD = 0.99

_NOISE = 1e3 * np.finfo(float).eps

Verdict = Literal["diverges", "converges", "inconclusive"]


@dataclass(frozen=True)
class PartitionScheme:
    """Uniform partition with left, right or midpoint samples.

    The default samples the right endpoint of every subinterval.
    """

    kind: Literal["uniform"] = "uniform"
    sample_point: Literal["left", "right", "midpoint"] = "right"

    def __post_init__(self) -> None:
        if self.kind != "uniform":
            raise DomainError(f"only uniform partitions are supported, got {self.kind!r}")
        if self.sample_point not in ("left", "right", "midpoint"):
            raise DomainError(f"unknown sample point {self.sample_point!r}")

    def samples(self, t: float, n: int) -> np.ndarray:
        i = np.arange(n, dtype=float)
        offset = {"left": 0.0, "midpoint": 0.5, "right": 1.0}[self.sample_point]
        return t * (i + offset) / n


@dataclass(frozen=True)
class DivergenceReport:
    ns: list[int]
    sums: list[float]
    fitted_exponent: float
    fitted_r2: float
    verdict: Verdict

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> DivergenceReport:
        return cls(
            ns=[int(n) for n in data["ns"]],
            sums=[float(s) for s in data["sums"]],
            fitted_exponent=float(data["fitted_exponent"]),
            fitted_r2=float(data["fitted_r2"]),
            verdict=data["verdict"],
        )


@dataclass(frozen=True)
class SideBySide:
    definition_value: float
    report: DivergenceReport
    definition_error: float = 0.0

    def to_dict(self) -> dict:
        return {
            "definition_value": self.definition_value,
            "definition_error": self.definition_error,
            "report": self.report.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> SideBySide:
        return cls(
            definition_value=float(data["definition_value"]),
            definition_error=float(data.get("definition_error", 0.0)),
            report=DivergenceReport.from_dict(data["report"]),
        )


def _sum_and_mass(f, alpha, t, n, scheme) -> tuple[float, float]:
    f = as_integrand(f)
    if isinstance(f, DiracDelta):
        raise NumericRefusalError("a Riemann sum needs pointwise values; the Dirac delta has none")
    a = as_order(alpha).alpha
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"t must be finite and > 0, got {t!r}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    n = int(n)

    width = (t / n) ** a
    fx = vectorize(f)(scheme.samples(t, n))
    if not np.all(np.isfinite(fx)):
        raise DomainError("integrand is not finite at a sample point")
    return math.fsum(fx) * width, math.fsum(np.abs(fx)) * width


def riemann_sum(
    f,
    alpha: FractionalOrder | float,
    t: float,
    n: int,
    scheme: PartitionScheme = PartitionScheme(),
) -> float:
    r"""Return :math:`\sum_{i=1}^n f(s_i) (\Delta s_i)^\alpha` on a uniform partition of ``[0, t]``.

    Terms are accumulated with :func:`math.fsum`, so the only rounding is in
    the individual terms.
    """
    return _sum_and_mass(f, alpha, t, n, scheme)[0]


def _fit_loglog(ns: np.ndarray, sums: np.ndarray) -> tuple[float, float]:
    x = np.log(ns)
    y = np.log(sums)
    xc = x - x.mean()
    yc = y - y.mean()
    slope = float(xc @ yc / (xc @ xc))
    ss_tot = float(yc @ yc)
    ss_res = float(np.sum((yc - slope * xc) ** 2))
    if ss_tot <= 1e-24 * max(1.0, float(y @ y)):
        # all sums equal: a flat line fits perfectly
        return 0.0 if abs(slope) < 1e-12 else slope, 1.0
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, r2


def divergence_scan(
    f,
    alpha: FractionalOrder | float,
    t: float,
    ns: Sequence[int],
    scheme: PartitionScheme = PartitionScheme(),
) -> DivergenceReport:
    """Riemann sums over increasing ``ns`` and their log-log growth exponent.

    The verdict is ``"diverges"`` when the fitted exponent exceeds
    :data:`SLOPE_THRESHOLD` with ``r2 >`` :data:`R2_THRESHOLD`,
    ``"converges"`` when the exponent is within ``SLOPE_THRESHOLD`` of zero,
    and ``"inconclusive"`` otherwise.  Sums that change sign or vanish
    (relative to the rounding noise of their terms) cannot be placed on a
    log scale and are always inconclusive.
    """
    ns = [int(n) for n in ns]
    if len(ns) < 4:
        raise DomainError("divergence_scan needs at least 4 partition sizes")
    if any(n < 2 for n in ns):
        raise DomainError("partition sizes must be >= 2")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("partition sizes must be strictly increasing")

    pairs = [_sum_and_mass(f, alpha, t, n, scheme) for n in ns]
    sums = [p[0] for p in pairs]
    arr = np.asarray(sums)
    # sums lost in the rounding noise of their own terms count as zero
    lost = any(abs(s) <= _NOISE * mass for s, mass in pairs)
    if not lost and (np.all(arr > 0.0) or np.all(arr < 0.0)):
        slope, r2 = _fit_loglog(np.asarray(ns, dtype=float), np.abs(arr))
    else:
        return DivergenceReport(ns, sums, math.nan, 0.0, "inconclusive")

    if slope > SLOPE_THRESHOLD and r2 > R2_THRESHOLD:
        verdict = "diverges"
    elif abs(slope) <= SLOPE_THRESHOLD:
        verdict = "converges"
    else:
        verdict = "inconclusive"
    return DivergenceReport(ns, sums, slope, r2, verdict)


def side_by_side(
    f,
    alpha: FractionalOrder | float,
    t: float,
    ns: Sequence[int],
    scheme: PartitionScheme = PartitionScheme(),
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> SideBySide:
    """The finite integral value next to the divergence report of the Riemann reading."""
    f = as_integrand(f)
    report = divergence_scan(f, alpha, t, ns, scheme)
    res = jumarie_integral(f, alpha, t, cfg)
    if not res.converged:
        raise ConvergenceError("integral value did not converge", result=res)
    return SideBySide(res.value, report, res.error_estimate)
