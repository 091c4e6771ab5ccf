"""Integrals with respect to (dt)^alpha, the Riemann-sum counterexample and
Picard iteration for fractional uncertain differential equations."""

__version__ = "0.1.0"

from .errors import (
    CoefficientConditionError,
    ConvergenceError,
    DomainError,
    NonContractionError,
    NumericRefusalError,
)
from .jumarie import (
    Constant,
    DiracDelta,
    FractionalOrder,
    Function,
    Power,
    QuadratureConfig,
    QuadratureResult,
    closed_form,
    jumarie_integral,
    prefix_profile,
    riemann_liouville,
)
from .riemann_probe import (
    DivergenceReport,
    PartitionScheme,
    divergence_scan,
    riemann_sum,
    side_by_side,
)
from .specialfn import beta, gamma, lgamma
