import math

import numpy as np
import pytest
from scipy.integrate import quad

from dtalpha.quadrature import (
    QuadratureResult,
    adaptive_gk15,
    vectorize,
    weakly_singular_quad,
)


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_rule_is_exact_for_polynomials(degree):
    res = adaptive_gk15(lambda x: x**degree, 0.0, 1.0, rel_tol=1e-14)
    assert res.value == pytest.approx(1.0 / (degree + 1), rel=1e-14)


def test_gauss_error_estimate_vanishes_up_to_degree_13():
    res = adaptive_gk15(lambda x: x**13, -1.0, 2.0)
    assert res.evals == 15
    assert res.error_estimate <= 1e-12


def test_sqrt_endpoint_singularity():
    res = adaptive_gk15(np.sqrt, 0.0, 1.0, rel_tol=1e-12)
    assert res.converged
    assert res.value == pytest.approx(2.0 / 3.0, rel=1e-11)


def test_breakpoints_handle_kinks():
    f = lambda x: np.abs(x - 0.3)
    with_bp = adaptive_gk15(f, 0.0, 1.0, breakpoints=[0.3])
    assert with_bp.evals == 30
    assert with_bp.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-14)


def test_budget_exhaustion_is_reported():
    res = adaptive_gk15(lambda x: np.sin(1.0 / (x + 1e-3)), 0.0, 1.0, max_evals=45)
    assert not res.converged
    assert res.evals <= 45


def test_empty_interval():
    assert adaptive_gk15(np.exp, 2.0, 2.0) == QuadratureResult(0.0, 0.0, 0, True)


@pytest.mark.parametrize("exponent", [0.0, 0.1, 0.5, 0.9])
def test_weakly_singular_quad_matches_qaws(exponent):
    f = lambda u: np.exp(u) * np.cos(2.0 * u)
    ref = quad(f, 0.0, 1.5, weight="alg", wvar=(0.0, -exponent), epsabs=1e-14, epsrel=1e-13)[0]
    res = weakly_singular_quad(f, 1.5, exponent)
    assert res.converged
    assert res.value == pytest.approx(ref, rel=1e-11)


def test_weakly_singular_quad_piecewise_linear():
    grid = np.linspace(0.0, 1.0, 11)
    vals = np.cos(5.0 * grid)
    f = lambda u: np.interp(u, grid, vals)
    res = weakly_singular_quad(f, 1.0, 0.4, breakpoints=grid[1:-1])
    ref = math.fsum(
        quad(lambda u: (1.0 - u) ** -0.4 * f(u), a, b, epsabs=1e-15, epsrel=1e-13)[0]
        for a, b in zip(grid[:-2], grid[1:-1])
    ) + quad(f, grid[-2], 1.0, weight="alg", wvar=(0.0, -0.4), epsabs=1e-15, epsrel=1e-13)[0]
    assert res.value == pytest.approx(ref, rel=1e-11)


def test_weakly_singular_quad_rejects_bad_exponent():
    with pytest.raises(ValueError):
        weakly_singular_quad(np.exp, 1.0, 1.0)


def test_vectorize_handles_scalar_only_functions():
    f = vectorize(lambda x: math.exp(x))
    x = np.linspace(0.0, 1.0, 7).reshape(7, 1)
    np.testing.assert_allclose(f(x), np.exp(x), rtol=1e-15)
    g = vectorize(lambda x: 3.0)
    assert np.all(g(np.zeros((2, 3))) == 3.0)


def test_result_round_trip():
    r = QuadratureResult(0.1 + 0.2, 1e-17, 45, False)
    assert QuadratureResult.from_dict(r.to_dict()) == r
