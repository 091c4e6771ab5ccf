import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dtalpha.errors import ConvergenceError, DomainError, NumericRefusalError
from dtalpha.jumarie import (
    Constant,
    DiracDelta,
    FractionalOrder,
    Function,
    Power,
    QuadratureConfig,
    closed_form,
    jumarie_integral,
    prefix_profile,
    riemann_liouville,
)

NUMERIC = QuadratureConfig(force_numeric=True)
JACOBI = QuadratureConfig(force_numeric=True, scheme="gauss_jacobi")

# 0.5 * int_0^1 (1-s)^(-1/2) s^2 ds by scipy.integrate.quad; equals 8/15
POWER2_HALF = 0.5333333333333333


def _kernel_oracle(f, alpha, t):
    """alpha int_0^t (t - tau)^(alpha-1) f(tau) dtau via QUADPACK's algebraic weight."""
    if alpha == 1.0:
        return quad(f, 0.0, t, epsabs=1e-14, epsrel=1e-13)[0]
    return alpha * quad(f, 0.0, t, weight="alg", wvar=(0.0, alpha - 1.0),
                        epsabs=1e-14, epsrel=1e-13)[0]


class TestFractionalOrder:
    @pytest.mark.parametrize("alpha", [0.0, -0.1, 1.0001, math.nan, math.inf])
    def test_rejects_out_of_range(self, alpha):
        with pytest.raises(DomainError):
            FractionalOrder(alpha)

    def test_strict_rejects_one(self):
        FractionalOrder(1.0)
        with pytest.raises(DomainError):
            FractionalOrder(1.0, strict=True)

    def test_complement(self):
        assert FractionalOrder(0.3).complement().alpha == pytest.approx(0.7)
        with pytest.raises(DomainError):
            FractionalOrder(1.0).complement()


class TestJumarieIntegral:
    def test_headline_value(self):
        assert jumarie_integral(Constant(1.0), 0.5, 1.0).value == 1.0
        assert jumarie_integral(Constant(1.0), 0.5, 1.0, NUMERIC).value == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.35, 0.5, 0.8, 1.0])
    @pytest.mark.parametrize("t", [0.25, 1.0, 3.0])
    def test_constant_rule(self, alpha, t):
        for cfg in (QuadratureConfig(), NUMERIC, JACOBI):
            res = jumarie_integral(Constant(1.0), alpha, t, cfg)
            assert res.converged
            assert res.value == pytest.approx(t**alpha, rel=1e-10)

    @pytest.mark.parametrize("f", [Constant(2.0), Power(1.5), Function(np.exp), DiracDelta()])
    def test_zero_length_interval(self, f):
        assert jumarie_integral(f, 0.4, 0.0).value == 0.0

    def test_power_spot_value(self):
        # oracle: beta form and brute-force quadrature
        assert math.gamma(1.5) * math.gamma(3.0) / math.gamma(3.5) == pytest.approx(POWER2_HALF, rel=1e-15)
        assert _kernel_oracle(lambda s: s**2, 0.5, 1.0) == pytest.approx(POWER2_HALF, rel=1e-12)
        for cfg in (QuadratureConfig(), NUMERIC, JACOBI):
            assert jumarie_integral(Power(2.0), 0.5, 1.0, cfg).value == pytest.approx(8.0 / 15.0, rel=1e-12)

    def test_alpha_one_is_ordinary_integral(self):
        res = jumarie_integral(Function(np.exp), 1.0, 1.0)
        assert res.value == pytest.approx(math.e - 1.0, rel=1e-13)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            jumarie_integral(Constant(1.0), 0.5, -1.0)

    def test_dirac_delta_refused_numerically(self):
        with pytest.raises(NumericRefusalError):
            jumarie_integral(DiracDelta(), 0.5, 1.0, NUMERIC)
        assert jumarie_integral(DiracDelta(), 0.5, 4.0).value == 0.25

    def test_plain_callables_and_scalars_accepted(self):
        assert jumarie_integral(lambda x: 1.0 + 0.0 * x, 0.5, 4.0).value == pytest.approx(2.0, rel=1e-12)
        assert jumarie_integral(3.0, 0.5, 4.0).value == 6.0

    def test_non_vectorised_callable(self):
        res = jumarie_integral(lambda x: math.cos(x), 0.7, 2.0)
        assert res.value == pytest.approx(_kernel_oracle(np.cos, 0.7, 2.0), rel=1e-10)

    def test_budget_exhaustion(self):
        cfg = QuadratureConfig(max_evals=15)
        res = jumarie_integral(Function(lambda x: np.sin(40.0 * x)), 0.3, 5.0, cfg)
        assert not res.converged

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_substitution_agrees_with_gauss_jacobi(self, alpha):
        f = Function(lambda x: np.exp(-x) * np.sin(3.0 * x) + 1.0)
        a = jumarie_integral(f, alpha, 2.0)
        b = jumarie_integral(f, alpha, 2.0, JACOBI)
        assert a.value == pytest.approx(b.value, rel=1e-10)
        assert a.value == pytest.approx(_kernel_oracle(f, alpha, 2.0), rel=1e-10)

    def test_converged_error_estimate_within_tolerance(self):
        cfg = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12)
        res = jumarie_integral(Function(np.cos), 0.25, 3.0, cfg)
        assert res.converged
        assert res.error_estimate <= max(cfg.abs_tol, cfg.rel_tol * abs(res.value))


class TestClosedForm:
    def test_dirac(self):
        assert closed_form(DiracDelta(), 0.5, 4.0) == 0.25
        with pytest.raises(DomainError):
            closed_form(DiracDelta(), 0.5, 0.0)

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 1.0])
    def test_power_zero_is_constant_rule(self, alpha):
        assert closed_form(Power(0.0), alpha, 2.5) == pytest.approx(2.5**alpha, rel=1e-14)

    def test_constant(self):
        assert closed_form(Constant(3.0), 1.0, 2.0) == 6.0

    def test_bad_power(self):
        with pytest.raises(DomainError):
            Power(-1.0)

    def test_negative_power_still_closed_form(self):
        expected = math.gamma(1.5) * math.gamma(0.5) / math.gamma(1.0) * 2.0**0.0
        assert closed_form(Power(-0.5), 0.5, 2.0) == pytest.approx(expected, rel=1e-14)

    def test_function_has_no_closed_form(self):
        with pytest.raises(DomainError):
            closed_form(Function(np.exp), 0.5, 1.0)

    @pytest.mark.parametrize("gamma_exp", [0.0, 0.5, 1.0, 2.0, 3.7])
    def test_oracle_agreement_grid(self, gamma_exp):
        for alpha in np.arange(1, 10) / 10:
            for t in (0.5, 1.0, 2.0):
                exact = closed_form(Power(gamma_exp), alpha, t)
                num = jumarie_integral(Function(lambda x, g=gamma_exp: x**g), alpha, t)
                assert num.value == pytest.approx(exact, rel=1e-8)


class TestRiemannLiouville:
    def test_examples(self):
        assert riemann_liouville(Constant(1.0), 0.5, 1.0).value == pytest.approx(1.1283791670955126, rel=1e-14)
        assert riemann_liouville(Constant(1.0), 1.0, 5.0).value == pytest.approx(5.0, rel=1e-15)
        assert riemann_liouville(Power(1.0), 0.5, 1.0).value == pytest.approx(0.752252778063675, rel=1e-14)

    def test_numeric_examples(self):
        assert riemann_liouville(Constant(1.0), 0.5, 1.0, NUMERIC).value == pytest.approx(1.1283791670955126, rel=1e-12)
        assert riemann_liouville(Power(1.0), 0.5, 1.0, JACOBI).value == pytest.approx(0.752252778063675, rel=1e-12)

    def test_dirac(self):
        assert riemann_liouville(DiracDelta(), 0.5, 4.0).value == pytest.approx(0.5 / math.gamma(0.5), rel=1e-14)

    def test_bridge_identity_grid(self):
        f = Function(lambda x: np.cos(x) + x**2)
        for alpha in np.linspace(0.1, 1.0, 10):
            for t in np.linspace(0.2, 3.0, 10):
                j = jumarie_integral(f, alpha, t).value
                rl = riemann_liouville(f, alpha, t, JACOBI).value
                assert j == pytest.approx(math.gamma(alpha + 1.0) * rl, rel=1e-9)


class TestPrefixProfile:
    def test_examples(self):
        vals = [r.value for r in prefix_profile(Constant(1.0), 0.5, [0.0, 0.25, 1.0])]
        assert vals == [0.0, 0.5, 1.0]
        assert [r.value for r in prefix_profile(Function(np.exp), 0.3, [0.0])] == [0.0]
        vals = [r.value for r in prefix_profile(Power(1.0), 1.0, [0.0, 1.0, 2.0])]
        assert vals == pytest.approx([0.0, 0.5, 2.0], rel=1e-15)

    def test_matches_pointwise(self):
        f = Function(np.sin)
        grid = np.linspace(0.0, 2.0, 9)
        prof = prefix_profile(f, 0.6, grid)
        for t, r in zip(grid, prof):
            assert r == jumarie_integral(f, 0.6, t)

    @pytest.mark.parametrize("grid", [[0.1, 0.2], [0.0, 0.5, 0.5], [], [0.0, 1.0, 0.5]])
    def test_grid_validation(self, grid):
        with pytest.raises(DomainError):
            prefix_profile(Constant(1.0), 0.5, grid)

    def test_failure_carries_index(self):
        cfg = QuadratureConfig(max_evals=15)
        f = Function(lambda x: np.sin(40.0 * x))
        with pytest.raises(ConvergenceError) as info:
            prefix_profile(f, 1.0, [0.0, 1e-3, 5.0], cfg)
        assert info.value.index == 2


# {{{ properties


def _smooth(coeffs):
    a, b, c = coeffs
    return lambda x: a * np.cos(b * x) + c * x


smooth_params = st.tuples(st.floats(-3, 3), st.floats(0, 4), st.floats(-2, 2))


@settings(max_examples=50, deadline=None)
@given(smooth_params, smooth_params, st.floats(-2, 2), st.floats(-2, 2),
       st.floats(0.05, 1.0), st.floats(0.01, 3.0))
def test_linearity(p, q, a, b, alpha, t):
    f, g = _smooth(p), _smooth(q)
    lhs = jumarie_integral(Function(lambda x: a * f(x) + b * g(x)), alpha, t)
    rf = jumarie_integral(Function(f), alpha, t)
    rg = jumarie_integral(Function(g), alpha, t)
    slack = lhs.error_estimate + abs(a) * rf.error_estimate + abs(b) * rg.error_estimate
    scale = abs(a * rf.value) + abs(b * rg.value) + 1.0
    assert abs(lhs.value - (a * rf.value + b * rg.value)) <= slack + 1e-12 * scale


@settings(max_examples=50, deadline=None)
@given(smooth_params, st.floats(0.01, 5.0))
def test_alpha_one_reduction(p, t):
    f = _smooth(p)
    ref = quad(f, 0.0, t, epsabs=1e-14, epsrel=1e-13)[0]
    val = jumarie_integral(Function(f), 1.0, t).value
    assert abs(val - ref) <= 1e-9 * max(abs(ref), 1e-3)


@settings(max_examples=50, deadline=None)
@given(smooth_params, st.floats(0.05, 1.0), st.floats(0.01, 3.0))
def test_positivity(p, alpha, t):
    f = _smooth(p)
    shift = -float(np.min(f(np.linspace(0.0, t, 2001))))
    pos = Function(lambda x: np.maximum(f(x) + shift, 0.0))
    assert jumarie_integral(pos, alpha, t).value >= -QuadratureConfig().abs_tol


@pytest.mark.parametrize("c", [-2.0, 0.0, 7.0])
def test_scaling_law(c):
    for alpha, t in [(0.3, 0.5), (0.9, 2.0)]:
        assert jumarie_integral(Function(lambda x: c + 0.0 * x), alpha, t).value == pytest.approx(
            c * t**alpha, rel=1e-12, abs=1e-15
        )

# }}}
