import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dtalpha.errors import DomainError
from dtalpha.specialfn import beta, gamma, lbeta, lgamma

# frozen from the oracle int_0^inf t^(-1/2) e^(-t) dt (scipy.integrate.quad, split at 1)
GAMMA_HALF = 1.7724538509055159
GAMMA_3_5 = 2.5 * 1.5 * 0.5 * GAMMA_HALF


def _gamma_oracle(x):
    f = lambda t: t ** (x - 1.0) * math.exp(-t)
    a = quad(f, 0.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200)[0]
    b = quad(f, 1.0, np.inf, epsabs=1e-15, epsrel=1e-14, limit=200)[0]
    return a + b


def _beta_oracle(a, b):
    return quad(lambda s: s ** (a - 1.0) * (1.0 - s) ** (b - 1.0), 0.0, 1.0,
                epsabs=1e-15, epsrel=1e-13, limit=400)[0]


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (5.0, 24.0), (0.5, GAMMA_HALF), (3.5, GAMMA_3_5)])
def test_gamma_examples(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-13)


def test_gamma_half_matches_integral_oracle():
    assert _gamma_oracle(0.5) == pytest.approx(GAMMA_HALF, rel=1e-12)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan, math.inf])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_gamma_overflow():
    with pytest.raises(OverflowError):
        gamma(200.0)


def test_gamma_relative_accuracy_against_stdlib():
    xs = np.concatenate([np.linspace(1e-3, 1.0, 300), np.linspace(1.0, 170.0, 2000)])
    err = max(abs(gamma(x) / math.gamma(x) - 1.0) for x in xs)
    assert err <= 1e-13


@pytest.mark.parametrize("x", np.linspace(0.1, 20.0, 60))
def test_gamma_recurrence(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


def test_lgamma_matches_log_gamma():
    for x in [0.01, 0.3, 1.0, 1.5, 2.0, 7.25, 100.0]:
        assert lgamma(x) == pytest.approx(math.log(gamma(x)), rel=1e-13, abs=1e-14)
    # past the overflow of gamma itself
    assert lgamma(500.0) == pytest.approx(math.lgamma(500.0), rel=1e-13)


@pytest.mark.parametrize("a, b, expected", [(1.0, 1.0, 1.0), (3.0, 0.5, 16.0 / 15.0), (2.0, 2.0, 1.0 / 6.0)])
def test_beta_examples(a, b, expected):
    assert _beta_oracle(a, b) == pytest.approx(expected, rel=1e-10)
    assert beta(a, b) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, -2.0), (math.nan, 1.0)])
def test_beta_domain(a, b):
    with pytest.raises(DomainError):
        beta(a, b)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 300.0), st.floats(0.01, 300.0))
def test_beta_symmetry(a, b):
    assert beta(a, b) == pytest.approx(beta(b, a), rel=1e-15)


def test_beta_integral_consistency():
    rng = np.random.default_rng(2024)
    for a, b in rng.uniform(0.2, 5.0, size=(50, 2)):
        assert beta(a, b) == pytest.approx(_beta_oracle(a, b), rel=1e-9)


def test_beta_large_arguments_do_not_overflow():
    # Gamma(a + b) overflows here, B(a, b) does not
    value = beta(150.0, 120.0)
    assert math.isfinite(value) and value > 0.0
    assert math.log(value) == pytest.approx(lbeta(150.0, 120.0), rel=1e-13)
    assert math.log(value) == pytest.approx(
        math.lgamma(150.0) + math.lgamma(120.0) - math.lgamma(270.0), rel=1e-12
    )
