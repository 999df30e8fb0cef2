from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st
from scipy import special as sps
from scipy import stats

from repeatstat.special import (
    NumericalError,
    beta_quantile,
    binomial_pmf,
    critical_value,
    log_beta,
    log_gamma,
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
)


def _quantile_by_bisection(q: float) -> float:
    # independent oracle: invert erf-based cdf by plain bisection
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * math.erfc(-mid / math.sqrt(2.0)) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_critical_value_frozen():
    assert critical_value(0.05) == pytest.approx(1.959963984540054, abs=1e-12)
    assert critical_value(0.10) == pytest.approx(1.6448536269514722, abs=1e-12)
    assert critical_value(0.01) == pytest.approx(2.5758293035489004, abs=1e-12)


@pytest.mark.parametrize("q", [1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.975])
def test_normal_quantile_matches_bisection(q):
    assert normal_quantile(q) == pytest.approx(_quantile_by_bisection(q), abs=1e-9)


@pytest.mark.parametrize("q", [1e-300, 1e-20, 0.9999, 1 - 1e-9, 1 - 2 ** -50])
def test_normal_quantile_extreme_tails_vs_scipy(q):
    # bisection on the cdf saturates near 1, so the upper tail uses ndtri
    assert normal_quantile(q) == pytest.approx(sps.ndtri(q), rel=1e-12)


@given(st.floats(min_value=1e-10, max_value=1 - 1e-10))
def test_normal_quantile_roundtrip_and_symmetry(q):
    x = normal_quantile(q)
    assert normal_cdf(x) == pytest.approx(q, rel=1e-9, abs=1e-14)
    assert normal_quantile(1.0 - q) == pytest.approx(-x, abs=1e-7)


def test_normal_quantile_symmetric_exactly():
    # dyadic levels keep 1 - q exact in binary
    for q in (0.25, 0.125, 0.375, 2 ** -10):
        assert normal_quantile(q) == -normal_quantile(1.0 - q)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_normal_quantile_domain(q):
    with pytest.raises(ValueError):
        normal_quantile(q)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -1.0])
def test_critical_value_domain(alpha):
    with pytest.raises(ValueError):
        critical_value(alpha)


@given(st.floats(min_value=1e-3, max_value=170.0))
def test_log_gamma_matches_stdlib(x):
    assert log_gamma(x) == pytest.approx(math.lgamma(x), rel=1e-12, abs=1e-12)


def test_log_gamma_small_integers():
    for k in range(1, 15):
        assert log_gamma(float(k)) == pytest.approx(math.log(math.factorial(k - 1)), abs=1e-12)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), abs=1e-14)


def test_log_gamma_domain():
    with pytest.raises(ValueError):
        log_gamma(0.0)


def test_log_beta_identity():
    assert log_beta(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), abs=1e-14)


def test_incomplete_beta_closed_forms():
    # I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a
    assert regularized_incomplete_beta(0.3, 1.0, 4.0) == pytest.approx(1 - 0.7 ** 4, abs=1e-14)
    assert regularized_incomplete_beta(0.3, 5.0, 1.0) == pytest.approx(0.3 ** 5, abs=1e-14)
    assert regularized_incomplete_beta(0.3, 2.0, 3.0) == pytest.approx(0.3483, abs=1e-12)
    assert regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0
    assert regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0


@given(st.floats(0.0, 1.0), st.floats(0.05, 500.0), st.floats(0.05, 500.0))
def test_incomplete_beta_vs_scipy(x, a, b):
    assert regularized_incomplete_beta(x, a, b) == pytest.approx(sps.betainc(a, b, x), abs=1e-10)


@given(st.floats(0.01, 0.99), st.floats(0.1, 300.0), st.floats(0.1, 300.0))
def test_incomplete_beta_symmetry(x, a, b):
    lhs = regularized_incomplete_beta(x, a, b)
    rhs = 1.0 - regularized_incomplete_beta(1.0 - x, b, a)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@given(st.floats(1e-6, 1 - 1e-6), st.floats(0.5, 2000.0), st.floats(0.5, 2000.0))
def test_beta_quantile_roundtrip(q, a, b):
    x = beta_quantile(q, a, b)
    assert 0.0 <= x <= 1.0
    assert regularized_incomplete_beta(x, a, b) == pytest.approx(q, abs=1e-9)


def test_beta_quantile_vs_scipy_table_cases():
    for ns in (10, 50, 90):
        a, b = ns + 0.5, 100 - ns + 0.5
        for q in (0.05, 0.95):
            assert beta_quantile(q, a, b) == pytest.approx(stats.beta.ppf(q, a, b), abs=1e-10)


def test_beta_quantile_raises_numerical_error_when_starved():
    with pytest.raises(NumericalError) as info:
        beta_quantile(0.3, 2.0, 3.0, max_iter=2)
    assert info.value.diagnostics


@given(st.integers(0, 60), st.floats(0.0, 1.0))
def test_binomial_pmf_sums_to_one(n, p):
    total = math.fsum(binomial_pmf(k, n, p) for k in range(n + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [20, 1500])
def test_binomial_pmf_vs_scipy(n):
    for k in (0, 1, n // 3, n // 2, n):
        assert binomial_pmf(k, n, 0.37) == pytest.approx(stats.binom.pmf(k, n, 0.37), rel=1e-9, abs=1e-300)
