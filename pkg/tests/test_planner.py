from __future__ import annotations

import math
import warnings

import pytest
from hypothesis import given, strategies as st

from repeatstat.planner import (
    CapReachedWarning,
    DegenerateInputWarning,
    PlanConfig,
    adaptive_repeats,
    exact_n_root_find,
    margin_relative_error,
    n_for_target,
    relative_error_bound,
    scaling_function,
    worst_case_n,
    worst_case_n_simplified,
)
from repeatstat.rng import RngSpec
from repeatstat.sim import bernoulli_oracle

Z = 1.959963984540054


def test_worst_case_frozen_values():
    assert worst_case_n(0.03) == 1064
    assert worst_case_n(0.01) in (9600, 9601)
    assert worst_case_n(0.03, z=1.96, subtract_z2=False) == 1068
    assert worst_case_n(0.01, z=1.96, subtract_z2=False) == 9604
    assert worst_case_n(0.6) == 1


@given(st.floats(0.001, 0.49))
def test_worst_case_guarantees_margin(eps):
    # at n the largest AC half-width z / (2 sqrt(n + z^2)) is within eps
    n = worst_case_n(eps)
    assert Z / (2 * math.sqrt(n + Z * Z)) <= eps + 1e-12
    if n > 1:
        assert Z / (2 * math.sqrt(n - 1 + Z * Z)) > eps


@given(st.floats(0.001, 0.49))
def test_simplified_is_exact_closed_form(eps):
    assert worst_case_n_simplified(eps) == max(1, math.ceil(1 / eps**2 - 4))


def test_simplified_examples():
    assert worst_case_n_simplified(0.1) == 96
    assert worst_case_n_simplified(0.03) == 1108


@given(st.floats(0.01, 0.99), st.floats(0.005, 0.2))
def test_n_for_target_never_exceeds_worst_case_plus_rounding(p, eps):
    assert 1 <= n_for_target(p, eps) <= worst_case_n(eps) + 1


def test_n_for_target_boundary_warns():
    with pytest.warns(DegenerateInputWarning):
        assert n_for_target(0.0, 0.05) == 1
    with pytest.raises(ValueError):
        n_for_target(0.5, 0.0)


def test_n_for_target_value():
    z2 = Z * Z
    assert n_for_target(0.3, 0.05) == math.ceil(z2 * 0.21 / 0.0025) - math.ceil(z2)


@pytest.mark.parametrize("p,s", [(0.1, 1.0), (0.5, 1.0), (0.6, 1.5), (0.7, 1.5), (0.75, 2.0),
                                 (0.8, 2.0), (0.85, 2.5), (0.9, 2.5), (0.95, 7.0), (1.0, 7.0)])
def test_scaling_function_buckets(p, s):
    assert scaling_function(p) == s


def test_relative_bound_examples():
    assert relative_error_bound(0.9, PlanConfig(use_scaling=True)) == 120
    unscaled = relative_error_bound(0.9, PlanConfig())
    core = (Z * 1.1 / 0.1) ** 2 * (0.1 / 0.9) - Z * Z
    assert unscaled == math.ceil(core)
    with pytest.raises(ValueError):
        relative_error_bound(0.0, PlanConfig())


@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
def test_relative_bound_nonincreasing_in_p(p1, p2):
    lo, hi = sorted((p1, p2))
    cfg = PlanConfig()
    assert relative_error_bound(hi, cfg) <= relative_error_bound(lo, cfg)


@given(st.floats(0.01, 0.99))
def test_scaled_bound_at_least_unscaled(p):
    assert relative_error_bound(p, PlanConfig(use_scaling=True)) >= relative_error_bound(p, PlanConfig())


def _linear_scan(p, e_t, cap=200_000):
    for n in range(1, cap + 1):
        if margin_relative_error(p, n) <= e_t:
            return n
    return cap


@pytest.mark.parametrize("p,e_t", [(0.1, 0.2), (0.5, 0.1), (0.9, 0.1), (0.3, 0.05), (0.97, 0.3)])
def test_exact_root_find_vs_linear_scan(p, e_t):
    assert exact_n_root_find(p, e_t) == _linear_scan(p, e_t)


def test_exact_root_find_cap():
    with pytest.warns(CapReachedWarning):
        assert exact_n_root_find(0.01, 0.001, n_cap=1000) == 1000


def test_config_validation():
    with pytest.raises(ValueError):
        PlanConfig(e_t=0.0)
    with pytest.raises(ValueError):
        PlanConfig(n_init=0)
    with pytest.raises(ValueError):
        PlanConfig(n_init=10, n_cap=5)


def test_adaptive_all_success_stops_at_init():
    res = adaptive_repeats(lambda b: b, PlanConfig(n_init=100))
    assert res.final_n == 100 and len(res.trace) == 1 and res.trace[0].stop


def test_adaptive_doubles_while_no_success():
    seen = []
    res = adaptive_repeats(lambda b: 0, PlanConfig(n_init=10, n_cap=160), on_round=seen.append)
    assert [r.n_total for r in res.trace] == [10, 20, 40, 80, 160]
    assert res.capped and res.bound_value is None
    assert seen == res.trace


def test_adaptive_rejects_bad_oracle():
    with pytest.raises(ValueError):
        adaptive_repeats(lambda b: b + 1, PlanConfig())


@given(st.floats(0.05, 0.95), st.integers(0, 2**32), st.booleans())
def test_adaptive_postcondition(p, seed, scaled):
    cfg = PlanConfig(use_scaling=scaled, n_init=50)
    res = adaptive_repeats(bernoulli_oracle(p, RngSpec(seed)), cfg)
    assert res.capped or res.final_n >= res.bound_value
    totals = [r.n_total for r in res.trace]
    assert totals == sorted(totals)
    assert res.final_n == totals[-1]
    assert res.trace[-1].stop and not any(r.stop for r in res.trace[:-1])


def test_adaptive_cap_respected():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        res = adaptive_repeats(bernoulli_oracle(0.001, RngSpec(3)), PlanConfig(n_init=100, n_cap=500))
    assert res.final_n <= 500
