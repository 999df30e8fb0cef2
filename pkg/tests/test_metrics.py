from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from repeatstat.binomial_ci import TrialTally, confidence_interval
from repeatstat.metrics import (
    INF,
    NoSuccessError,
    RunRecord,
    SuccessCurve,
    cets,
    cets_profile,
    classify_mode,
    optimize_cets,
    r_c_from_bounds,
    r_c_interval,
    repeats_to_confidence,
    success_curve,
)

probs = st.floats(0.0, 1.0)
levels = st.floats(0.5, 0.999)


def test_r_c_closed_form():
    assert repeats_to_confidence(0.5, 0.99) == pytest.approx(math.log(0.01) / math.log(0.5))
    assert repeats_to_confidence(0.46) == pytest.approx(7.4737, abs=1e-4)
    assert repeats_to_confidence(0.0) == INF
    assert repeats_to_confidence(0.99) == 1.0
    assert repeats_to_confidence(1.0) == 1.0


@given(probs, levels)
def test_r_c_at_least_one(p, c):
    assert repeats_to_confidence(p, c) >= 1.0


@given(probs, probs, levels)
def test_r_c_nonincreasing_in_p(p1, p2, c):
    lo, hi = sorted((p1, p2))
    assert repeats_to_confidence(hi, c) <= repeats_to_confidence(lo, c)


@given(st.floats(0.01, 0.99), levels, levels)
def test_r_c_nondecreasing_in_c(p, c1, c2):
    lo, hi = sorted((c1, c2))
    assert repeats_to_confidence(p, lo) <= repeats_to_confidence(p, hi) + 1e-12


@given(levels, st.floats(0.0, 1.0))
def test_r_c_clamped_when_p_at_least_c(c, frac):
    p = c + frac * (1.0 - c)
    assert repeats_to_confidence(p, c) == 1.0


@given(st.floats(1e-6, 0.98))
def test_r_c_guarantees_confidence(p):
    # running ceil(R) independent repeats reaches the target confidence
    r = repeats_to_confidence(p, 0.99)
    assert 1.0 - (1.0 - p) ** math.ceil(r) >= 0.99 - 1e-12


@pytest.mark.parametrize("c", [0.0, 1.0, 1.5])
def test_r_c_bad_level(c):
    with pytest.raises(ValueError):
        repeats_to_confidence(0.5, c)


def test_r_c_from_bounds_table_row():
    m = r_c_from_bounds(0.46, 0.36, 0.56)
    assert m.point == pytest.approx(7.47, abs=0.01)
    assert (m.lower, m.upper) == pytest.approx((5.61, 10.32), abs=0.01)
    assert m.rel_error == pytest.approx(0.38, abs=0.01)


def test_r_c_from_bounds_orders_and_validates():
    with pytest.raises(ValueError):
        r_c_from_bounds(0.5, 0.6, 0.7)
    m = r_c_from_bounds(0.0, 0.0, 0.05)
    assert m.point == INF and m.upper == INF and m.rel_error == INF


@given(st.integers(1, 500).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))),
       st.sampled_from(["wald", "wilson", "agresti-coull", "jeffreys", "margin"]))
def test_r_c_interval_contains_point(nk, method):
    n, k = nk
    m = r_c_interval(confidence_interval(TrialTally(n, k), method))
    assert 1.0 <= m.lower <= m.point <= m.upper


def test_cets_scales_r_c():
    est = confidence_interval(TrialTally(100, 46))
    ce = cets(250, 2.0, est)
    r = r_c_interval(est)
    assert (ce.point, ce.lower, ce.upper) == pytest.approx((500 * r.point, 500 * r.lower, 500 * r.upper))
    assert ce.width == pytest.approx(ce.upper - ce.lower)
    with pytest.raises(ValueError):
        cets(0, 1.0, est)
    with pytest.raises(ValueError):
        cets(1, 0.0, est)


@st.composite
def record_sets(draw):
    max_iter = draw(st.integers(1, 60))
    firsts = draw(st.lists(st.one_of(st.none(), st.integers(1, max_iter)), min_size=1, max_size=80))
    return max_iter, [RunRecord(k, f) for k, f in enumerate(firsts)]


@given(record_sets())
def test_success_curve_monotone_and_matches_brute_force(data):
    max_iter, recs = data
    curve = success_curve(recs, max_iter)
    assert curve.n == len(recs)
    prev = 0
    for i in range(1, max_iter + 1):
        s = curve.successes(i)
        assert s == sum(r.first_success_iter is not None and r.first_success_iter <= i for r in recs)
        assert prev <= s <= curve.n
        prev = s


def test_success_curve_errors():
    with pytest.raises(ValueError):
        success_curve([], 10)
    with pytest.raises(ValueError):
        success_curve([RunRecord(0, 11)], 10)
    with pytest.raises(ValueError):
        RunRecord(0, 0)
    with pytest.raises(ValueError):
        SuccessCurve(3, (2, 1, 3), 5)
    with pytest.raises(IndexError):
        success_curve([RunRecord(0, 2)], 3).successes(4)


@given(record_sets(), st.floats(0.5, 0.999), st.floats(0.1, 10.0))
def test_optimize_cets_against_exhaustive_scan(data, c, e_itr):
    max_iter, recs = data
    assume(any(r.first_success_iter is not None for r in recs))
    curve = success_curve(recs, max_iter)
    i_star, est = optimize_cets(curve, c, e_itr)
    scan = []
    for i in range(1, max_iter + 1):
        p = curve.p_hat(i)
        scan.append(i * e_itr * repeats_to_confidence(p, c))
    best = min(scan)
    assert scan[i_star - 1] == pytest.approx(best, rel=1e-12)
    assert i_star == 1 + next(k for k, v in enumerate(scan) if v <= best * (1 + 1e-12))
    assert est.point == pytest.approx(best, rel=1e-12)
    assert all(scan[i_star - 1] <= v * (1 + 1e-12) for v in scan)


def test_optimize_cets_no_success():
    with pytest.raises(NoSuccessError):
        optimize_cets(success_curve([RunRecord(0, None)], 5))


def test_cets_profile_inf_where_no_success():
    curve = success_curve([RunRecord(0, 3), RunRecord(1, None)], 4)
    prof = cets_profile(curve)
    assert np.isinf(prof[:2]).all() and np.isfinite(prof[2:]).all()


def test_classify_mode():
    assert classify_mode(10, 5000) == "fail-fast"
    assert classify_mode(4900, 5000) == "patient"
    assert classify_mode(2500, 5000) == "intermediate"
    with pytest.raises(ValueError):
        classify_mode(0, 10)
