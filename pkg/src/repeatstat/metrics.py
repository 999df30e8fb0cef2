"""R_c and CETS point estimates, confidence intervals and optimisation.

``R_c(p) = max(ln(1 - c) / ln(1 - p), 1)`` is the number of independent
repeats needed to hit the target at least once with probability ``c``
when a single repeat succeeds with probability ``p``. CETS scales it by
the per-repeat effort ``i * e_itr``.

Point estimates use the raw ratio ``n_s / n``; interval bounds come from
whichever interval the caller built, mapped through the decreasing
function ``p -> R_c(p)`` (so the upper p bound gives the lower R_c bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .binomial_ci import (
    DEFAULT_ALPHA,
    DEFAULT_METHOD,
    CiMethod,
    SuccessEstimate,
    TrialTally,
    confidence_interval,
)

__all__ = [
    "INF",
    "NoSuccessError",
    "MetricEstimate",
    "CetsEstimate",
    "RunRecord",
    "SuccessCurve",
    "repeats_to_confidence",
    "r_c_from_bounds",
    "r_c_interval",
    "cets",
    "success_curve",
    "cets_profile",
    "optimize_cets",
    "classify_mode",
]

# p = 0 means the target is never reached; float inf orders above every
# finite repeat count, which is all optimize_cets needs.
INF = math.inf


class NoSuccessError(ValueError):
    """No budget in the curve has a single observed success."""


def _check_c(c: float) -> None:
    if not 0.0 < c < 1.0:
        raise ValueError(f"confidence c must lie in (0, 1), got {c!r}")


def repeats_to_confidence(p: float, c: float = 0.99) -> float:
    _check_c(c)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"success probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return INF
    if p >= c:
        return 1.0
    return max(math.log1p(-c) / math.log1p(-p), 1.0)


def _relative_error(point: float, lower: float, upper: float) -> float:
    if math.isinf(point) or math.isinf(upper):
        return INF
    return max(point - lower, upper - point) / point


@dataclass(frozen=True)
class MetricEstimate:
    c: float
    point: float
    lower: float
    upper: float
    rel_error: float

    def as_dict(self) -> dict:
        return {"c": self.c, "point": self.point, "lower": self.lower,
                "upper": self.upper, "rel_error": self.rel_error}


@dataclass(frozen=True)
class CetsEstimate:
    i: int
    e_itr: float
    c: float
    point: float
    lower: float
    upper: float
    rel_error: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_dict(self) -> dict:
        return {"i": self.i, "e_itr": self.e_itr, "c": self.c, "point": self.point,
                "lower": self.lower, "upper": self.upper, "rel_error": self.rel_error}


def r_c_from_bounds(p_hat: float, p_lower: float, p_upper: float, c: float = 0.99) -> MetricEstimate:
    """R_c with its interval, given a point estimate and interval for p."""
    if not p_lower <= p_hat <= p_upper:
        raise ValueError(f"need p_lower <= p_hat <= p_upper, got {p_lower}, {p_hat}, {p_upper}")
    point = repeats_to_confidence(p_hat, c)
    lower = repeats_to_confidence(p_upper, c)
    upper = repeats_to_confidence(p_lower, c)
    return MetricEstimate(c=c, point=point, lower=lower, upper=upper,
                          rel_error=_relative_error(point, lower, upper))


def r_c_interval(est: SuccessEstimate, c: float = 0.99) -> MetricEstimate:
    return r_c_from_bounds(est.ratio, est.lower, est.upper, c)


def cets(i: int, e_itr: float, est: SuccessEstimate, c: float = 0.99) -> CetsEstimate:
    if i < 1:
        raise ValueError(f"iteration budget must be >= 1, got {i}")
    if not e_itr > 0.0:
        raise ValueError(f"effort per iteration must be positive, got {e_itr!r}")
    r = r_c_interval(est, c)
    scale = i * e_itr
    return CetsEstimate(i=i, e_itr=e_itr, c=c, point=scale * r.point,
                        lower=scale * r.lower, upper=scale * r.upper,
                        rel_error=r.rel_error)


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one repeat: first iteration at which the target was hit.

    ``first_success_iter`` is ``None`` when the repeat exhausted its
    budget. ``witness`` optionally keeps the solution for auditing.
    """

    repeat_id: int
    first_success_iter: int | None
    witness: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        if self.first_success_iter is not None and self.first_success_iter < 1:
            raise ValueError("first_success_iter must be >= 1 when present")


@dataclass(frozen=True)
class SuccessCurve:
    """Cumulative success counts for every budget ``1..max_iter``.

    ``successes_by_iter[i - 1]`` is the number of repeats that had
    succeeded within ``i`` iterations.
    """

    max_iter: int
    successes_by_iter: tuple[int, ...]
    n: int

    def __post_init__(self) -> None:
        if self.max_iter < 1 or self.n < 1:
            raise ValueError("curve needs max_iter >= 1 and n >= 1")
        if len(self.successes_by_iter) != self.max_iter:
            raise ValueError("successes_by_iter must have one entry per budget")
        prev = 0
        for s in self.successes_by_iter:
            if s < prev or s > self.n:
                raise ValueError("success counts must be nondecreasing and at most n")
            prev = s

    def successes(self, i: int) -> int:
        if not 1 <= i <= self.max_iter:
            raise IndexError(f"budget {i} outside 1..{self.max_iter}")
        return self.successes_by_iter[i - 1]

    def tally(self, i: int) -> TrialTally:
        return TrialTally(self.n, self.successes(i))

    def p_hat(self, i: int) -> float:
        return self.successes(i) / self.n

    def rows(self) -> Iterable[tuple[int, int, int]]:
        for i, s in enumerate(self.successes_by_iter, start=1):
            yield i, s, self.n


def success_curve(records: Sequence[RunRecord], max_iter: int) -> SuccessCurve:
    if not records:
        raise ValueError("cannot build a success curve from zero records")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    hits = np.zeros(max_iter + 1, dtype=np.int64)
    for rec in records:
        f = rec.first_success_iter
        if f is None:
            continue
        if f > max_iter:
            raise ValueError(f"record {rec.repeat_id} succeeded at {f}, beyond max_iter={max_iter}")
        hits[f] += 1
    cumulative = np.cumsum(hits)[1:]
    return SuccessCurve(max_iter=max_iter,
                        successes_by_iter=tuple(int(s) for s in cumulative),
                        n=len(records))


def cets_profile(curve: SuccessCurve, c: float = 0.99, e_itr: float = 1.0) -> np.ndarray:
    """Point CETS for every budget (``inf`` where nothing succeeded)."""
    _check_c(c)
    s = np.asarray(curve.successes_by_iter, dtype=float)
    p = s / curve.n
    budgets = np.arange(1, curve.max_iter + 1, dtype=float)
    r = np.full_like(p, INF)
    easy = p >= c
    mid = (p > 0.0) & ~easy
    r[easy] = 1.0
    r[mid] = np.maximum(math.log1p(-c) / np.log1p(-p[mid]), 1.0)
    return budgets * e_itr * r


def optimize_cets(curve: SuccessCurve, c: float = 0.99, e_itr: float = 1.0,
                  method: CiMethod | str = DEFAULT_METHOD,
                  alpha: float = DEFAULT_ALPHA) -> tuple[int, CetsEstimate]:
    """Budget minimising the point CETS, and the full estimate there.

    Ties go to the smallest budget. Budgets with no observed success have
    infinite CETS and can never win.
    """
    profile = cets_profile(curve, c, e_itr)
    if not np.isfinite(profile).any():
        raise NoSuccessError("no success observed at any iteration budget")
    i_star = int(np.argmin(profile)) + 1  # argmin returns the first minimum
    est = confidence_interval(curve.tally(i_star), method, alpha)
    return i_star, cets(i_star, e_itr, est, c)


def classify_mode(i_star: int, max_iter: int) -> str:
    """``fail-fast`` in the bottom 10% of the budget range, ``patient`` in the top 10%."""
    if not 1 <= i_star <= max_iter:
        raise ValueError(f"need 1 <= i_star <= max_iter, got {i_star}, {max_iter}")
    if i_star <= 0.1 * max_iter:
        return "fail-fast"
    if i_star >= 0.9 * max_iter:
        return "patient"
    return "intermediate"
