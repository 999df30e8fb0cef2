"""Binomial proportion estimates and confidence intervals.

Four textbook intervals are provided (Wald, Wilson, Agresti-Coull,
Jeffreys) plus ``MARGIN``: the Agresti-Coull error margin
``z / sqrt(n + z^2) * sqrt(p(1 - p))`` laid symmetrically around the raw
ratio ``n_s / n``. The margin form is what the metric tables are built
from, so it is the natural choice when propagating uncertainty into R_c.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .special import beta_quantile, binomial_pmf, critical_value

__all__ = [
    "CiMethod",
    "TrialTally",
    "SuccessEstimate",
    "DEFAULT_ALPHA",
    "DEFAULT_METHOD",
    "point_estimate",
    "error_margin",
    "confidence_interval",
    "interval_width",
    "relative_width",
    "exact_coverage",
]

DEFAULT_ALPHA = 0.05


class CiMethod(str, enum.Enum):
    WALD = "wald"
    WILSON = "wilson"
    AGRESTI_COULL = "agresti-coull"
    JEFFREYS = "jeffreys"
    MARGIN = "margin"

    @classmethod
    def parse(cls, value: "CiMethod | str") -> "CiMethod":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"ac": "agresti-coull", "agresticoull": "agresti-coull"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown CI method {value!r}; choose from {choices}") from None


DEFAULT_METHOD = CiMethod.AGRESTI_COULL


@dataclass(frozen=True)
class TrialTally:
    """``n_s`` successes out of ``n`` repeats."""

    n: int
    n_s: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or int(self.n_s) != self.n_s:
            raise ValueError("tally counts must be integers")
        if self.n < 1:
            raise ValueError(f"tally needs n >= 1, got n={self.n}")
        if not 0 <= self.n_s <= self.n:
            raise ValueError(f"successes must lie in [0, n]; got n_s={self.n_s}, n={self.n}")

    @property
    def n_f(self) -> int:
        return self.n - self.n_s

    @property
    def ratio(self) -> float:
        return self.n_s / self.n


@dataclass(frozen=True)
class SuccessEstimate:
    point: float
    lower: float
    upper: float
    alpha: float
    method: CiMethod
    tally: TrialTally
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        """Maximum-likelihood estimate ``n_s / n`` regardless of method."""
        return self.tally.ratio

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "alpha": self.alpha,
            "n": self.tally.n,
            "n_s": self.tally.n_s,
            "ratio": self.ratio,
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "width": self.width,
            "degenerate": self.degenerate,
        }


def _z(alpha: float) -> float:
    return critical_value(alpha)


def point_estimate(tally: TrialTally, method: CiMethod | str = DEFAULT_METHOD,
                   alpha: float = DEFAULT_ALPHA) -> float:
    method = CiMethod.parse(method)
    if method is CiMethod.AGRESTI_COULL:
        z2 = _z(alpha) ** 2
        return (tally.n_s + z2 / 2.0) / (tally.n + z2)
    return tally.ratio


def error_margin(tally: TrialTally, alpha: float = DEFAULT_ALPHA) -> float:
    """Half-width ``z / sqrt(n + z^2) * sqrt(p (1 - p))`` at ``p = n_s / n``."""
    z = _z(alpha)
    p = tally.ratio
    return z / math.sqrt(tally.n + z * z) * math.sqrt(p * (1.0 - p))


def _clip(x: float) -> float:
    return min(1.0, max(0.0, x))


def confidence_interval(tally: TrialTally, method: CiMethod | str = DEFAULT_METHOD,
                        alpha: float = DEFAULT_ALPHA) -> SuccessEstimate:
    """Two-sided ``1 - alpha`` interval for the success probability.

    Normal-approximation intervals are clipped to [0, 1]. Wald and the
    margin form collapse to a point when ``n_s`` is 0 or ``n``; the
    estimate is flagged ``degenerate`` in that case. Jeffreys uses the
    usual boundary fix (lower 0 at ``n_s = 0``, upper 1 at ``n_s = n``).
    """
    method = CiMethod.parse(method)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    n, n_s = tally.n, tally.n_s
    p = tally.ratio
    z = _z(alpha)
    z2 = z * z
    degenerate = False

    if method is CiMethod.WALD:
        half = z / math.sqrt(n) * math.sqrt(p * (1.0 - p))
        point, lower, upper = p, p - half, p + half
        degenerate = n_s in (0, n)
    elif method is CiMethod.WILSON:
        scale = 1.0 / (1.0 + z2 / n)
        centre = p + z2 / (2.0 * n)
        half = z / (2.0 * n) * math.sqrt(4.0 * n * p * (1.0 - p) + z2)
        point, lower, upper = p, scale * (centre - half), scale * (centre + half)
        # exact endpoints at the boundary; the formula leaves rounding residue
        if n_s == 0:
            lower = 0.0
        if n_s == n:
            upper = 1.0
    elif method is CiMethod.AGRESTI_COULL:
        n_hat = n + z2
        point = (n_s + z2 / 2.0) / n_hat
        half = z / math.sqrt(n_hat) * math.sqrt(point * (1.0 - point))
        lower, upper = point - half, point + half
    elif method is CiMethod.JEFFREYS:
        a, b = n_s + 0.5, n - n_s + 0.5
        point = p
        lower = 0.0 if n_s == 0 else beta_quantile(alpha / 2.0, a, b)
        upper = 1.0 if n_s == n else beta_quantile(1.0 - alpha / 2.0, a, b)
    else:  # MARGIN
        half = error_margin(tally, alpha)
        point, lower, upper = p, p - half, p + half
        degenerate = n_s in (0, n)

    return SuccessEstimate(
        point=point,
        lower=_clip(lower),
        upper=_clip(upper),
        alpha=alpha,
        method=method,
        tally=tally,
        degenerate=degenerate,
    )


def interval_width(est: SuccessEstimate) -> float:
    return est.upper - est.lower


def relative_width(est: SuccessEstimate) -> float:
    """Width over the point estimate; ``inf`` when the point is zero."""
    if est.point <= 0.0:
        return math.inf
    return interval_width(est) / est.point


def exact_coverage(method: CiMethod | str, p: float, n: int,
                   alpha: float = DEFAULT_ALPHA) -> float:
    """P(p lies in the interval) summed exactly over all n+1 outcomes."""
    method = CiMethod.parse(method)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    total = 0.0
    for k in range(n + 1):
        est = confidence_interval(TrialTally(n, k), method, alpha)
        if est.lower <= p <= est.upper:
            total += binomial_pmf(k, n, p)
    return min(1.0, total)
