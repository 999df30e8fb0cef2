"""How many repeats to run.

Closed-form sample sizes for an absolute error target on p, the lower
bound ``L(p)`` on repeats needed for a relative error target on R_c
(optionally scaled per bucket of p), an exact search alternative, and the
adaptive controller that tops up repeats until ``n >= L(p_hat)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

from .binomial_ci import CiMethod, SuccessEstimate, TrialTally, confidence_interval, point_estimate
from .metrics import r_c_from_bounds
from .special import critical_value

__all__ = [
    "DegenerateInputWarning",
    "CapReachedWarning",
    "PlanConfig",
    "PlanRound",
    "PlanResult",
    "SuccessOracle",
    "worst_case_n",
    "worst_case_n_simplified",
    "n_for_target",
    "scaling_function",
    "relative_error_bound",
    "margin_relative_error",
    "exact_n_root_find",
    "adaptive_repeats",
]

DEFAULT_N_CAP = 1_000_000

SuccessOracle = Callable[[int], int]


class DegenerateInputWarning(UserWarning):
    """A boundary estimate (0 or 1) made the requested bound meaningless."""


class CapReachedWarning(UserWarning):
    """A search hit its repeat cap before meeting the target."""


def worst_case_n(epsilon: float, alpha: float = 0.05, *, z: float | None = None,
                 subtract_z2: bool = True) -> int:
    """Repeats guaranteeing an Agresti-Coull error margin of at most ``epsilon``.

    ``ceil((z / 2 eps)^2 - z^2)``, the worst case over p. ``z`` overrides the
    exact critical value (``z=1.96`` with ``subtract_z2=False`` gives the
    commonly quoted 1068 / 9604).
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if epsilon >= 0.5:
        return 1
    if z is None:
        z = critical_value(alpha)
    value = (z / (2.0 * epsilon)) ** 2
    if subtract_z2:
        value -= z * z
    return max(1, math.ceil(value))


def worst_case_n_simplified(epsilon: float) -> int:
    """The z = 2 shortcut ``ceil(1 / eps^2 - 4)``."""
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if epsilon >= 0.5:
        return 1
    return max(1, math.ceil(1.0 / epsilon**2 - 4.0))


def n_for_target(p_hat: float, epsilon: float, alpha: float = 0.05) -> int:
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    if p_hat in (0.0, 1.0):
        warnings.warn(f"p_hat={p_hat} gives a zero-width margin; returning 1",
                      DegenerateInputWarning, stacklevel=2)
        return 1
    z2 = critical_value(alpha) ** 2
    n_hat = math.ceil(z2 * p_hat * (1.0 - p_hat) / epsilon**2)
    return max(1, n_hat - math.ceil(z2))


_SCALE_BUCKETS = ((0.5, 1.0), (0.7, 1.5), (0.8, 2.0), (0.9, 2.5))


def scaling_function(p_hat: float) -> float:
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    for edge, scale in _SCALE_BUCKETS:
        if p_hat <= edge:
            return scale
    return 7.0


@dataclass(frozen=True)
class PlanConfig:
    alpha: float = 0.05
    e_t: float = 0.1
    n_init: int = 100
    use_scaling: bool = False
    n_cap: int = DEFAULT_N_CAP

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not self.e_t > 0.0:
            raise ValueError(f"target relative error must be positive, got {self.e_t!r}")
        if self.n_init < 1:
            raise ValueError(f"n_init must be >= 1, got {self.n_init}")
        if self.n_cap < self.n_init:
            raise ValueError(f"n_cap ({self.n_cap}) must be >= n_init ({self.n_init})")

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "e_t": self.e_t, "n_init": self.n_init,
                "use_scaling": self.use_scaling, "n_cap": self.n_cap}


def relative_error_bound(p_hat: float, cfg: PlanConfig) -> int:
    """``L(p) = ceil(s(p) ([z (1 + e_T) / e_T]^2 (1 - p) / p - z^2))``, at least 1.

    ``s`` is :func:`scaling_function` when ``cfg.use_scaling`` is set and 1
    otherwise.
    """
    if not 0.0 < p_hat < 1.0:
        raise ValueError(f"relative-error bound undefined at p_hat={p_hat!r}")
    z = critical_value(cfg.alpha)
    core = (z * (1.0 + cfg.e_t) / cfg.e_t) ** 2 * (1.0 - p_hat) / p_hat - z * z
    scale = scaling_function(p_hat) if cfg.use_scaling else 1.0
    return max(1, math.ceil(scale * core))


def margin_relative_error(p_hat: float, n: float, alpha: float = 0.05, c: float = 0.99) -> float:
    """e(R_c) when ``p_hat`` is held fixed and the margin interval uses ``n`` repeats."""
    z = critical_value(alpha)
    half = z / math.sqrt(n + z * z) * math.sqrt(p_hat * (1.0 - p_hat))
    lo = max(0.0, p_hat - half)
    hi = min(1.0, p_hat + half)
    return r_c_from_bounds(p_hat, lo, hi, c).rel_error


def exact_n_root_find(p_hat: float, e_t: float, alpha: float = 0.05, c: float = 0.99,
                      n_cap: int = DEFAULT_N_CAP) -> int:
    """Smallest n whose interval around a fixed ``p_hat`` gives e(R_c) <= e_t.

    Doubling to bracket, then bisection; e(R_c) is nonincreasing in n so
    the bracket is valid. Returns ``n_cap`` with a
    :class:`CapReachedWarning` if even ``n_cap`` misses the target.
    """
    if not 0.0 < p_hat < 1.0:
        raise ValueError(f"p_hat must lie in (0, 1), got {p_hat!r}")
    if not e_t > 0.0:
        raise ValueError(f"target relative error must be positive, got {e_t!r}")

    def ok(n: int) -> bool:
        return margin_relative_error(p_hat, n, alpha, c) <= e_t

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        if hi >= n_cap:
            warnings.warn(f"relative error {e_t} not reached within n_cap={n_cap}",
                          CapReachedWarning, stacklevel=2)
            return n_cap
        lo, hi = hi, min(2 * hi, n_cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class PlanRound:
    round: int
    n_total: int
    n_success: int
    p_hat: float
    bound: int | None
    stop: bool

    def as_dict(self) -> dict:
        return {"round": self.round, "n_total": self.n_total, "n_success": self.n_success,
                "p_hat": self.p_hat, "bound": self.bound, "stop": self.stop}


@dataclass
class PlanResult:
    final_n: int
    final_estimate: SuccessEstimate
    bound_value: int | None
    trace: list[PlanRound] = field(default_factory=list)
    capped: bool = False

    def as_dict(self) -> dict:
        return {
            "final_n": self.final_n,
            "final_estimate": self.final_estimate.as_dict(),
            "bound_value": self.bound_value,
            "capped": self.capped,
            "trace": [r.as_dict() for r in self.trace],
        }


def _draw(oracle: SuccessOracle, batch: int) -> int:
    got = int(oracle(batch))
    if not 0 <= got <= batch:
        raise ValueError(f"oracle returned {got} successes for a batch of {batch}")
    return got


def adaptive_repeats(oracle: SuccessOracle, cfg: PlanConfig,
                     on_round: Callable[[PlanRound], None] | None = None) -> PlanResult:
    """Run repeats until ``n >= L(p_hat)``.

    Each round estimates p with the Agresti-Coull point, evaluates the
    bound, and draws ``L - n`` more repeats if short. While no success has
    been seen the bound is undefined and the total is doubled instead.
    ``cfg.n_cap`` stops the loop unconditionally.
    """
    n = min(cfg.n_init, cfg.n_cap)
    n_s = _draw(oracle, n)
    trace: list[PlanRound] = []
    capped = False
    bound: int | None = None
    rnd = 0
    while True:
        rnd += 1
        tally = TrialTally(n, n_s)
        p_hat = point_estimate(tally, CiMethod.AGRESTI_COULL, cfg.alpha)
        if n_s == 0:
            bound = None
            target = 2 * n
        else:
            bound = relative_error_bound(p_hat, cfg)
            target = bound
        done = bound is not None and n >= bound
        if not done and n >= cfg.n_cap:
            capped = done = True
        entry = PlanRound(rnd, n, n_s, p_hat, bound, done)
        trace.append(entry)
        if on_round is not None:
            on_round(entry)
        if done:
            break
        extra = min(target, cfg.n_cap) - n
        n_s += _draw(oracle, extra)
        n += extra

    est = confidence_interval(TrialTally(n, n_s), CiMethod.AGRESTI_COULL, cfg.alpha)
    return PlanResult(final_n=n, final_estimate=est, bound_value=bound, trace=trace, capped=capped)
