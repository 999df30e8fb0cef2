"""Special functions used by the interval and planning code.

Everything here is scalar, pure Python and dependency free:

- ``normal_cdf`` / ``normal_quantile``: standard normal distribution.
- ``log_gamma``: Lanczos approximation (g=7, 9 coefficients).
- ``regularized_incomplete_beta``: continued fraction with the usual
  symmetry switch.
- ``beta_quantile``: bisection inverse of the incomplete beta.
- ``binomial_pmf``.
"""

from __future__ import annotations

import math

__all__ = [
    "NumericalError",
    "normal_cdf",
    "normal_quantile",
    "critical_value",
    "log_gamma",
    "log_beta",
    "regularized_incomplete_beta",
    "beta_quantile",
    "binomial_pmf",
]


class NumericalError(ArithmeticError):
    """An iterative routine failed to converge."""

    def __init__(self, message: str, **diagnostics: float) -> None:
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)
        self.diagnostics = diagnostics


# Acklam's rational approximation for the inverse normal CDF.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via ``erfc`` (accurate in both tails)."""
    return 0.5 * math.erfc(-x / _SQRT2)


def _acklam(q: float) -> float:
    if q < _P_LOW:
        r = math.sqrt(-2.0 * math.log(q))
        num = ((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]
        den = (((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0
        return num / den
    if q > 1.0 - _P_LOW:
        return -_acklam(1.0 - q)
    r = q - 0.5
    s = r * r
    num = (((((_A[0] * s + _A[1]) * s + _A[2]) * s + _A[3]) * s + _A[4]) * s + _A[5]) * r
    den = ((((_B[0] * s + _B[1]) * s + _B[2]) * s + _B[3]) * s + _B[4]) * s + 1.0
    return num / den


def normal_quantile(q: float) -> float:
    """Inverse of the standard normal CDF.

    Acklam's approximation (relative error ~1e-9) followed by Newton
    refinement against :func:`normal_cdf`. Symmetric by construction:
    ``normal_quantile(q) == -normal_quantile(1 - q)``.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q!r}")
    if q == 0.5:
        return 0.0
    if q > 0.5:
        return -normal_quantile(1.0 - q)
    x = _acklam(q)
    for _ in range(2):
        pdf = math.exp(-0.5 * x * x) / _SQRT2PI
        if pdf == 0.0:
            break
        x -= (normal_cdf(x) - q) / pdf
    return x


def critical_value(alpha: float) -> float:
    """Two-sided critical value z such that P(|Z| <= z) = 1 - alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    return normal_quantile(1.0 - alpha / 2.0)


_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    if x == 1.0 or x == 2.0:
        return 0.0
    x -= 1.0
    acc = _LANCZOS[0]
    for k in range(1, 9):
        acc += _LANCZOS[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(acc)


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


_CF_EPS = 1e-15
_CF_TINY = 1e-300
_CF_MAX_ITER = 10_000


def _beta_cf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise NumericalError("incomplete beta continued fraction did not converge", a=a, b=b, x=x)


def _check_shapes(a: float, b: float) -> None:
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"beta shape parameters must be positive, got a={a!r}, b={b!r}")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), the CDF of Beta(a, b) evaluated at ``x``."""
    _check_shapes(a, b)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)
    if x < (a + 1.0) / (a + b + 2.0):
        value = math.exp(log_front) * _beta_cf(a, b, x) / a
    else:
        value = 1.0 - math.exp(log_front) * _beta_cf(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


def beta_quantile(q: float, a: float, b: float, max_iter: int = 200) -> float:
    """Inverse of :func:`regularized_incomplete_beta` in ``x``.

    Bisection, with the starting bracket narrowed around a normal
    approximation of Beta(a, b). Raises :class:`NumericalError` if
    ``max_iter`` halvings do not reach ``|I_x - q| <= 1e-12`` or a
    bracket narrower than machine resolution.
    """
    _check_shapes(a, b)
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {q!r}")

    mean = a / (a + b)
    sd = math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1.0)))
    guess = min(max(mean + normal_quantile(q) * sd, 1e-12), 1.0 - 1e-12)
    lo, hi = 0.0, 1.0
    f_guess = regularized_incomplete_beta(guess, a, b)
    step = sd
    if f_guess < q:
        lo = guess
        while step < 1.0:
            cand = guess + step
            if cand >= 1.0:
                break
            if regularized_incomplete_beta(cand, a, b) >= q:
                hi = cand
                break
            lo = cand
            step *= 2.0
    else:
        hi = guess
        while step < 1.0:
            cand = guess - step
            if cand <= 0.0:
                break
            if regularized_incomplete_beta(cand, a, b) < q:
                lo = cand
                break
            hi = cand
            step *= 2.0

    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = regularized_incomplete_beta(mid, a, b)
        if abs(f - q) <= 1e-12 or hi - lo <= 4.0 * math.ulp(mid):
            return mid
        if f < q:
            lo = mid
        else:
            hi = mid
    f = regularized_incomplete_beta(mid, a, b)
    if abs(f - q) <= 1e-8:
        return mid
    raise NumericalError(
        "beta quantile bisection did not converge",
        q=q, a=a, b=b, lo=lo, hi=hi, residual=f - q, iterations=max_iter,
    )


def binomial_pmf(k: int, n: int, p: float) -> float:
    """P(K = k) for K ~ Binomial(n, p)."""
    if n < 0 or k < 0:
        raise ValueError(f"counts must be non-negative, got k={k}, n={n}")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    if n <= 1000:
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)
    log_coef = log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0)
    return math.exp(log_coef + k * math.log(p) + (n - k) * math.log1p(-p))
