"""Monte Carlo experiments on synthetic Bernoulli optimizers.

Every trial draws from its own stream ``rng.derive(trial)``, so results
do not depend on how trials are spread over worker processes.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .binomial_ci import CiMethod, TrialTally, confidence_interval
from .metrics import repeats_to_confidence
from .planner import PlanConfig, adaptive_repeats
from .rng import GENERATOR_NAME, RngSpec
from .special import beta_quantile

__all__ = [
    "DEFAULT_COMPARE_PAIRS",
    "DEFAULT_COMPARE_NS",
    "ComparisonRow",
    "RelErrStats",
    "ChunkReport",
    "bernoulli_batch",
    "bernoulli_oracle",
    "compare_optimizers",
    "compare_grid",
    "adaptive_relerr_experiment",
    "chunked_beta_check",
]

DEFAULT_COMPARE_PAIRS = ((0.25, 0.2), (0.5, 0.45), (0.75, 0.7), (0.99, 0.94))
DEFAULT_COMPARE_NS = (100, 1000, 10_000)


def bernoulli_batch(p: float, n: int, rng: RngSpec | np.random.Generator) -> int:
    """Number of successes among ``n`` independent Bernoulli(p) draws."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    return int(gen.binomial(n, p))


def bernoulli_oracle(p: float, rng: RngSpec | np.random.Generator) -> Callable[[int], int]:
    """A success oracle that keeps drawing from one stream."""
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    return lambda batch: bernoulli_batch(p, batch, gen)


def _map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


@dataclass(frozen=True)
class ComparisonRow:
    p1: float
    p2: float
    n: int
    trials: int
    frac_correct_order: float
    frac_no_overlap: float

    def as_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "n": self.n, "trials": self.trials,
                "frac_correct_order": self.frac_correct_order,
                "frac_no_overlap": self.frac_no_overlap}


@dataclass(frozen=True)
class _CompareTask:
    p1: float
    p2: float
    n: int
    c: float
    alpha: float
    method: CiMethod
    rng: RngSpec

    def __call__(self, trial: int) -> tuple[bool, bool]:
        gen = self.rng.derive(trial).generator()
        s1 = bernoulli_batch(self.p1, self.n, gen)
        s2 = bernoulli_batch(self.p2, self.n, gen)
        e1 = confidence_interval(TrialTally(self.n, s1), self.method, self.alpha)
        e2 = confidence_interval(TrialTally(self.n, s2), self.method, self.alpha)
        r1 = repeats_to_confidence(e1.ratio, self.c)
        r2 = repeats_to_confidence(e2.ratio, self.c)
        correct = r1 < r2
        # R_c is decreasing in p, so disjoint p intervals are exactly disjoint
        # (unclamped) R_c intervals; closed intervals, touching counts as overlap.
        disjoint = e1.lower > e2.upper or e2.lower > e1.upper
        return correct, disjoint


def compare_optimizers(p1: float, p2: float, n: int, trials: int = 1000, c: float = 0.99,
                       alpha: float = 0.05, rng: RngSpec | None = None,
                       method: CiMethod | str = CiMethod.MARGIN, workers: int = 1) -> ComparisonRow:
    """How often ``n`` repeats rank two optimizers correctly, and how often decisively.

    ``frac_correct_order``: fraction of trials with R_c estimate of the
    better optimizer strictly below the other's (ties count as wrong).
    ``frac_no_overlap``: fraction with disjoint confidence intervals.
    """
    if not p1 > p2:
        raise ValueError(f"need p1 > p2, got p1={p1}, p2={p2}")
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be >= 1")
    rng = rng if rng is not None else RngSpec(0)
    task = _CompareTask(p1, p2, n, c, alpha, CiMethod.parse(method), rng)
    results = _map(task, list(range(trials)), workers)
    correct = sum(r[0] for r in results)
    disjoint = sum(r[1] for r in results)
    return ComparisonRow(p1, p2, n, trials, correct / trials, disjoint / trials)


def compare_grid(pairs: Sequence[tuple[float, float]] = DEFAULT_COMPARE_PAIRS,
                 ns: Sequence[int] = DEFAULT_COMPARE_NS, trials: int = 1000, c: float = 0.99,
                 alpha: float = 0.05, rng: RngSpec | None = None,
                 method: CiMethod | str = CiMethod.MARGIN, workers: int = 1) -> list[ComparisonRow]:
    """One :class:`ComparisonRow` per (pair, n) cell; cell ``k`` uses ``rng.derive(k)``."""
    rng = rng if rng is not None else RngSpec(0)
    rows = []
    k = 0
    for p1, p2 in pairs:
        for n in ns:
            rows.append(compare_optimizers(p1, p2, n, trials, c, alpha, rng.derive(k),
                                           method, workers))
            k += 1
    return rows


@dataclass(frozen=True)
class RelErrStats:
    p_true: float
    trials: int
    rel_errors: tuple[float, ...]
    final_ns: tuple[int, ...]
    median: float
    q25: float
    q75: float
    generator: str = GENERATOR_NAME

    def fraction_within(self, threshold: float) -> float:
        return sum(e <= threshold for e in self.rel_errors) / self.trials

    def as_dict(self) -> dict:
        return {"p_true": self.p_true, "trials": self.trials, "median": self.median,
                "q25": self.q25, "q75": self.q75,
                "mean_final_n": float(np.mean(self.final_ns)), "generator": self.generator}


@dataclass(frozen=True)
class _RelErrTask:
    p_true: float
    cfg: PlanConfig
    c: float
    rng: RngSpec

    def __call__(self, trial: int) -> tuple[float, int]:
        oracle = bernoulli_oracle(self.p_true, self.rng.derive(trial))
        result = adaptive_repeats(oracle, self.cfg)
        truth = repeats_to_confidence(self.p_true, self.c)
        estimate = repeats_to_confidence(result.final_estimate.ratio, self.c)
        return abs(estimate - truth) / truth, result.final_n


def adaptive_relerr_experiment(p_true: float, cfg: PlanConfig, c: float = 0.99,
                               trials: int = 1000, rng: RngSpec | None = None,
                               workers: int = 1) -> RelErrStats:
    """Distribution of ``|R_hat - R| / R`` after running the adaptive controller.

    The estimate uses ``n_s / n`` at termination. Runs with the same
    ``rng`` are paired: trial ``t`` sees the same Bernoulli stream
    whatever the configuration.
    """
    if not 0.0 < p_true < 1.0:
        raise ValueError(f"p_true must lie in (0, 1), got {p_true!r}")
    rng = rng if rng is not None else RngSpec(0)
    results = _map(_RelErrTask(p_true, cfg, c, rng), list(range(trials)), workers)
    errs = np.array([r[0] for r in results])
    q25, med, q75 = (float(v) for v in np.quantile(errs, [0.25, 0.5, 0.75]))
    return RelErrStats(p_true=p_true, trials=trials, rel_errors=tuple(float(e) for e in errs),
                       final_ns=tuple(int(r[1]) for r in results),
                       median=med, q25=q25, q75=q75)


@dataclass
class ChunkReport:
    chunk_size: int
    n_chunks: int
    alpha: float
    pooled_p: float
    chunk_estimates: list[float]
    empirical_band: tuple[float, float]
    beta_band: tuple[float, float]
    warnings: list[str] = field(default_factory=list)

    @property
    def max_band_gap(self) -> float:
        return max(abs(self.empirical_band[0] - self.beta_band[0]),
                   abs(self.empirical_band[1] - self.beta_band[1]))

    def as_dict(self) -> dict:
        return {"chunk_size": self.chunk_size, "n_chunks": self.n_chunks, "alpha": self.alpha,
                "pooled_p": self.pooled_p, "empirical_band": list(self.empirical_band),
                "beta_band": list(self.beta_band), "max_band_gap": self.max_band_gap,
                "warnings": list(self.warnings)}


def chunked_beta_check(sample_successes: Sequence[int] | np.ndarray, chunk_size: int,
                       alpha: float = 0.10) -> ChunkReport:
    """Compare chunk-level spread of p_hat against the Beta model.

    The sample is cut into consecutive chunks of ``chunk_size``. The
    empirical ``alpha/2`` and ``1 - alpha/2`` quantiles of the chunk
    estimates are set against the Jeffreys Beta quantiles for a chunk of
    that size at the pooled success rate.
    """
    x = np.asarray(sample_successes)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("sample must be a non-empty 1-D sequence of 0/1 outcomes")
    if not np.isin(x, (0, 1)).all():
        raise ValueError("sample entries must be 0 or 1")
    if chunk_size < 1 or x.size % chunk_size:
        raise ValueError(f"sample length {x.size} is not divisible by chunk_size={chunk_size}")
    chunks = x.reshape(-1, chunk_size).mean(axis=1)
    notes = []
    if chunks.size < 20:
        notes.append(f"only {chunks.size} chunks; empirical quantiles are unstable")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    pooled = float(x.mean())
    lo_q, hi_q = alpha / 2.0, 1.0 - alpha / 2.0
    emp = tuple(float(v) for v in np.quantile(chunks, [lo_q, hi_q]))
    a = pooled * chunk_size + 0.5
    b = chunk_size - pooled * chunk_size + 0.5
    beta_band = (beta_quantile(lo_q, a, b), beta_quantile(hi_q, a, b))
    return ChunkReport(chunk_size=chunk_size, n_chunks=int(chunks.size), alpha=alpha,
                       pooled_p=pooled, chunk_estimates=[float(v) for v in chunks],
                       empirical_band=emp, beta_band=beta_band, warnings=notes)
