"""WalkSAT-SKC runs and repeated experiments.

Each step picks a random unsatisfied clause. A variable whose flip breaks
no satisfied clause is taken if one exists; otherwise, with probability
``w``, a random variable of the clause, else one of minimum break count.
One flip is one iteration.

The kernel is compiled (``_core``) when available; set
``REPEATSTAT_PURE_PYTHON=1`` to force the Python fallback.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..metrics import RunRecord
from ..rng import RngSpec
from . import _pycore
from .cnf import CnfFormula

try:
    if os.environ.get("REPEATSTAT_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _core as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

__all__ = [
    "BACKEND",
    "available_backends",
    "WalksatConfig",
    "PackedFormula",
    "pack",
    "walksat_skc_run",
    "run_experiment",
]


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _compiled is not None else ("python",)


@dataclass(frozen=True)
class WalksatConfig:
    w: float = 0.5
    max_flips: int = 5000
    seed: RngSpec = RngSpec(0)

    def __post_init__(self) -> None:
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"walk probability must lie in [0, 1], got {self.w!r}")
        if self.max_flips < 1:
            raise ValueError(f"max_flips must be >= 1, got {self.max_flips}")


@dataclass(frozen=True)
class PackedFormula:
    """CSR arrays for the kernels. Tautologies are left out (always true)."""

    num_vars: int
    lits: np.ndarray
    cstart: np.ndarray
    occ: np.ndarray
    ostart: np.ndarray


@lru_cache(maxsize=8)
def pack(formula: CnfFormula) -> PackedFormula:
    skip = set(formula.tautologies)
    kept = [cl for i, cl in enumerate(formula.clauses) if i not in skip]
    nv = formula.num_vars
    cstart = np.zeros(len(kept) + 1, dtype=np.int32)
    flat: list[int] = []
    buckets: list[list[int]] = [[] for _ in range(2 * nv)]
    for ci, clause in enumerate(kept):
        for lit in clause:
            flat.append(lit)
            buckets[2 * (abs(lit) - 1) + (1 if lit < 0 else 0)].append(ci)
        cstart[ci + 1] = len(flat)
    ostart = np.zeros(2 * nv + 1, dtype=np.int32)
    ostart[1:] = np.cumsum([len(b) for b in buckets], dtype=np.int64)
    occ = np.fromiter((c for b in buckets for c in b), dtype=np.int32, count=int(ostart[-1]))
    return PackedFormula(nv, np.asarray(flat, dtype=np.int32), cstart, occ, ostart)


def _kernel(backend: str | None):
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled WalkSAT kernel is not available")
        return _compiled.run
    if backend == "python":
        return _pycore.run
    raise ValueError(f"unknown backend {backend!r}")


def walksat_skc_run(formula: CnfFormula, cfg: WalksatConfig, repeat_id: int = 0,
                    backend: str | None = None) -> RunRecord:
    """One repeat from a uniformly random start; seeded by ``cfg.seed``.

    A start that already satisfies every clause counts as success at
    iteration 1, the smallest budget.
    """
    packed = pack(formula)
    flips, assign = _kernel(backend)(packed.lits, packed.cstart, packed.occ, packed.ostart,
                                     packed.num_vars, float(cfg.w), int(cfg.max_flips),
                                     cfg.seed.seed64())
    if flips < 0:
        return RunRecord(repeat_id, None)
    witness = tuple(bool(a) for a in assign)
    return RunRecord(repeat_id, max(1, int(flips)), witness)


@dataclass(frozen=True)
class _RepeatTask:
    formula: CnfFormula
    cfg: WalksatConfig
    backend: str | None

    def __call__(self, repeat_id: int) -> RunRecord:
        cfg = WalksatConfig(self.cfg.w, self.cfg.max_flips, self.cfg.seed.derive(repeat_id))
        return walksat_skc_run(self.formula, cfg, repeat_id, self.backend)


def run_experiment(formula: CnfFormula, cfg: WalksatConfig, repeats: int, workers: int = 1,
                   backend: str | None = None) -> list[RunRecord]:
    """``repeats`` independent runs; repeat ``r`` is seeded by ``cfg.seed.derive(r)``."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    task = _RepeatTask(formula, cfg, backend)
    ids = list(range(repeats))
    if workers <= 1:
        return [task(r) for r in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, ids, chunksize=max(1, repeats // (4 * workers))))
