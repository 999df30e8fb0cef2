"""DIMACS CNF parsing, writing and random k-SAT generation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..rng import RngSpec

__all__ = [
    "DimacsParseError",
    "DimacsWarning",
    "CnfFormula",
    "parse_dimacs",
    "read_dimacs",
    "to_dimacs",
    "generate_random_ksat",
    "count_unsat",
]


class DimacsParseError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DimacsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """A CNF formula over variables ``1..num_vars``.

    Clauses are tuples of non-zero signed literals without repeats.
    Tautological clauses (containing ``x`` and ``-x``) are kept and their
    indices listed in ``tautologies``.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    tautologies: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for idx, clause in enumerate(self.clauses):
            if not clause:
                raise ValueError(f"clause {idx} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} in clause {idx} outside 1..{self.num_vars}")

    @classmethod
    def from_clauses(cls, num_vars: int, clauses: Sequence[Sequence[int]]) -> "CnfFormula":
        cleaned = []
        tautologies = []
        for idx, clause in enumerate(clauses):
            lits = tuple(dict.fromkeys(int(l) for l in clause))
            if any(-l in lits for l in lits):
                tautologies.append(idx)
            cleaned.append(lits)
        return cls(num_vars, tuple(cleaned), tuple(tautologies))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def parse_dimacs(text: str | bytes) -> CnfFormula:
    """Parse DIMACS CNF text.

    Clauses may span lines. A clause-count mismatch with the header only
    warns; the parsed clauses win. A trailing clause without its
    terminating ``0`` is accepted. A ``%`` line ends the body (SATLIB
    convention).
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    num_vars = declared = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsParseError("duplicate problem line", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsParseError(f"malformed problem line {line!r}", lineno)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(f"non-integer counts in problem line {line!r}", lineno) from None
            if num_vars < 0 or declared < 0:
                raise DimacsParseError("negative counts in problem line", lineno)
            continue
        if num_vars is None:
            raise DimacsParseError("clause data before the 'p cnf' header", lineno)
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsParseError(f"bad literal {token!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise DimacsParseError("empty clause", lineno)
                clauses.append(current)
                current = []
            elif abs(lit) > num_vars:
                raise DimacsParseError(f"literal {lit} outside 1..{num_vars}", lineno)
            else:
                current.append(lit)
    if num_vars is None:
        raise DimacsParseError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    if declared != len(clauses):
        warnings.warn(f"header declares {declared} clauses but {len(clauses)} were parsed",
                      DimacsWarning, stacklevel=2)
    return CnfFormula.from_clauses(num_vars, clauses)


def read_dimacs(path) -> CnfFormula:
    with open(path, "rb") as fh:
        return parse_dimacs(fh.read())


def to_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_vars} {formula.num_clauses}")
    lines.extend(" ".join(map(str, clause)) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def generate_random_ksat(k: int, num_vars: int, num_clauses: int, rng: RngSpec) -> CnfFormula:
    """Uniform random k-SAT: k distinct variables per clause, fair polarities."""
    if k < 1:
        raise ValueError(f"clause width must be >= 1, got {k}")
    if k > num_vars:
        raise ValueError(f"clause width k={k} exceeds num_vars={num_vars}")
    if num_clauses < 0:
        raise ValueError("num_clauses must be non-negative")
    gen = rng.generator()
    clauses = []
    for _ in range(num_clauses):
        variables = gen.choice(num_vars, size=k, replace=False) + 1
        signs = np.where(gen.integers(0, 2, size=k) == 1, 1, -1)
        clauses.append(tuple(int(v * s) for v, s in zip(variables, signs)))
    return CnfFormula(num_vars, tuple(clauses))


def count_unsat(formula: CnfFormula, assignment: Sequence[bool]) -> int:
    """Clauses with no true literal; ``assignment[v - 1]`` is variable ``v``."""
    if len(assignment) != formula.num_vars:
        raise ValueError(f"assignment has {len(assignment)} values for {formula.num_vars} variables")
    unsat = 0
    for clause in formula.clauses:
        if not any(bool(assignment[abs(l) - 1]) == (l > 0) for l in clause):
            unsat += 1
    return unsat
