from .cnf import (
    CnfFormula,
    DimacsParseError,
    DimacsWarning,
    count_unsat,
    generate_random_ksat,
    parse_dimacs,
    read_dimacs,
    to_dimacs,
)
from .solver import BACKEND, WalksatConfig, available_backends, pack, run_experiment, walksat_skc_run

__all__ = [
    "BACKEND",
    "CnfFormula",
    "DimacsParseError",
    "DimacsWarning",
    "WalksatConfig",
    "available_backends",
    "count_unsat",
    "generate_random_ksat",
    "pack",
    "parse_dimacs",
    "read_dimacs",
    "run_experiment",
    "to_dimacs",
    "walksat_skc_run",
]
