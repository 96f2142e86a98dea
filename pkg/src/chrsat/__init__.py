"""Satisfiability modulo Constraint Handling Rules."""

from .engine import RESOURCE_LIMIT, UNKNOWN, UNSAT, Answer, Solver, dpll_chr
from .frontend import normalize, parse_goal, parse_rules
from .solvers import load_builtin

__version__ = "0.1.0"

__all__ = [
    "RESOURCE_LIMIT", "UNKNOWN", "UNSAT", "Answer", "Solver", "dpll_chr",
    "normalize", "parse_goal", "parse_rules", "load_builtin",
]
