from .rules import CompiledRule, EvalError, RuleError, compile_rule, eval_expr
from .solver import (
    RESOURCE_LIMIT, UNKNOWN, UNSAT, Answer, MatchResult, Solver, SolverError, Stats,
    dpll_chr, format_clause,
)
