from .ast import (
    And, Atom, BinOp, Comparison, Leaf, Not, Or, SignedAtom, SourceRule, Sum, Var,
    conjoin, disjoin, format_rules,
)
from .normalize import NormalizedGoal, flatten_atom, normalize
from .parser import ParseError, ValidationError, parse_goal, parse_rules

__all__ = [
    "And", "Atom", "BinOp", "Comparison", "Leaf", "Not", "Or", "SignedAtom",
    "SourceRule", "Sum", "Var", "conjoin", "disjoin", "format_rules",
    "NormalizedGoal", "flatten_atom", "normalize",
    "ParseError", "ValidationError", "parse_goal", "parse_rules",
]
