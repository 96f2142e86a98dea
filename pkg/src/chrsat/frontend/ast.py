"""Syntax trees for rules and goals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sum:
    """``var + offset``; the only compound argument a goal atom may carry."""

    var: Var
    offset: int

    def __str__(self) -> str:
        if self.offset < 0:
            return f"{self.var} - {-self.offset}"
        return f"{self.var} + {self.offset}"


@dataclass(frozen=True)
class BinOp:
    """Arithmetic in rule bodies and guards."""

    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"({self.left}{self.op}{self.right})"


Expr = Union[Var, int, BinOp]
ArgExpr = Union[Var, int, Sum, BinOp]


def _fmt_arg(a) -> str:
    if isinstance(a, BinOp):
        # drop outermost parens, they are implied by the argument comma
        return f"{a.left}{a.op}{a.right}"
    return str(a)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[ArgExpr, ...] = ()

    def __str__(self) -> str:
        if self.predicate == "=" and len(self.args) == 2:
            return f"{self.args[0]} = {self.args[1]}"
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(_fmt_arg(a) for a in self.args)})"

    def variables(self) -> set:
        out = set()
        for a in self.args:
            out |= expr_vars(a)
        return out


TRUE = Atom("true")
FALSE = Atom("false")


def expr_vars(e) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Sum):
        return {e.var.name}
    if isinstance(e, BinOp):
        return expr_vars(e.left) | expr_vars(e.right)
    return set()


@dataclass(frozen=True)
class SignedAtom:
    polarity: bool
    atom: Atom

    def __str__(self) -> str:
        return str(self.atom) if self.polarity else f"not {self.atom}"


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Expr
    right: Expr

    def __str__(self) -> str:
        return f"{_fmt_arg(self.left)} {self.op} {_fmt_arg(self.right)}"


@dataclass(frozen=True)
class SourceRule:
    id: str
    kind: str  # "simplification" | "propagation" | "simpagation"
    kept_head: Tuple[SignedAtom, ...]
    removed_head: Tuple[SignedAtom, ...]
    guard: Tuple[Comparison, ...]
    body: Tuple[SignedAtom, ...]

    @property
    def heads(self) -> Tuple[SignedAtom, ...]:
        return self.kept_head + self.removed_head

    def __str__(self) -> str:
        if self.kind == "propagation":
            head = ", ".join(map(str, self.kept_head))
            arrow = "==>"
        elif self.kind == "simplification":
            head = ", ".join(map(str, self.removed_head))
            arrow = "<=>"
        else:
            head = (", ".join(map(str, self.kept_head)) + " \\ "
                    + ", ".join(map(str, self.removed_head)))
            arrow = "<=>"
        guard = ""
        if self.guard:
            guard = ", ".join(map(str, self.guard)) + " | "
        body = ", ".join(map(str, self.body))
        return f"{self.id} @ {head} {arrow} {guard}{body}."


RuleSet = Tuple[SourceRule, ...]


def format_rules(rules) -> str:
    return "\n".join(str(r) for r in rules) + "\n"


# Goal formulae


@dataclass(frozen=True)
class Leaf:
    atom: Atom

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self) -> str:
        return f"~({self.arg})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} /\\ {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return f"({self.left} \\/ {self.right})"


Formula = Union[Leaf, Not, And, Or]


def leaves(f: Formula):
    """Atoms of ``f`` in left-to-right order, with repeats."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Leaf):
            yield g.atom
        elif isinstance(g, Not):
            stack.append(g.arg)
        else:
            stack.append(g.right)
            stack.append(g.left)


def conjoin(parts):
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjoin(parts):
    parts = list(parts)
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out
