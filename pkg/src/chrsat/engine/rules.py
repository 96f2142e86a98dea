"""Compiling parsed rules into matchable occurrences."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend.ast import BinOp, Comparison, SourceRule, Var, expr_vars

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1


class RuleError(ValueError):
    pass


class EvalError(ArithmeticError):
    pass


@dataclass
class Head:
    polarity: bool
    predicate: str
    args: tuple      # var name (str) or int per argument
    removed: bool


@dataclass
class BodyItem:
    kind: str        # "chr" | "eq" | "true" | "false"
    polarity: bool = True
    predicate: str = ""
    args: tuple = ()


@dataclass
class CompiledRule:
    id: str
    kind: str
    heads: list
    guard: list
    body: list
    auto: bool = False

    @property
    def removed(self) -> list:
        return [i for i, h in enumerate(self.heads) if h.removed]


@dataclass
class Occurrence:
    rule: CompiledRule
    pos: int
    order: list                                     # head indices, active head first
    guards: list = field(default_factory=list)      # comparisons to test after each step
    tests: list = field(default_factory=list)       # the same, compiled


def eval_expr(e, ints: dict) -> int:
    if type(e) is int:
        return e
    if isinstance(e, Var):
        try:
            return ints[e.name]
        except KeyError:
            raise EvalError(f"variable {e.name} is not bound to an integer") from None
    a, b = eval_expr(e.left, ints), eval_expr(e.right, ints)
    if e.op == "+":
        r = a + b
    elif e.op == "-":
        r = a - b
    else:
        r = a * b
    if not INT64_MIN <= r <= INT64_MAX:
        raise EvalError(f"64-bit overflow evaluating {e}")
    return r


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


def eval_guard(g: Comparison, ints: dict) -> bool:
    try:
        return _CMP[g.op](eval_expr(g.left, ints), eval_expr(g.right, ints))
    except EvalError:
        # a guard over a variable bound to a variable never holds
        return False


def _check(r: int) -> int:
    if not INT64_MIN <= r <= INT64_MAX:
        raise EvalError(f"64-bit overflow ({r})")
    return r


def compile_expr(e):
    """Closure evaluating ``e`` over a dict of integer bindings (like ``eval_expr``)."""
    if type(e) is int:
        return lambda ints: e
    if isinstance(e, Var):
        name = e.name

        def get(ints):
            try:
                return ints[name]
            except KeyError:
                raise EvalError(f"variable {name} is not bound to an integer") from None
        return get
    left, right = compile_expr(e.left), compile_expr(e.right)
    if e.op == "+":
        return lambda ints: _check(left(ints) + right(ints))
    if e.op == "-":
        return lambda ints: _check(left(ints) - right(ints))
    return lambda ints: _check(left(ints) * right(ints))


def compile_guard(g: Comparison):
    op = _CMP[g.op]
    left, right = compile_expr(g.left), compile_expr(g.right)

    def test(ints):
        try:
            return op(left(ints), right(ints))
        except EvalError:
            return False
    return test


def _head_args(atom) -> tuple:
    return tuple(a.name if isinstance(a, Var) else a for a in atom.args)


def compile_rule(rule: SourceRule, auto: bool = False) -> CompiledRule:
    heads = [Head(h.polarity, h.atom.predicate, _head_args(h.atom), False)
             for h in rule.kept_head]
    heads += [Head(h.polarity, h.atom.predicate, _head_args(h.atom), True)
              for h in rule.removed_head]
    body = []
    for item in rule.body:
        p = item.atom.predicate
        if p in ("true", "false"):
            truth = (p == "true") == item.polarity
            if not truth:
                body.append(BodyItem("false"))
            elif len(rule.body) == 1:
                body.append(BodyItem("true"))
        elif p == "=":
            body.append(BodyItem("eq", item.polarity, "=", item.atom.args))
        else:
            body.append(BodyItem("chr", item.polarity, p, item.atom.args))
    return CompiledRule(rule.id, rule.kind, heads, list(rule.guard), body, auto)


def _join_order(heads: list, pos: int) -> list:
    order = [pos]
    bound = {a for a in heads[pos].args if isinstance(a, str)}
    rest = [i for i in range(len(heads)) if i != pos]
    while rest:
        pick = next((i for i in rest if bound & set(a for a in heads[i].args if isinstance(a, str))),
                    rest[0])
        rest.remove(pick)
        order.append(pick)
        bound |= {a for a in heads[pick].args if isinstance(a, str)}
    return order


def occurrences(rule: CompiledRule) -> list:
    out = []
    for pos in range(len(rule.heads)):
        order = _join_order(rule.heads, pos)
        guards = [[] for _ in order]
        bound = set()
        pending = list(rule.guard)
        for step, hi in enumerate(order):
            bound |= {a for a in rule.heads[hi].args if isinstance(a, str)}
            for g in list(pending):
                if expr_vars(g.left) | expr_vars(g.right) <= bound:
                    guards[step].append(g)
                    pending.remove(g)
        tests = [[compile_guard(g) for g in step] for step in guards]
        out.append(Occurrence(rule, pos, order, guards, tests))
    return out


def set_semantics_rules(predicate: str, arity: int) -> list:
    """``c(x) \\ c(x) <=> true`` and ``c(x), not c(x) ==> false`` for one predicate."""
    args = tuple(f"X{i}" for i in range(1, arity + 1))
    dup = CompiledRule(f"set_dup_{predicate}", "simpagation",
                       [Head(True, predicate, args, False), Head(True, predicate, args, True)],
                       [], [BodyItem("true")], auto=True)
    neg = CompiledRule(f"set_neg_{predicate}", "propagation",
                       [Head(True, predicate, args, False), Head(False, predicate, args, False)],
                       [], [BodyItem("false")], auto=True)
    return [dup, neg]


def predicate_arities(rules) -> dict:
    arities = {}

    def note(pred, n, rule_id):
        if pred in ("=", "true", "false"):
            return
        if arities.setdefault(pred, n) != n:
            raise RuleError(f"rule {rule_id}: {pred} used with arity {n} and {arities[pred]}")

    for r in rules:
        for h in r.heads:
            note(h.atom.predicate, len(h.atom.args), r.id)
        for b in r.body:
            note(b.atom.predicate, len(b.atom.args), r.id)
    return arities
