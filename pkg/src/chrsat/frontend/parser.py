"""Recursive-descent parsers for rule files and goal formulae.

Rule grammar (one rule per ``.``-terminated clause)::

    rule  ::= [name "@"] heads ["\\" heads] ("<=>" | "==>") [guard "|"] body "."
    head  ::= ["not"] atom
    body  ::= "true" | "false" | ["not"] (atom | Var "=" Var)
    guard ::= expr cmp expr {"," expr cmp expr}

Goal grammar::

    disj  ::= conj {"\\/" conj}
    conj  ::= unary {"/\\" unary}
    unary ::= "~" unary | "(" disj ")" | atom | term rel term

``//`` starts a comment running to end of line.  Variables start with an
uppercase letter or underscore, predicates with a lowercase letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    And, Atom, BinOp, Comparison, FALSE, Leaf, Not, Or, SignedAtom,
    SourceRule, Sum, TRUE, Var, expr_vars,
)

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

QUANTIFIERS = {"forall", "exists"}
GUARD_OPS = {"<", "<=", "=", "==", "!=", ">=", ">"}


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{msg}")


class ValidationError(ValueError):
    """A syntactically valid rule that breaks a language restriction."""


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<op><=>|==>|/\\|\\/|<=|>=|!=|==|[@,\\|.()=<>+\-*~])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = pos + m.group().rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def integer(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            raise self.error("expected integer")
        value = int(self.tok.text)
        self.i += 1
        value = -value if neg else value
        if not INT64_MIN <= value <= INT64_MAX:
            raise self.error("integer out of 64-bit range", self.toks[self.i - 1])
        return value

    # arithmetic: expr ::= term {(+|-) term}; term ::= factor {* factor}

    def expr(self):
        left = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.accept("*"):
            left = BinOp("*", left, self.factor())
        return left

    def factor(self):
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "int" or (tok.text == "-" and self.peek().kind == "int"):
            return self.integer()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            raise self.error(f"nested term {tok.text!r} not supported; flatten it into a constraint")
        raise self.error(f"unexpected {tok.text or 'end of input'!r} in expression")

    def atom(self, plain_args: bool) -> Atom:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error(f"expected predicate, found {tok.text or 'end of input'!r}")
        if tok.text in QUANTIFIERS:
            raise self.error(f"quantifier {tok.text!r} not supported")
        self.i += 1
        args = []
        if self.accept("("):
            if not self.at(")"):
                args.append(self.expr())
                while self.accept(","):
                    args.append(self.expr())
            self.expect(")")
        if plain_args:
            for a in args:
                if not isinstance(a, (Var, int)):
                    raise ParseError(
                        f"argument {a} of {tok.text} must be a variable or integer",
                        tok.line, tok.col)
        return Atom(tok.text, tuple(args))


# Rules


class _RuleParser(_Parser):
    def rules(self) -> tuple:
        out = []
        while self.tok.kind != "eof":
            out.append(self.rule(len(out) + 1))
        return tuple(out)

    def rule(self, index: int) -> SourceRule:
        start = self.tok
        name = f"r{index}"
        if self.tok.kind == "ident" and self.peek().text == "@":
            name = self.tok.text
            self.i += 2
        first = self.heads()
        second = None
        if self.accept("\\"):
            second = self.heads()
        if self.accept("==>"):
            if second is not None:
                raise self.error("simpagation rules use '<=>'")
            kind, kept, removed = "propagation", first, ()
        elif self.accept("<=>"):
            if second is None:
                kind, kept, removed = "simplification", (), first
            else:
                kind, kept, removed = "simpagation", first, second
        else:
            raise self.error("expected '==>' or '<=>'")
        guard = ()
        if self._guard_ahead():
            guard = self.guard()
            self.expect("|")
        body = self.body()
        self.expect(".")
        rule = SourceRule(name, kind, kept, removed, guard, body)
        validate_rule(rule, start)
        return rule

    def _guard_ahead(self) -> bool:
        depth = 0
        for tok in self.toks[self.i:]:
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                depth -= 1
            elif depth == 0 and tok.text in (".", "|") and tok.kind == "op":
                return tok.text == "|"
            elif tok.kind == "eof":
                return False
        return False

    def heads(self) -> tuple:
        out = [self.head()]
        while self.accept(","):
            out.append(self.head())
        return tuple(out)

    def head(self) -> SignedAtom:
        polarity = not self.accept("not")
        if self.tok.text in ("true", "false"):
            raise self.error("'true'/'false' cannot appear in a rule head")
        if self.tok.kind == "var":
            raise self.error("built-in equality cannot appear in a rule head")
        return SignedAtom(polarity, self.atom(plain_args=True))

    def guard(self) -> tuple:
        out = [self.comparison()]
        while self.accept(","):
            out.append(self.comparison())
        return tuple(out)

    def comparison(self) -> Comparison:
        left = self.expr()
        op = self.tok.text
        if op not in GUARD_OPS:
            raise self.error(f"expected comparison operator, found {op!r}")
        self.i += 1
        if op == "==":
            op = "="
        return Comparison(op, left, self.expr())

    def body(self) -> tuple:
        out = [self.body_item()]
        while self.accept(","):
            out.append(self.body_item())
        return tuple(out)

    def body_item(self) -> SignedAtom:
        polarity = not self.accept("not")
        if self.accept("true"):
            return SignedAtom(polarity, TRUE) if polarity else SignedAtom(True, FALSE)
        if self.accept("false"):
            return SignedAtom(polarity, FALSE) if polarity else SignedAtom(True, TRUE)
        if self.tok.kind == "var":
            left = Var(self.tok.text)
            self.i += 1
            self.expect("=")
            if self.tok.kind != "var":
                raise self.error("built-in equality relates two variables")
            right = Var(self.tok.text)
            self.i += 1
            return SignedAtom(polarity, Atom("=", (left, right)))
        return SignedAtom(polarity, self.atom(plain_args=False))


def _rule_error(rule: SourceRule, msg: str, tok: Token = None):
    where = f" (line {tok.line})" if tok else ""
    return ValidationError(f"rule {rule.id}{where}: {msg}")


def validate_rule(rule: SourceRule, tok: Token = None) -> None:
    """Range restriction and head connectivity."""
    head_vars = set()
    for h in rule.heads:
        head_vars |= h.atom.variables()
    used = set()
    for b in rule.body:
        used |= b.atom.variables()
    for g in rule.guard:
        used |= expr_vars(g.left) | expr_vars(g.right)
    unbound = sorted(used - head_vars)
    if unbound:
        raise _rule_error(rule, f"not range-restricted: {', '.join(unbound)} not in head", tok)
    heads = rule.heads
    if len(heads) > 1:
        for i, h in enumerate(heads):
            rest = set()
            for j, other in enumerate(heads):
                if j != i:
                    rest |= other.atom.variables()
            if not h.atom.variables() & rest:
                raise _rule_error(rule, f"head {h} shares no variable with the rest of the head", tok)


def parse_rules(text: str) -> tuple:
    return _RuleParser(text).rules()


# Goals


class _GoalParser(_Parser):
    def goal(self):
        f = self.disj()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return f

    def disj(self):
        f = self.conj()
        while self.accept("\\/"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("/\\"):
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.accept("~") or self.accept("not"):
            return Not(self.unary())
        if self.accept("("):
            f = self.disj()
            self.expect(")")
            return f
        if self.tok.kind == "ident":
            return Leaf(self.atom(plain_args=True))
        return Leaf(self.relation())

    def operand(self):
        if self.tok.kind == "var":
            v = Var(self.tok.text)
            self.i += 1
            if self.tok.text in ("+", "-") and self.peek().kind == "int":
                sign = 1 if self.tok.text == "+" else -1
                self.i += 1
                return Sum(v, sign * self.integer())
            return v
        if self.tok.kind == "int" or self.tok.text == "-":
            return self.integer()
        raise self.error(f"unexpected {self.tok.text or 'end of input'!r}")

    def relation(self) -> Atom:
        tok = self.tok
        left = self.operand()
        op = self.tok.text
        if op not in ("=", ">=", "<="):
            raise self.error(f"expected '=', '>=' or '<=', found {op!r}")
        self.i += 1
        right = self.operand()
        if isinstance(left, int) and isinstance(right, (Var, Sum)):
            left, right = right, left
            op = {">=": "<=", "<=": ">="}.get(op, op)
        if not isinstance(left, Var):
            raise ParseError("left side of a relation must be a variable", tok.line, tok.col)
        if op != "=" and not isinstance(right, int):
            raise ParseError(f"'{op}' compares a variable with an integer", tok.line, tok.col)
        return Atom(op, (left, right))


def parse_goal(text: str):
    return _GoalParser(text).goal()
