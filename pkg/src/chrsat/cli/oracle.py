"""Ground enumeration over a finite integer domain.

Used as a differential oracle: it knows the intended integer meaning of
every atom in the arithmetic and order vocabularies, and decides a goal by
trying every valuation of its variables.  Partial valuations are evaluated
three-valued so that hopeless branches are cut early; the answer is the
same as plain enumeration.
"""

from __future__ import annotations

from ..frontend.ast import And, Atom, Leaf, Not, Or, Sum, Var, leaves
from ..frontend.normalize import flatten_atom

SAT = "SAT"
UNSAT = "UNSAT"
DEFAULT_CAP = 10 ** 8


class OracleError(ValueError):
    pass


def _arg(a, env):
    if isinstance(a, Var):
        return env.get(a.name)
    if isinstance(a, Sum):
        x = env.get(a.var.name)
        return None if x is None else x + a.offset
    return a


def _rel(pred: str, vals):
    if pred == "eq_const" or pred == "=":
        x, y = vals
        return x == y
    if pred == "eq_offset":
        x, y, c = vals
        return x == y + c
    if pred == "geq":
        return vals[0] >= vals[1]
    if pred == "leq":
        return vals[0] <= vals[1]
    if pred == "lt":
        return vals[0] < vals[1]
    if pred == "plus":
        x, y, z = vals
        return x == y + z
    raise OracleError(f"no integer reading for {pred}/{len(vals)}")


_ARITY = {"eq_const": 2, "=": 2, "eq_offset": 3, "geq": 2, "leq": 2, "lt": 2, "plus": 3}


def check_atom(atom: Atom) -> Atom:
    atom = flatten_atom(atom)
    if _ARITY.get(atom.predicate) != len(atom.args):
        raise OracleError(f"no integer reading for {atom}")
    return atom


def eval_atom(atom: Atom, env: dict):
    """Truth of a flat atom under ``env``; ``None`` while a variable is unbound."""
    vals = [_arg(a, env) for a in atom.args]
    if any(v is None for v in vals):
        return None
    return _rel(atom.predicate, vals)


def _compile(f):
    if isinstance(f, Leaf):
        atom = check_atom(f.atom)
        return lambda env: eval_atom(atom, env)
    if isinstance(f, Not):
        g = _compile(f.arg)

        def neg(env):
            v = g(env)
            return None if v is None else not v
        return neg
    left, right = _compile(f.left), _compile(f.right)
    if isinstance(f, And):
        def conj(env):
            a = left(env)
            if a is False:
                return False
            b = right(env)
            if b is False:
                return False
            return True if a and b else None
        return conj
    if isinstance(f, Or):
        def disj(env):
            a = left(env)
            if a is True:
                return True
            b = right(env)
            if b is True:
                return True
            return False if a is False and b is False else None
        return disj
    raise OracleError(f"cannot evaluate {f!r}")


def goal_variables(f) -> list:
    seen = {}
    for atom in leaves(f):
        for a in atom.args:
            if isinstance(a, Sum):
                a = a.var
            if isinstance(a, Var):
                seen.setdefault(a.name, None)
    return list(seen)


def evaluate(f, env: dict) -> bool:
    """Truth of a goal formula under a total valuation."""
    v = _compile(f)(env)
    if v is None:
        raise OracleError("valuation does not bind every goal variable")
    return v


def find_model(f, domain, cap: int = DEFAULT_CAP):
    """First satisfying valuation over ``domain`` (an iterable of ints), or ``None``."""
    values = list(domain)
    names = goal_variables(f)
    if len(values) ** len(names) > cap:
        raise OracleError(f"{len(values)}^{len(names)} valuations exceed the cap of {cap}")
    test = _compile(f)
    env = {}

    def search(i):
        v = test(env)
        if v is False:
            return False
        if i == len(names) or v is True:
            return True
        name = names[i]
        for x in values:
            env[name] = x
            if search(i + 1):
                return True
        del env[name]
        return False

    if not search(0):
        return None
    # variables left open by an early True may take any value
    return {n: env.get(n, values[0]) for n in names}


def brute_force_oracle(f, domain, cap: int = DEFAULT_CAP) -> str:
    return SAT if find_model(f, domain, cap) is not None else UNSAT


def parse_domain(text: str) -> range:
    """``"1..4"`` -> ``range(1, 5)``."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise OracleError(f"domain must look like LO..HI, got {text!r}") from None
    if lo > hi:
        raise OracleError(f"empty domain {text}")
    return range(lo, hi + 1)
