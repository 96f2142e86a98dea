"""Goal normalization into clauses plus reified atoms.

Atoms get propositional variables 1..k in order of first appearance, so the
numbering of a goal is predictable.  Auxiliary (Tseitin) variables follow.
A top-level conjunction becomes one clause per conjunct when the conjunct is
a disjunction of literals; any other subformula gets an auxiliary variable
defined by a full equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import And, Atom, Leaf, Not, Or, Sum, Var, leaves


@dataclass
class NormalizedGoal:
    clauses: list = field(default_factory=list)
    # prop var -> flat CHR atom
    theory_map: dict = field(default_factory=dict)
    # (prop var, X, Y) for variable-variable equalities
    builtin_eqs: list = field(default_factory=list)
    num_vars: int = 0

    @property
    def atoms(self) -> dict:
        """Every reified atom of the goal, keyed by prop var."""
        out = dict(self.theory_map)
        for b, x, y in self.builtin_eqs:
            out[b] = Atom("=", (Var(x), Var(y)))
        return dict(sorted(out.items()))


def flatten_atom(atom: Atom) -> Atom:
    """Map infix arithmetic relations onto the flat solver vocabulary."""
    p, args = atom.predicate, atom.args
    if p == "=":
        x, y = args
        if isinstance(y, Var):
            return atom
        if isinstance(y, Sum):
            return Atom("eq_offset", (x, y.var, y.offset))
        return Atom("eq_const", (x, y))
    if p == ">=":
        return Atom("geq", args)
    if p == "<=":
        return Atom("leq", args)
    return atom


def atom_key(atom: Atom) -> tuple:
    args = tuple(a.name if isinstance(a, Var) else a for a in atom.args)
    if atom.predicate == "=":
        args = tuple(sorted(args))
    return (atom.predicate, args)


def _nnf(f, positive=True):
    if isinstance(f, Leaf):
        return f if positive else Not(f)
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    left, right = _nnf(f.left, positive), _nnf(f.right, positive)
    if isinstance(f, And) == positive:
        return And(left, right)
    return Or(left, right)


def _flat(f, cls):
    if isinstance(f, cls):
        return _flat(f.left, cls) + _flat(f.right, cls)
    return [f]


def normalize(f) -> NormalizedGoal:
    goal = NormalizedGoal()
    var_of = {}

    for atom in leaves(f):
        flat = flatten_atom(atom)
        key = atom_key(flat)
        if key in var_of:
            continue
        goal.num_vars += 1
        b = goal.num_vars
        var_of[key] = b
        if flat.predicate == "=":
            goal.builtin_eqs.append((b, flat.args[0].name, flat.args[1].name))
        else:
            goal.theory_map[b] = flat

    def lit(g):
        if isinstance(g, Leaf):
            return var_of[atom_key(flatten_atom(g.atom))]
        if isinstance(g, Not) and isinstance(g.arg, Leaf):
            return -lit(g.arg)
        return None

    def define(g) -> int:
        """Literal equivalent to subformula ``g``, adding definitions."""
        l = lit(g)
        if l is not None:
            return l
        is_and = isinstance(g, And)
        kids = [define(k) for k in _flat(g, And if is_and else Or)]
        goal.num_vars += 1
        aux = goal.num_vars
        if is_and:
            goal.clauses.append([aux] + [-k for k in kids])
            goal.clauses.extend([-aux, k] for k in kids)
        else:
            goal.clauses.append([-aux] + kids)
            goal.clauses.extend([aux, -k] for k in kids)
        return aux

    for conjunct in _flat(_nnf(f), And):
        clause = [define(d) for d in _flat(conjunct, Or)]
        deduped = list(dict.fromkeys(clause))
        if any(-l in deduped for l in deduped):
            continue
        goal.clauses.append(deduped)
    return goal
