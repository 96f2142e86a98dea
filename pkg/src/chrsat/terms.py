"""Arena of term blocks with cyclic variable bindings.

A variable is not an object of its own.  Every cell holding an occurrence of
a variable links to the next occurrence, and the links close into a cycle
through all the terms mentioning that variable.  Walking the cycle from any
occurrence finds every constraint on the variable, which is what partner
search in rule matching needs.

Cells live in flat parallel lists indexed by a cell reference (an ``int``).
Blocks (terms) are contiguous runs of cells.  Each cell records its owning
block, so ``var_container`` and ``var_index`` are O(1) lookups.

Only overwrites are trailed: a link write done by unification, a functor
write done by deletion, and a per-block flag.  Creating a term is permanent;
its cells are spliced into cycles directly after a reference cell, and that
splice survives backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass

INT, TAG, LINK = 0, 1, 2

DELETED = "$deleted"
ANCHOR = "$var"

_CELL, _FUNCTOR, _FLAG = 0, 1, 2


class TermStoreError(Exception):
    pass


@dataclass(frozen=True)
class FreshVar:
    name: str = None


@dataclass(frozen=True)
class Occur:
    ref: int


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class PropTag:
    var: int


class TermStore:
    def __init__(self) -> None:
        # per cell
        self.kind = []
        self.val = []
        self.owner = []
        self.name = []
        # per block
        self.functor = []
        self.start = []
        self.arity = []
        self.flag = []
        self.trail = []
        self._marks = []

    # construction

    def new_term(self, functor: str, argspecs) -> int:
        if not argspecs:
            raise TermStoreError("a term needs at least one cell")
        bid = len(self.functor)
        base = len(self.kind)
        for spec in argspecs:
            if isinstance(spec, Occur) and self.kind[spec.ref] != LINK:
                raise TermStoreError(f"cell {spec.ref} is not a variable cell")
        self.functor.append(functor)
        self.start.append(base)
        self.arity.append(len(argspecs))
        self.flag.append(0)
        kind, val, owner, name = self.kind, self.val, self.owner, self.name
        for i, spec in enumerate(argspecs):
            cell = base + i
            owner.append(bid)
            if isinstance(spec, Occur):
                r = spec.ref
                kind.append(LINK)
                val.append(val[r])
                name.append(name[r])
                val[r] = cell
            elif isinstance(spec, FreshVar):
                kind.append(LINK)
                val.append(cell)
                name.append(spec.name)
            elif isinstance(spec, IntConst):
                kind.append(INT)
                val.append(spec.value)
                name.append(None)
            elif isinstance(spec, PropTag):
                kind.append(TAG)
                val.append(spec.var)
                name.append(None)
            else:
                raise TermStoreError(f"bad argument spec {spec!r}")
        return bid

    def new_var(self, name: str = None) -> int:
        """Anchor cell for a fresh variable; returns the cell reference."""
        bid = self.new_term(ANCHOR, [FreshVar(name)])
        return self.start[bid]

    # navigation

    def var_next(self, r: int) -> int:
        if self.kind[r] != LINK:
            raise TermStoreError(f"cell {r} is not a variable cell")
        return self.val[r]

    def var_container(self, r: int) -> int:
        return self.owner[r]

    def var_index(self, r: int) -> int:
        return r - self.start[self.owner[r]]

    def cell(self, bid: int, index: int) -> int:
        return self.start[bid] + index

    def cells(self, bid: int) -> range:
        s = self.start[bid]
        return range(s, s + self.arity[bid])

    def cycle(self, r: int) -> list:
        out = [r]
        val = self.val
        c = val[r]
        while c != r:
            out.append(c)
            c = val[c]
        return out

    def is_live(self, bid: int) -> bool:
        return not self.functor[bid].startswith("$")

    def occurrences(self, r: int, functor: str = None):
        """Yield ``(block, index, cell)`` once for each cell of ``r``'s cycle."""
        if self.kind[r] != LINK:
            raise TermStoreError(f"cell {r} is not a variable cell")
        val, owner, fun, start = self.val, self.owner, self.functor, self.start
        c = r
        while True:
            bid = owner[c]
            f = fun[bid]
            if (f == functor) if functor is not None else not f.startswith("$"):
                yield bid, c - start[bid], c
            c = val[c]
            if c == r:
                return

    # trailed updates

    def set_link(self, r: int, target: int) -> None:
        self.trail.append((_CELL, r, self.val[r]))
        self.val[r] = target

    def set_flag(self, bid: int, value: int) -> None:
        self.trail.append((_FLAG, bid, self.flag[bid]))
        self.flag[bid] = value

    def delete_constraint(self, bid: int) -> None:
        if self.functor[bid] == DELETED:
            return
        self.trail.append((_FUNCTOR, bid, self.functor[bid]))
        self.functor[bid] = DELETED

    def mark(self) -> int:
        return len(self.trail)

    def undo_to(self, m: int) -> None:
        trail = self.trail
        if m > len(trail):
            raise TermStoreError(f"stale trail mark {m} (trail length {len(trail)})")
        val, fun, flag = self.val, self.functor, self.flag
        while len(trail) > m:
            kind, ref, old = trail.pop()
            if kind == _CELL:
                val[ref] = old
            elif kind == _FUNCTOR:
                fun[ref] = old
            else:
                flag[ref] = old

    # debugging

    def format_cell(self, c: int) -> str:
        k, v = self.kind[c], self.val[c]
        if k == INT:
            return str(v)
        if k == TAG:
            return f"b{v}"
        return f"->{self.owner[v]}.{self.var_index(v)}"

    def dump(self) -> str:
        lines = []
        for bid, f in enumerate(self.functor):
            cells = ",".join(self.format_cell(c) for c in self.cells(bid))
            lines.append(f"{bid}: {f}/{self.arity[bid]}({cells})")
        return "\n".join(lines)
