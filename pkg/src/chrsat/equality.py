"""Reified variable-variable equality over cyclic bindings.

Unifying ``X = Y`` swaps the links of the equality term's two argument
cells, joining the two variable cycles into one.  The equality term then
marks the join (a "twist"): leaving either of its cells crosses from one
original variable into the other.  Walking the merged cycle from ``X`` while
pushing each twist crossed, and popping it when crossed straight back, leaves
on the stack exactly the equalities that connect ``X`` to where the walk is.
"""

from __future__ import annotations

from .terms import FreshVar, Occur, PropTag, TermStore

EQ = "="
MERGED = 1
EMPTY = frozenset()


class EqualitySolver:
    def __init__(self, store: TermStore, values) -> None:
        """``values`` is indexable by prop var: 1 true, -1 false, 0 unset."""
        self.store = store
        self.values = values
        self.block_of = {}   # prop var -> eq block
        self.on_merge = None
        self.n_merged = 0

    def new_eq(self, b: int, x, y) -> int:
        """Equality term ``b <-> (X = Y)``; ``x``/``y`` are cells or ``None`` for fresh."""
        spec = lambda r: FreshVar() if r is None else Occur(r)
        bid = self.store.new_term(EQ, [PropTag(b), spec(x), spec(y)])
        self.block_of[b] = bid
        return bid

    def args(self, b: int):
        s = self.store.start[self.block_of[b]]
        return s + 1, s + 2

    def is_twist(self, bid: int) -> bool:
        return self.store.flag[bid] == MERGED

    def ask_eq(self, x: int, y: int, trace: list = None):
        """Justification (frozenset of prop vars) for ``X = Y``, or ``None``."""
        if x == y:
            return EMPTY
        st = self.store
        name = st.name
        if trace is None and name[x] is not None and name[x] == name[y]:
            return EMPTY
        val, owner, flag, start = st.val, st.owner, st.flag, st.start
        stack = []
        c = x
        while True:
            bid = owner[c]
            if flag[bid]:
                b = val[start[bid]]
                if stack and stack[-1] == b:
                    stack.pop()
                    if trace is not None:
                        trace.append(("pop", b))
                else:
                    stack.append(b)
                    if trace is not None:
                        trace.append(("push", b))
            c = val[c]
            if c == y:
                return frozenset(stack)
            if c == x:
                return None

    def assert_eq_true(self, b: int) -> list:
        st = self.store
        bid = self.block_of[b]
        if st.functor[bid] != EQ or st.flag[bid] == MERGED:
            return []
        x, y = self.args(b)
        just = self.ask_eq(x, y)
        if just is not None:
            # X = Y \ X = Y <=> true
            st.delete_constraint(bid)
            return [[-j for j in sorted(just)] + [b]] if just else []
        nx, ny = st.val[x], st.val[y]
        st.set_link(x, ny)
        st.set_link(y, nx)
        st.set_flag(bid, MERGED)
        self.n_merged += 1
        if self.on_merge is not None:
            self.on_merge(bid)
        return self._check_disequalities()

    def assert_eq_false(self, b: int) -> list:
        st = self.store
        if st.functor[self.block_of[b]] != EQ:
            return []
        just = self.ask_eq(*self.args(b))
        if just is None:
            return []
        return [[-j for j in sorted(just)] + [b]]

    def _check_disequalities(self) -> list:
        out = []
        values, functor = self.values, self.store.functor
        for b, bid in self.block_of.items():
            if values[b] < 0 and functor[bid] == EQ:
                just = self.ask_eq(*self.args(b))
                if just is not None:
                    out.append([-j for j in sorted(just)] + [b])
        return out

    def recount(self) -> None:
        flag = self.store.flag
        self.n_merged = sum(1 for bid in self.block_of.values() if flag[bid] == MERGED)
