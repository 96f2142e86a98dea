"""CDCL propositional core.

Literals are non-zero ints (DIMACS style).  Clauses are lists of literals
and live for the whole run; generated and learned clauses are never removed.
Propagation uses two watched literals per clause; conflicts are analysed to
the first unique implication point.
"""

from __future__ import annotations

import heapq
import random

UNSAT_CLAUSE = -1


def _widx(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


class SatCore:
    def __init__(self, heuristic: str = "vsids", seed: int = 0,
                 backjump: bool = True, phase: bool = True, minimize: bool = True) -> None:
        if heuristic not in ("vsids", "naive"):
            raise ValueError(f"unknown heuristic {heuristic!r}")
        self.heuristic = heuristic
        self.backjump = backjump
        self.default_phase = phase
        self.minimize = minimize
        self._rng = random.Random(seed) if seed else None
        self.nvars = 0
        self.val = [0]
        self.level = [0]
        self.reason = [None]
        self.phase = [phase]
        self.activity = [0.0]
        self.tier = [0]
        self.var_inc = 1.0
        self.heaps = ([], [])   # tier 0 is exhausted before tier 1 is consulted
        self.clauses = []
        self.watches = [[], []]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.on_backtrack = None
        self.on_assign = None   # trace hook: (lit, reason)

    # variables and values

    def add_var(self, tier: int = 0) -> int:
        self.nvars += 1
        v = self.nvars
        self.val.append(0)
        self.level.append(0)
        self.reason.append(None)
        self.phase.append(self.default_phase)
        act = self._rng.random() * 1e-5 if self._rng else 0.0
        self.activity.append(act)
        self.tier.append(tier)
        self.watches.append([])
        self.watches.append([])
        heapq.heappush(self.heaps[tier], (-act, v))
        return v

    def value(self, lit: int) -> int:
        v = self.val[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def is_set(self, var: int) -> bool:
        return self.val[var] != 0

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def set_literal(self, lit: int, reason=None) -> bool:
        """Assign ``lit`` true.  Returns ``False`` if it is already false."""
        v = lit if lit > 0 else -lit
        cur = self.val[v]
        if cur:
            return cur == (1 if lit > 0 else -1)
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        if self.on_assign is not None:
            self.on_assign(lit, reason)
        return True

    def new_level(self) -> None:
        self.trail_lim.append(len(self.trail))

    def decide(self, lit: int) -> None:
        self.new_level()
        self.set_literal(lit)

    # clauses

    def _watch(self, ci: int) -> None:
        c = self.clauses[ci]
        self.watches[_widx(c[0])].append(ci)
        self.watches[_widx(c[1])].append(ci)

    def add_clause(self, lits) -> int:
        """Add a clause during search.

        Returns the index of a falsified clause when adding it produces a
        conflict (after backtracking to the highest level among its
        literals), ``UNSAT_CLAUSE`` for the empty clause, else ``None``.
        A clause that is unit under the current assignment propagates its
        literal at the highest level of its false literals.
        """
        lits = list(dict.fromkeys(lits))
        if not lits:
            return UNSAT_CLAUSE
        for l in lits:
            if -l in lits:
                return None
        val, level = self.val, self.level

        def rank(l):
            v = val[abs(l)]
            if l < 0:
                v = -v
            if v > 0:
                return (0, level[abs(l)])
            if v == 0:
                return (1, 0)
            return (2, -level[abs(l)])

        lits.sort(key=rank)
        ci = len(self.clauses)
        self.clauses.append(lits)
        first = self.value(lits[0])
        if len(lits) == 1:
            if first > 0 and level[abs(lits[0])] == 0:
                return None
            self.backtrack(0)
            if not self.set_literal(lits[0], ci):
                return ci
            return None
        self._watch(ci)
        second = self.value(lits[1])
        if first > 0 or second == 0:
            return None
        m = level[abs(lits[1])]
        if first < 0:
            # all false; lits[0] carries the highest level
            m = level[abs(lits[0])]
            if m < self.decision_level:
                self.backtrack(m)
            return ci
        if m < self.decision_level:
            self.backtrack(m)
        self.set_literal(lits[0], ci)
        return None

    # propagation

    def propagate(self):
        """Unit propagation to fixpoint; returns a conflicting clause index or ``None``."""
        val, clauses, watches, trail = self.val, self.clauses, self.watches, self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = watches[_widx(false_lit)]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = val[first] if first > 0 else -val[-first]
                if fv > 0:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    l = c[k]
                    lv = val[l] if l > 0 else -val[-l]
                    if lv >= 0:
                        c[1], c[k] = l, false_lit
                        watches[_widx(l)].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if fv < 0:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return ci
                    self.set_literal(first, ci)
            del ws[j:]
        return None

    # conflicts

    def analyze(self, confl: int):
        """First-UIP learning; returns ``(learned clause, backjump level)``."""
        level, reason, trail = self.level, self.reason, self.trail
        cur = self.decision_level
        seen = set()
        learnt = [0]
        counter = 0
        p = 0
        idx = len(trail) - 1
        clause = self.clauses[confl]
        while True:
            for q in clause:
                v = abs(q)
                if v == p or v in seen or level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if level[v] >= cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(trail[idx]) not in seen:
                idx -= 1
            lit = trail[idx]
            idx -= 1
            p = abs(lit)
            counter -= 1
            if counter <= 0:
                break
            clause = self.clauses[reason[p]]
        learnt[0] = -lit
        self.var_inc /= 0.95
        if self.minimize:
            learnt = self._minimize(learnt, seen)
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _minimize(self, learnt, seen):
        """Drop literals implied by the rest of the clause (recursive minimization)."""
        level, reason, clauses = self.level, self.reason, self.clauses
        levels = {level[abs(q)] for q in learnt[1:]}
        keep = set(abs(q) for q in learnt)
        cache = {}

        def redundant(v):
            stack = [v]
            visited = []
            while stack:
                u = stack.pop()
                r = reason[u]
                if r is None:
                    for w in visited:
                        cache[w] = False
                    return False
                for q in clauses[r]:
                    w = abs(q)
                    if w == u or level[w] == 0 or w in keep:
                        continue
                    known = cache.get(w)
                    if known is True:
                        continue
                    if known is False or reason[w] is None or level[w] not in levels:
                        for x in visited:
                            cache[x] = False
                        return False
                    if w not in visited:
                        visited.append(w)
                        stack.append(w)
            for w in visited:
                cache[w] = True
            return True

        out = [learnt[0]]
        for q in learnt[1:]:
            if reason[abs(q)] is None or not redundant(abs(q)):
                out.append(q)
        return out

    def learn(self, learnt) -> None:
        """Add a learned clause after backjumping; it asserts ``learnt[0]``."""
        if len(learnt) == 1:
            self.backtrack(0)
            self.clauses.append(list(learnt))
            self.set_literal(learnt[0], len(self.clauses) - 1)
            return
        ci = len(self.clauses)
        self.clauses.append(list(learnt))
        self._watch(ci)
        self.set_literal(learnt[0], ci)

    def backjump_level(self, bj: int) -> int:
        return bj if self.backjump else max(bj, self.decision_level - 1)

    def backtrack(self, lvl: int) -> None:
        if self.decision_level <= lvl:
            return
        val, heaps, tier, act, phase = self.val, self.heaps, self.tier, self.activity, self.phase
        lim = self.trail_lim[lvl]
        for lit in reversed(self.trail[lim:]):
            v = abs(lit)
            phase[v] = lit > 0
            val[v] = 0
            self.reason[v] = None
            heapq.heappush(heaps[tier[v]], (-act[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        if self.on_backtrack is not None:
            self.on_backtrack(lvl)

    # decisions

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, len(act)):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heaps = ([], [])
            for i in range(1, len(act)):
                if not self.val[i]:
                    self.heaps[self.tier[i]].append((-act[i], i))
            for h in self.heaps:
                heapq.heapify(h)
        elif not self.val[v]:
            heapq.heappush(self.heaps[self.tier[v]], (-act[v], v))

    def select_literal(self):
        """An unset literal, or ``None`` when every variable is set."""
        val = self.val
        if self.heuristic == "naive":
            for v in range(1, self.nvars + 1):
                if not val[v]:
                    return v
            return None
        for heap in self.heaps:
            while heap:
                _, v = heapq.heappop(heap)
                if not val[v]:
                    return v if self.phase[v] else -v
        for v in range(1, self.nvars + 1):
            if not val[v]:
                return v if self.phase[v] else -v
        return None

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"
