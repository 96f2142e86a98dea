"""DPLL(CHR): a CDCL search core driving a CHR store by lazy clause generation.

The SAT core owns every propositional decision.  The CHR side never assigns
a literal itself: each rule firing becomes clauses over the head, body and
equality-justification literals, which the core then propagates or learns
from.  A firing whose clauses are already satisfied is therefore never
repeated anywhere in the search, so no propagation history is kept.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field

from ..equality import EMPTY, EQ, EqualitySolver
from ..frontend.ast import Var
from ..frontend.normalize import NormalizedGoal
from ..sat import UNSAT_CLAUSE, SatCore
from ..terms import INT, LINK, IntConst, Occur, PropTag, TermStore
from .rules import (
    CompiledRule, EvalError, RuleError, compile_rule, eval_expr,
    occurrences, predicate_arities, set_semantics_rules,
)

UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"
RESOURCE_LIMIT = "RESOURCE-LIMIT"


class SolverError(RuntimeError):
    pass


class LimitReached(Exception):
    pass


@dataclass
class Stats:
    answer: str = ""
    clauses: int = 0
    fails: int = 0
    decisions: int = 0
    time_ms: int = 0

    def line(self) -> str:
        return (f"answer={self.answer} clauses={self.clauses} fails={self.fails} "
                f"decisions={self.decisions} time_ms={self.time_ms}")


@dataclass
class Answer:
    status: str
    model: dict = field(default_factory=dict)   # prop var -> bool
    stats: Stats = field(default_factory=Stats)

    def __str__(self) -> str:
        return self.status


@dataclass
class MatchResult:
    rule: CompiledRule
    heads: tuple        # term blocks, aligned with rule.heads
    cells: dict         # head variable -> cell
    ints: dict          # head variable -> integer
    just: frozenset     # equality justification
    plan: list          # instantiated body: ("false",) | ("lit", key, polarity, args)


def format_clause(lits) -> str:
    return "{" + ",".join(f"b{l}" if l > 0 else f"~b{-l}" for l in lits) + "}"


class Solver:
    """One search over one goal with one rule set; single-threaded."""

    def __init__(self, rules=(), heuristic: str = "vsids", seed: int = 0,
                 backjump: bool = True, max_decisions: int = None,
                 max_clauses: int = None, trace=None, phase: bool = True,
                 set_semantics: bool = True, goal_first: bool = False) -> None:
        self.sat = SatCore(heuristic, seed, backjump, phase)
        self.store = TermStore()
        self.eq = EqualitySolver(self.store, self.sat.val)
        self.sat.on_backtrack = self._on_backtrack
        self.eq.on_merge = self._on_merge
        # atoms introduced by rule firings are branched on after the goal's atoms
        self._derived_tier = 1 if goal_first else 0
        self.max_decisions = max_decisions
        self.max_clauses = max_clauses
        self.trace = trace
        if trace is not None:
            self.sat.on_assign = self._trace_assign

        self.source_rules = tuple(rules)
        self.arities = predicate_arities(self.source_rules)
        self.rules = [compile_rule(r) for r in self.source_rules]
        self._set_semantics = set_semantics
        self._auto_done = set()
        self.occ = {}
        for rule in self.rules:
            self._add_occurrences(rule)

        self.anchor = {}          # variable name -> anchor cell
        self.atom_var = {}        # interned atom key -> prop var
        self.var_atom = {}        # prop var -> atom key
        self.entry_block = {}     # prop var -> CHR term block
        self.by_pred = {}
        self.by_value = {}
        self.var_keys = {}        # block -> its (predicate, arg index, variable name) keys
        self.assigned = {}        # such a key -> blocks whose prop var is set
        self.assigned_log = []    # lists appended to, for undoing on backtrack
        self._classes = None      # variable name -> names merged with it
        self._just_cache = {}
        self.goal = None

        self.level_marks = []
        self.tq = 0
        self.queue = deque()
        self.queued = set()
        self.active = []          # (block, match generator); top is newest
        self.pending = deque()
        self.generated = []       # (rule id, clause)
        self.firings = []         # (rule id, head prop vars) when record_firings
        self.record_firings = False
        self.stats = Stats()

    # setup

    def _add_occurrences(self, rule: CompiledRule, front: bool = False) -> None:
        for occ in occurrences(rule):
            h = rule.heads[occ.pos]
            lst = self.occ.setdefault((h.predicate, h.polarity), [])
            if front:
                lst.insert(sum(1 for o in lst if o.rule.auto), occ)
            else:
                lst.append(occ)

    def _ensure_set_semantics(self, pred: str, arity: int) -> None:
        if not self._set_semantics or arity == 0 or pred in self._auto_done:
            return
        self._auto_done.add(pred)
        for rule in set_semantics_rules(pred, arity):
            self._add_occurrences(rule, front=True)

    def variable(self, name: str) -> int:
        cell = self.anchor.get(name)
        if cell is None:
            cell = self.anchor[name] = self.store.new_var(name)
        return cell

    def load(self, goal: NormalizedGoal) -> None:
        self.goal = goal
        while self.sat.nvars < goal.num_vars:
            self.sat.add_var()
        for b, atom in goal.theory_map.items():
            args = []
            for a in atom.args:
                if isinstance(a, Var):
                    args.append((True, self.variable(a.name)))
                elif isinstance(a, int):
                    args.append((False, a))
                else:
                    raise SolverError(f"atom {atom} is not flat")
            self.introduce(atom.predicate, args, b)
        for b, x, y in goal.builtin_eqs:
            self.introduce_eq(self.variable(x), self.variable(y), b)
        for clause in goal.clauses:
            self.pending.append(clause)

    # store

    def _key(self, pred: str, args) -> tuple:
        name = self.store.name
        return (pred, tuple(name[v] if is_var else v for is_var, v in args))

    def introduce(self, pred: str, args, b: int = None) -> int:
        """Intern ``b <-> pred(args)``; ``args`` are ``(is_var, cell_or_int)`` pairs."""
        if pred == EQ:
            raise SolverError("equality is handled by introduce_eq")
        key = self._key(pred, args)
        var = self.atom_var.get(key)
        if var is not None:
            if b is not None and b != var:
                raise SolverError(f"atom {key} already owns prop var {var}")
            return var
        n = self.arities.setdefault(pred, len(args))
        if n != len(args):
            raise RuleError(f"{pred} used with arity {len(args)} and {n}")
        if b is None:
            b = self.sat.add_var(self._derived_tier)
        specs = [PropTag(b)]
        for is_var, v in args:
            specs.append(Occur(self.anchor[self.store.name[v]]) if is_var else IntConst(v))
        bid = self.store.new_term(pred, specs)
        self.atom_var[key] = b
        self.var_atom[b] = key
        self.entry_block[b] = bid
        self.by_pred.setdefault(pred, []).append(bid)
        name = self.store.name
        keys = []
        for k, (is_var, v) in enumerate(args):
            if is_var:
                keys.append((pred, k + 1, name[v]))
            else:
                self.by_value.setdefault((pred, k, v), []).append(bid)
        self.var_keys[bid] = keys
        if any(is_var for is_var, _ in args):
            self._ensure_set_semantics(pred, len(args))
        return b

    def introduce_eq(self, x: int, y: int, b: int = None) -> int:
        name = self.store.name
        key = (EQ, tuple(sorted((name[x], name[y]))))
        var = self.atom_var.get(key)
        if var is not None:
            return var
        if b is None:
            b = self.sat.add_var(self._derived_tier)
        self.eq.new_eq(b, self.anchor[name[x]], self.anchor[name[y]])
        self.atom_var[key] = b
        self.var_atom[b] = key
        return b

    def is_alive(self, bid: int) -> bool:
        return self.store.functor[bid][0] != "$"

    # search

    def _decide(self, lit: int) -> None:
        self.level_marks.append((self.store.mark(), len(self.assigned_log)))
        self.sat.decide(lit)
        self._emit(f"decide {format_clause([lit])[1:-1]}")

    def _on_backtrack(self, lvl: int) -> None:
        mark, logged = self.level_marks[lvl]
        self.store.undo_to(mark)
        log = self.assigned_log
        while len(log) > logged:
            log.pop().pop()
        del self.level_marks[lvl:]
        self.tq = len(self.sat.trail)
        self.queue.clear()
        self.queued.clear()
        self.active.clear()
        self._classes = None
        self.eq.recount()
        self._emit(f"backjump {lvl}")

    def _on_merge(self, bid: int) -> None:
        st = self.store
        sval = self.sat.val
        # suspended scans may hold walks through the cycles just changed
        for held, _ in self.active:
            self._wake(held)
        self.active.clear()
        self._classes = None
        # The swap left x -> (old cycle of y) -> y -> (old cycle of x) -> x.
        # A match made possible by the merge needs a head on each side, so
        # waking the smaller side finds all of them.
        x = st.start[bid] + 1
        y = x + 1
        val, owner, functor, start = st.val, st.owner, st.functor, st.start
        side_y = []
        c = val[x]
        while True:
            side_y.append(c)
            if c == y:
                break
            c = val[c]
        side_x = []
        c = val[y]
        while True:
            side_x.append(c)
            if c == x:
                break
            c = val[c]
        for c in min(side_x, side_y, key=len):
            o = owner[c]
            f = functor[o]
            if f.startswith("$") or f == EQ:
                continue
            if sval[val[start[o]]]:
                self._wake(o)
        self._emit(f"unify b{st.val[st.start[bid]]}")

    def _wake(self, bid: int) -> None:
        if bid not in self.queued:
            self.queued.add(bid)
            self.queue.append(bid)

    def _theory(self) -> None:
        """Hand newly assigned literals to the store and the equality solver."""
        trail = self.sat.trail
        eq_blocks = self.eq.block_of
        while self.tq < len(trail):
            lit = trail[self.tq]
            self.tq += 1
            v = lit if lit > 0 else -lit
            bid = self.entry_block.get(v)
            if bid is not None:
                for key in self.var_keys[bid]:
                    lst = self.assigned.get(key)
                    if lst is None:
                        lst = self.assigned[key] = []
                    lst.append(bid)
                    self.assigned_log.append(lst)
                if self.is_alive(bid):
                    self._wake(bid)
            elif v in eq_blocks:
                if lit > 0:
                    clauses = self.eq.assert_eq_true(v)
                else:
                    clauses = self.eq.assert_eq_false(v)
                for c in clauses:
                    self.pending.append(c)
                    self._emit(f"eq-clause {format_clause(c)}")

    def _flush(self):
        while self.pending:
            clause = self.pending.popleft()
            res = self.sat.add_clause(clause)
            if res is not None:
                return res
        return None

    def propagate(self):
        """Alternate unit propagation and rule firing until fixpoint or conflict."""
        sat = self.sat
        while True:
            confl = self._flush()
            if confl is not None:
                return confl
            confl = sat.propagate()
            if confl is not None:
                return confl
            self._theory()
            if self.pending:
                continue
            if not self._chr_step():
                if self.pending or sat.qhead < len(sat.trail) or self.tq < len(sat.trail):
                    continue
                return None

    def _chr_step(self) -> bool:
        m = self.chr_match()
        if m is None:
            return False
        self.apply_match(m)
        return True

    def solve(self) -> Answer:
        t0 = time.perf_counter()
        try:
            answer = self._search()
        except LimitReached:
            answer = Answer(RESOURCE_LIMIT)
        self.stats.answer = answer.status
        self.stats.time_ms = int((time.perf_counter() - t0) * 1000)
        answer.stats = self.stats
        return answer

    def _search(self) -> Answer:
        sat = self.sat
        while True:
            confl = self.propagate()
            if confl is not None:
                self.stats.fails += 1
                if confl == UNSAT_CLAUSE or sat.decision_level == 0:
                    self._emit("conflict at level 0")
                    return Answer(UNSAT)
                self._emit(f"conflict {format_clause(sat.clauses[confl])}")
                learnt, bj = sat.analyze(confl)
                self._emit(f"learn {format_clause(learnt)}")
                sat.backtrack(sat.backjump_level(bj))
                sat.learn(learnt)
                continue
            lit = sat.select_literal()
            if lit is None:
                model = {v: sat.val[v] > 0 for v in range(1, sat.nvars + 1)}
                return Answer(UNKNOWN, model)
            if self.max_decisions is not None and self.stats.decisions >= self.max_decisions:
                return Answer(RESOURCE_LIMIT)
            self.stats.decisions += 1
            self._decide(lit)

    # matching

    def chr_match(self):
        """Next rule application that generates a clause or deletes a constraint."""
        active = self.active
        while True:
            while self.queue:
                bid = self.queue.popleft()
                self.queued.discard(bid)
                if self.is_alive(bid):
                    active.append((bid, self._matches(bid)))
            if not active:
                return None
            bid, gen = active[-1]
            m = next(gen, None) if self.is_alive(bid) else None
            if m is None:
                active.pop()
                continue
            match = self._productive(m)
            if match is not None:
                return match

    def _matches(self, bid: int):
        st = self.store
        b = st.val[st.start[bid]]
        value = self.sat.val[b]
        if not value:
            return
        for occ in self.occ.get((st.functor[bid], value > 0), ()):
            if occ.rule.auto and not self.eq.n_merged:
                continue
            if not self.is_alive(bid):
                return
            head = occ.rule.heads[occ.pos]
            res = self._bind(head.args, bid, {}, {}, EMPTY, -1)
            if res is None:
                continue
            cells, ints, just = res
            if not all(t(ints) for t in occ.tests[0]):
                continue
            for cells2, ints2, just2, used in self._join(occ, 1, cells, ints, just, (bid,)):
                heads = [0] * len(used)
                for step, hi in enumerate(occ.order):
                    heads[hi] = used[step]
                yield occ.rule, tuple(heads), cells2, ints2, just2

    def _bind(self, pattern, bid, cells, ints, just, skip):
        st = self.store
        kind, val = st.kind, st.val
        s = st.start[bid] + 1
        nc, ni, j = cells, ints, just
        for k, p in enumerate(pattern):
            if k == skip:
                continue
            c = s + k
            if type(p) is int:
                if kind[c] != INT or val[c] != p:
                    return None
            elif p in nc:
                if kind[c] != LINK:
                    return None
                a, b = st.name[nc[p]], st.name[c]
                jj = EMPTY if a == b else self._name_just(a, b)
                if jj is None:
                    return None
                if jj:
                    j = j | jj
            elif p in ni:
                if kind[c] != INT or val[c] != ni[p]:
                    return None
            elif kind[c] == LINK:
                if nc is cells:
                    nc = dict(cells)
                nc[p] = c
            else:
                if ni is ints:
                    ni = dict(ints)
                ni[p] = val[c]
        return nc, ni, j

    def _join(self, occ, step, cells, ints, just, used):
        if step == len(occ.order):
            yield cells, ints, just, used
            return
        head = occ.rule.heads[occ.order[step]]
        guards = occ.tests[step]
        pattern = head.args
        pred = head.predicate
        want = 1 if head.polarity else -1
        st = self.store
        sval = self.sat.val
        val, start, functor = st.val, st.start, st.functor

        walk = -1
        for k, p in enumerate(pattern):
            if type(p) is str and p in cells:
                walk = k
                break

        if walk >= 0:
            x = cells[pattern[walk]]
            idx = walk + 1
            nx = st.name[x]
            for n in self._class_of(nx):
                blocks = self.assigned.get((pred, idx, n))
                if not blocks:
                    continue
                j = just
                if n != nx:
                    extra = self._name_just(nx, n)
                    if extra:
                        j = just | extra
                for i in range(len(blocks)):
                    bid = blocks[i]
                    if functor[bid] != pred or sval[val[start[bid]]] != want or bid in used:
                        continue
                    res = self._bind(pattern, bid, cells, ints, j, walk)
                    if res is None:
                        continue
                    if guards and not all(t(res[1]) for t in guards):
                        continue
                    yield from self._join(occ, step + 1, res[0], res[1], res[2], used + (bid,))
            return

        candidates = None
        for k, p in enumerate(pattern):
            if type(p) is int:
                candidates = self.by_value.get((pred, k, p), ())
                break
            if p in ints:
                candidates = self.by_value.get((pred, k, ints[p]), ())
                break
        if candidates is None:
            candidates = self.by_pred.get(pred, ())
        for i in range(len(candidates)):
            bid = candidates[i]
            if functor[bid] != pred or sval[val[start[bid]]] != want or bid in used:
                continue
            res = self._bind(pattern, bid, cells, ints, just, -1)
            if res is None:
                continue
            if guards and not all(t(res[1]) for t in guards):
                continue
            yield from self._join(occ, step + 1, res[0], res[1], res[2], used + (bid,))

    def _class_of(self, name: str):
        """Original variable names currently unified with ``name``."""
        if not self.eq.n_merged:
            return (name,)
        classes = self._classes
        if classes is None:
            classes = self._classes = self._merge_classes()
            self._just_cache = {}
        return classes.get(name, (name,))

    def _name_just(self, a: str, b: str):
        # the twists joining two original variables do not depend on which
        # of their cells the walk starts from
        key = (a, b)
        j = self._just_cache.get(key)
        if j is None:
            j = self._just_cache[key] = self.eq.ask_eq(self.anchor[a], self.anchor[b])
        return j

    def _merge_classes(self) -> dict:
        st, eq = self.store, self.eq
        parent = {}

        def find(a):
            while parent.setdefault(a, a) != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for bid in eq.block_of.values():
            if eq.is_twist(bid) and st.functor[bid] == EQ:
                s = st.start[bid]
                parent[find(st.name[s + 1])] = find(st.name[s + 2])
        groups = {}
        for a in parent:
            groups.setdefault(find(a), []).append(a)
        return {a: tuple(g) for g in groups.values() for a in g}

    def _instantiate(self, item, cells, ints):
        args = []
        for e in item.args:
            if isinstance(e, Var) and e.name in cells:
                args.append((True, cells[e.name]))
            else:
                try:
                    args.append((False, eval_expr(e, ints)))
                except EvalError as exc:
                    raise SolverError(f"body {item.predicate}: {exc}") from None
        return args

    def _plan(self, rule, cells, ints) -> list:
        plan = []
        for item in rule.body:
            if item.kind == "true":
                continue
            if item.kind == "false":
                plan.append(("false",))
                continue
            args = self._instantiate(item, cells, ints)
            if item.kind == "eq":
                (xv, x), (yv, y) = args
                if not xv and not yv:
                    if (x == y) != item.polarity:
                        plan.append(("false",))
                    continue
                if xv != yv:
                    raise SolverError(f"rule {rule.id}: built-in equality between a variable and an integer")
                name = self.store.name
                key = (EQ, tuple(sorted((name[x], name[y]))))
            else:
                key = self._key(item.predicate, args)
            plan.append(("lit", key, item.polarity, args))
        return plan

    def _productive(self, raw) -> MatchResult:
        rule, heads, cells, ints, just = raw
        for bid in heads:
            if not self.is_alive(bid):
                return None
        plan = self._plan(rule, cells, ints)
        m = MatchResult(rule, heads, cells, ints, just, plan)
        if rule.removed:
            return m
        value = self.sat.value
        for step in plan:
            if step[0] == "false":
                return m
            var = self.atom_var.get(step[1])
            if var is None:
                return m
            if value(var if step[2] else -var) <= 0:
                return m
        return None

    def apply_match(self, m: MatchResult) -> list:
        st = self.store
        head_vars = [st.val[st.start[bid]] for bid in m.heads]
        neg = [-b if h.polarity else b for b, h in zip(head_vars, m.rule.heads)]
        neg += [-j for j in sorted(m.just)]
        value = self.sat.value
        clauses = []
        for step in m.plan:
            if step[0] == "false":
                clauses.append(list(neg))
                continue
            _, key, polarity, args = step
            var = self.atom_var.get(key)
            if var is None:
                if key[0] == EQ:
                    var = self.introduce_eq(args[0][1], args[1][1])
                else:
                    var = self.introduce(key[0], args)
            lit = var if polarity else -var
            if value(lit) <= 0:
                clauses.append(neg + [lit])
        for i in m.rule.removed:
            st.delete_constraint(m.heads[i])
        if self.record_firings:
            self.firings.append((m.rule.id, tuple(head_vars), tuple(neg)))
        for c in clauses:
            self.pending.append(c)
            self.generated.append((m.rule.id, c))
        self.stats.clauses += len(clauses)
        if self.max_clauses is not None and self.stats.clauses > self.max_clauses:
            raise LimitReached()
        if self.trace is not None:
            for c in clauses or [None]:
                shown = format_clause(c) if c is not None else "delete"
                self._emit(f"fire {m.rule.id}@{','.join(f'b{v}' for v in head_vars)} -> {shown}")
        return clauses

    # reporting

    def describe(self, var: int) -> str:
        key = self.var_atom.get(var)
        if key is None:
            return f"aux{var}"
        pred, args = key
        if pred == EQ:
            return f"{args[0]} = {args[1]}"
        if not args:
            return pred
        return f"{pred}({','.join(map(str, args))})"

    def ask_eq_vars(self, x: str, y: str):
        return self.eq.ask_eq(self.variable(x), self.variable(y))

    def _emit(self, line: str) -> None:
        if self.trace is not None:
            self.trace(line)

    def _trace_assign(self, lit: int, reason) -> None:
        if reason is not None:
            self.trace(f"unit {format_clause([lit])[1:-1]}")


def dpll_chr(goal: NormalizedGoal, rules, **options) -> Answer:
    solver = Solver(rules, **options)
    solver.load(goal)
    return solver.solve()
