"""Acceptance criteria, one test each.

Every test prints a single ``criterion N ... PASS|FAIL`` line with its wall
time.  Run ``python3 tests/test_acceptance.py`` for just those lines, or
``pytest tests/test_acceptance.py`` for the same checks under pytest.
"""

import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import props  # noqa: E402
from chrsat import UNKNOWN, UNSAT, Solver, load_builtin, normalize, parse_goal, parse_rules  # noqa: E402
from chrsat.cli import bench  # noqa: E402
from chrsat.cli.oracle import brute_force_oracle  # noqa: E402

LT_GOAL = r"(lt(A,B) \/ lt(B,A)) /\ lt(B,C) /\ ~lt(A,C)"


def solve(rules, goal, **kw):
    s = Solver(rules, **kw)
    s.load(normalize(parse_goal(goal)))
    return s, s.solve()


def true_atoms(s, ans):
    return {s.var_atom[b] for b, v in ans.model.items() if v and b in s.var_atom}


def placement(s, ans, n):
    """Row of each queen from the true ``eq_const(Qi,k)`` atoms."""
    rows = {}
    for pred, args in true_atoms(s, ans):
        if pred == "eq_const":
            rows.setdefault(args[0], set()).add(args[1])
    return [rows.get(f"Q{i}", set()) for i in range(1, n + 1)]


def valid_queens(rows) -> bool:
    if any(len(r) != 1 for r in rows):
        return False
    q = [next(iter(r)) for r in rows]
    n = len(q)
    return (all(1 <= x <= n for x in q) and len(set(q)) == n
            and all(abs(q[i] - q[j]) != j - i for i in range(n) for j in range(i + 1, n)))


# criteria


def c1_trace_replay():
    lines = []
    s = Solver(load_builtin("lt"), heuristic="naive", trace=lines.append)
    goal = normalize(parse_goal(LT_GOAL))
    s.load(goal)
    ans = s.solve()
    model = {s.describe(b): v for b, v in ans.model.items() if b in s.var_atom}
    return (goal.clauses == [[1, 2], [3], [-4]]
            and lines[lines.index("fire transitivity@b1,b3 -> {~b1,~b3,b4}") + 1:][:2]
            == ["conflict {~b1,~b3,b4}", "learn {~b1}"]
            and ans.status == UNKNOWN
            and model == {"lt(A,B)": False, "lt(B,A)": True, "lt(B,C)": True, "lt(A,C)": False})


def c2_plus_bounds():
    s, ans = solve(load_builtin("bounds"), r"plus(A,B,C) /\ B >= 3 /\ B <= 10 /\ C >= 4 /\ C <= 6")
    t = true_atoms(s, ans)
    return ans.status == UNKNOWN and ("geq", ("A", 7)) in t and ("leq", ("A", 16)) in t


def c3_queens():
    rules = load_builtin("bounds")
    _, ans = solve(rules, bench.queens(2))
    ok = ans.status == UNSAT
    for n in (4, 8):
        text = bench.queens(n)
        s, ans = solve(rules, text)
        truth = brute_force_oracle(parse_goal(text), range(1, n + 1))
        ok = ok and truth == "SAT" and ans.status == UNKNOWN and valid_queens(placement(s, ans, n))
    s, ans = solve(rules, bench.queens(12))
    return ok and ans.status == UNKNOWN and valid_queens(placement(s, ans, 12))


def c4_cycle():
    _, ans = solve(load_builtin("lt"), bench.cycle(50, "lt"))
    ok = ans.status == UNSAT
    s, ans = solve(load_builtin("leq"), bench.cycle(50, "leq"))
    ok = ok and ans.status == UNKNOWN
    rng = random.Random(0)
    for _ in range(100):
        i, j = rng.randrange(51), rng.randrange(51)
        ok = ok and s.ask_eq_vars(f"A{i}", f"A{j}") is not None
    return ok


def c5_subsets():
    rules = load_builtin("bounds")
    _, ans = solve(rules, bench.subsets(15, 99))
    ok = ans.status == UNSAT
    s, ans = solve(rules, bench.subsets(3, 10))
    vals = {}
    for pred, args in true_atoms(s, ans):
        if pred == "eq_const":
            vals.setdefault(args[0], set()).add(args[1])
    items = [vals.get(f"S{i}", set()) for i in (1, 2, 3)]
    return (ok and ans.status == UNKNOWN and all(len(v) == 1 for v in items)
            and all(v <= {0, 10} for v in items) and sum(next(iter(v)) for v in items) == 10)


def c6_justifications():
    from test_equality import build_merged_cycles
    _, eq, c = build_merged_cycles()
    return (eq.ask_eq(c["r"], c["s"]) == {1} and eq.ask_eq(c["r"], c["t"]) == {1, 3}
            and eq.ask_eq(c["r"], c["u"]) == set() and eq.ask_eq(c["u"], c["r"]) == set())


def c7_incompleteness():
    _, ans = solve(parse_rules("p <=> q.\np ==> false."), "p")
    return ans.status == UNKNOWN


def c8_properties():
    props.check_store_sequences(10_000, seed=100)
    props.check_union_find(1_000, seed=101)
    props.check_generated_clauses(400, seed=102, max_vars=8)
    res = props.check_soundness(500, seed=103)
    props.check_pure_sat(1_000, seed=104)
    return res["goals"] == 500


CRITERIA = [
    (1, "lt trace replay", c1_trace_replay, 1.0),
    (2, "plus bounds propagation", c2_plus_bounds, 1.0),
    (3, "queens", c3_queens, 60.0),
    (4, "cycle", c4_cycle, 20.0),
    (5, "subsets", c5_subsets, 10.0),
    (6, "equality justifications", c6_justifications, None),
    (7, "incompleteness", c7_incompleteness, None),
    (8, "property suites", c8_properties, 300.0),
]


def check(num) -> tuple:
    _, name, fn, limit = CRITERIA[num - 1]
    t0 = time.perf_counter()
    try:
        ok, err = bool(fn()), ""
    except AssertionError as exc:
        ok, err = False, f" ({exc})"
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok, err = False, f" (over {limit:g} s)"
    line = f"criterion {num} {name}: {'PASS' if ok else 'FAIL'} in {dt:.2f} s{err}"
    return ok, line


def _run(num, capsys):
    ok, line = check(num)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_1(capsys):
    _run(1, capsys)


def test_criterion_2(capsys):
    _run(2, capsys)


def test_criterion_3(capsys):
    _run(3, capsys)


def test_criterion_4(capsys):
    _run(4, capsys)


def test_criterion_5(capsys):
    _run(5, capsys)


def test_criterion_6(capsys):
    _run(6, capsys)


def test_criterion_7(capsys):
    _run(7, capsys)


def test_criterion_8(capsys):
    _run(8, capsys)


if __name__ == "__main__":
    results = [check(n) for n, *_ in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
