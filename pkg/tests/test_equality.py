import props
from chrsat.equality import MERGED, EqualitySolver
from chrsat.terms import DELETED, FreshVar, Occur, TermStore


def build_merged_cycles():
    """Three merges: A = B (b1), C = B (b2), B = D (b3); r, u on A, s on B, t on D.

    The splice points below fix the layout of the merged cycle.
    """
    st = TermStore()
    values = [0, 1, 1, 1]
    eq = EqualitySolver(st, values)
    r = st.start[st.new_term("r", [FreshVar("A")])]
    u = st.start[st.new_term("u", [Occur(r)])]
    b_, c_, d_ = st.new_var("B"), st.new_var("C"), st.new_var("D")
    s = st.start[st.new_term("s", [Occur(b_)])]
    t = st.start[st.new_term("t", [Occur(d_)])]
    e1 = eq.new_eq(1, r, b_)
    eq.new_eq(2, c_, st.start[e1] + 2)
    eq.new_eq(3, b_, d_)
    for b in (1, 2, 3):
        eq.assert_eq_true(b)
    return st, eq, {"r": r, "u": u, "s": s, "t": t}


def test_merged_cycle_justification_table():
    # [PAPER] twist-stack sequences and justifications
    st, eq, c = build_merged_cycles()
    table = {
        ("r", "s"): ([("push", 1), ("push", 2), ("pop", 2)], {1}),
        ("r", "t"): ([("push", 1), ("push", 2), ("pop", 2), ("push", 3)], {1, 3}),
        ("r", "u"): ([("push", 1), ("push", 2), ("pop", 2), ("push", 3), ("pop", 3), ("pop", 1)], set()),
        ("u", "r"): ([], set()),
    }
    for (a, b), (seq, just) in table.items():
        trace = []
        assert eq.ask_eq(c[a], c[b], trace=trace) == just
        assert trace == seq
        assert eq.ask_eq(c[a], c[b]) == just


def test_justification_symmetry():
    # [PAPER] ask_eq(R, S) = ask_eq(S, R)
    st, eq, c = build_merged_cycles()
    for a in c:
        for b in c:
            assert eq.ask_eq(c[a], c[b]) == eq.ask_eq(c[b], c[a])


def test_merge_swaps_links_and_marks_twist():
    st = TermStore()
    values = [0, 1]
    eq = EqualitySolver(st, values)
    x, y = st.new_var("X"), st.new_var("Y")
    bid = eq.new_eq(1, x, y)
    rx, ry = eq.args(1)
    nx, ny = st.val[rx], st.val[ry]
    m = st.mark()
    assert eq.assert_eq_true(1) == []
    assert st.val[rx] == ny and st.val[ry] == nx
    assert st.flag[bid] == MERGED and eq.n_merged == 1
    assert eq.ask_eq(x, y) == {1}
    st.undo_to(m)
    eq.recount()
    assert eq.n_merged == 0
    assert eq.ask_eq(x, y) is None


def test_redundant_equality_is_deleted_with_clause():
    st = TermStore()
    values = [0, 1, 1, 1]
    eq = EqualitySolver(st, values)
    x, y, z = (st.new_var(n) for n in "XYZ")
    eq.new_eq(1, x, y)
    eq.new_eq(2, y, z)
    b3 = eq.new_eq(3, x, z)
    eq.assert_eq_true(1)
    eq.assert_eq_true(2)
    assert eq.assert_eq_true(3) == [[-1, -2, 3]]
    assert st.functor[b3] == DELETED
    assert eq.n_merged == 2


def test_disequality_conflict_clause():
    st = TermStore()
    values = [0, -1, 1]
    eq = EqualitySolver(st, values)
    x, y = st.new_var("X"), st.new_var("Y")
    eq.new_eq(1, x, y)
    eq.new_eq(2, x, y)
    assert eq.assert_eq_false(1) == []
    # X = Y asserted through another equality term: the false one is violated
    assert eq.assert_eq_true(2) == [[-2, 1]]


def test_same_variable_is_equal_without_justification():
    st = TermStore()
    eq = EqualitySolver(st, [0])
    x = st.new_var("X")
    p = st.new_term("p", [Occur(x)])
    assert eq.ask_eq(x, st.start[p]) == frozenset()


def test_unrelated_variables_are_unknown():
    st = TermStore()
    eq = EqualitySolver(st, [0])
    assert eq.ask_eq(st.new_var("X"), st.new_var("Y")) is None


def test_equality_matches_union_find():
    # [DERIVED] union-find oracle, justification soundness and symmetry
    res = props.check_union_find(200, seed=3)
    assert res["queries"] > 10000
