import itertools
import random

import pytest

from ltlsynth.logic import (
    FALSE,
    TRUE,
    QuantifiedProblem,
    Store,
    bv_const,
    bv_equal,
    bv_greater,
    bv_less_const,
    bv_vars,
    emit_dimacs,
    emit_dqdimacs,
    emit_qdimacs,
    read_dimacs,
    tseitin,
)
from oracles import dpll


def test_hash_consing_shares_nodes():
    s = Store()
    a, b = s.new_var("a"), s.new_var("b")
    f1 = s.and_([s.var(a), s.or_([s.var(b), s.not_(s.var(a))])])
    before = len(s.nodes)
    f2 = s.and_([s.var(a), s.or_([s.var(b), s.not_(s.var(a))])])
    assert f1 == f2
    assert len(s.nodes) == before


def test_constant_folding():
    s = Store()
    a = s.var(s.new_var("a"))
    assert s.and_([a, TRUE]) == a
    assert s.and_([a, FALSE]) == FALSE
    assert s.or_([a, TRUE]) == TRUE
    assert s.and_([a, s.not_(a)]) == FALSE
    assert s.or_([a, s.not_(a)]) == TRUE
    assert s.not_(s.not_(a)) == a
    assert s.and_([]) == TRUE
    assert s.or_([]) == FALSE
    assert s.xor2(a, a) == FALSE
    assert s.ite(TRUE, a, FALSE) == a


def _rand_formula(s, rng, var_nodes, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(var_nodes + [TRUE, FALSE])
    pick = rng.randrange(5)
    if pick == 0:
        return s.not_(_rand_formula(s, rng, var_nodes, depth - 1))
    if pick == 1:
        return s.and_([_rand_formula(s, rng, var_nodes, depth - 1) for _ in range(rng.randrange(2, 4))])
    if pick == 2:
        return s.or_([_rand_formula(s, rng, var_nodes, depth - 1) for _ in range(rng.randrange(2, 4))])
    if pick == 3:
        return s.xor2(
            _rand_formula(s, rng, var_nodes, depth - 1),
            _rand_formula(s, rng, var_nodes, depth - 1),
        )
    return s.ite(
        _rand_formula(s, rng, var_nodes, depth - 1),
        _rand_formula(s, rng, var_nodes, depth - 1),
        _rand_formula(s, rng, var_nodes, depth - 1),
    )


def test_tseitin_equisatisfiable_and_witnessed():
    rng = random.Random(5)
    for _ in range(120):
        s = Store()
        vids = [s.new_var(f"x{j}") for j in range(rng.randrange(1, 6))]
        nodes = [s.var(v) for v in vids]
        root = _rand_formula(s, rng, nodes, 3)
        clauses, lit, num_vars = tseitin(s, root)

        truth = False
        for bits in itertools.product([False, True], repeat=len(vids)):
            if s.evaluate(root, dict(zip(vids, bits))):
                truth = True
                break
        model = dpll(clauses)
        assert (model is not None) == truth
        if model is not None and root not in (TRUE, FALSE):
            # the CNF witness restricted to the original vars satisfies root
            assignment = {v: model.get(v, False) for v in vids}
            assert s.evaluate(root, assignment)


def test_tseitin_trivial_cases():
    s = Store()
    v = s.new_var("x")
    clauses, _, n = tseitin(s, s.var(v))
    assert clauses == [[1]] and n == 1

    a, b = s.new_var("a"), s.new_var("b")
    root = s.and_([s.var(a), s.var(b)])
    clauses, lit, n = tseitin(s, root)
    t = lit[root]
    assert [t] in clauses
    assert sorted(map(sorted, clauses)) == sorted(
        map(sorted, [[-t, 2], [-t, 3], [t, -2, -3], [t]])
    )


def test_tseitin_evaluation_agreement_with_witness_extension():
    rng = random.Random(9)
    for _ in range(60):
        s = Store()
        vids = [s.new_var(f"x{j}") for j in range(3)]
        nodes = [s.var(v) for v in vids]
        root = _rand_formula(s, rng, nodes, 3)
        if root in (TRUE, FALSE):
            continue
        clauses, lit, num_vars = tseitin(s, root)
        defs = {n: l for n, l in lit.items() if l > len(vids)}
        for bits in itertools.product([False, True], repeat=3):
            assignment = dict(zip(vids, bits))
            full = {v: assignment.get(v, False) for v in range(1, num_vars + 1)}
            for node, l in defs.items():
                full[abs(l)] = s.evaluate(node, assignment) == (l > 0)
            ok = all(any((full[abs(x)]) == (x > 0) for x in c) for c in clauses)
            assert ok == s.evaluate(root, assignment)


@pytest.mark.parametrize("width", [1, 2, 3])
def test_bv_greater_matches_integers(width):
    s = Store()
    for x in range(1 << width):
        for y in range(1 << width):
            xv = bv_const(s, x, width)
            yv = bv_const(s, y, width)
            assert (bv_greater(s, xv, yv, True) == TRUE) == (x > y)
            assert (bv_greater(s, xv, yv, False) == TRUE) == (x >= y)
            assert (bv_equal(s, xv, yv) == TRUE) == (x == y)


def test_bv_less_const():
    s = Store()
    for width in (1, 2, 3):
        for bound in range(1, (1 << width) + 2):
            for x in range(1 << width):
                r = bv_less_const(s, bv_const(s, x, width), bound)
                assert (r == TRUE) == (x < bound), (width, bound, x)


def test_bv_greater_symbolic_truth_table():
    s = Store()
    xv, xids = bv_vars(s, "x", 2)
    yv, yids = bv_vars(s, "y", 2)
    strict = bv_greater(s, xv, yv, True)
    loose = bv_greater(s, xv, yv, False)
    for x in range(4):
        for y in range(4):
            env = {xids[0]: bool(x & 1), xids[1]: bool(x & 2),
                   yids[0]: bool(y & 1), yids[1]: bool(y & 2)}
            assert s.evaluate(strict, env) == (x > y)
            assert s.evaluate(loose, env) == (x >= y)


def test_bv_width_mismatch():
    s = Store()
    with pytest.raises(ValueError):
        bv_greater(s, bv_const(s, 0, 2), bv_const(s, 0, 3), True)


def test_emit_dimacs_trivial():
    s = Store()
    x = s.new_var("x")
    p = QuantifiedProblem(s, s.var(x), [("e", [x])])
    assert emit_dimacs(p) == "p cnf 1 1\n1 0\n"


def test_emit_qdimacs_forall_exists():
    s = Store()
    u = s.new_var("u")
    e = s.new_var("e")
    p = QuantifiedProblem(s, s.iff(s.var(e), s.var(u)), [("a", [u]), ("e", [e])])
    text = emit_qdimacs(p)
    lines = text.splitlines()
    assert lines[0].startswith("p cnf ")
    assert lines[1] == "a 1 0"
    # Tseitin definition variables join the innermost existential block
    assert lines[2].startswith("e 2")
    doc = read_dimacs(text)
    assert doc.blocks[0] == ("a", [1])
    assert doc.blocks[1][1][0] == 2
    assert doc.render() == text
    # semantic check: satisfiable, and the e-copies must track u
    model = dpll(doc.clauses)
    assert model is not None


def test_emit_fragment_mismatch():
    s = Store()
    u = s.new_var("u")
    e = s.new_var("e")
    qbf = QuantifiedProblem(s, s.var(e), [("a", [u]), ("e", [e])])
    with pytest.raises(ValueError):
        emit_dimacs(qbf)
    with pytest.raises(ValueError):
        emit_dqdimacs(qbf)
    dqbf = QuantifiedProblem(
        s, s.var(e), [("a", [u]), ("e", [e])], deps={e: frozenset([u])}
    )
    with pytest.raises(ValueError):
        emit_qdimacs(dqbf)
    text = emit_dqdimacs(dqbf)
    assert "d 2 1 0" in text.splitlines()


def test_dqdimacs_tseitin_deps_are_cone_unions():
    s = Store()
    u1, u2 = s.new_var("u1"), s.new_var("u2")
    e1, e2 = s.new_var("e1"), s.new_var("e2")
    matrix = s.and_([
        s.or_([s.var(e1), s.var(u1)]),
        s.or_([s.var(e2), s.var(u2)]),
    ])
    p = QuantifiedProblem(
        s,
        matrix,
        [("a", [u1, u2]), ("e", [e1, e2])],
        deps={e1: frozenset([u1]), e2: frozenset([u1, u2])},
    )
    text = emit_dqdimacs(p)
    doc = read_dimacs(text)
    deps = {v: set(ds) for v, ds in doc.dep_lines}
    assert deps[e1] == {u1}
    assert deps[e2] == {u1, u2}
    # or-gate over {e1,u1} depends on u1 only; the top and-gate on both
    tseitin_deps = [ds for v, ds in doc.dep_lines if v > 4]
    assert {frozenset(d) for d in tseitin_deps} == {
        frozenset([u1]),
        frozenset([u1, u2]),
    }
    assert doc.render() == text


def test_round_trip_byte_identical():
    rng = random.Random(3)
    for _ in range(40):
        s = Store()
        vids = [s.new_var(f"x{j}") for j in range(4)]
        nodes = [s.var(v) for v in vids]
        root = _rand_formula(s, rng, nodes, 3)
        if root in (TRUE, FALSE):
            continue
        p = QuantifiedProblem(s, root, [("e", vids)])
        text = emit_dimacs(p)
        assert read_dimacs(text).render() == text
        p2 = QuantifiedProblem(s, root, [("e", vids[:2]), ("a", vids[2:3]), ("e", vids[3:])])
        text2 = emit_qdimacs(p2)
        assert read_dimacs(text2).render() == text2


def test_problem_validates_binding():
    s = Store()
    x = s.new_var("x")
    y = s.new_var("y")
    with pytest.raises(ValueError):
        QuantifiedProblem(s, s.and_([s.var(x), s.var(y)]), [("e", [x])])
    with pytest.raises(ValueError):
        QuantifiedProblem(s, s.var(x), [("e", [x]), ("a", [x])])
