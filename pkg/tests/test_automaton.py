import random

import networkx as nx
import pytest

from ltlsynth import ltl
from ltlsynth.automaton import (
    Ucw,
    analyze_sccs,
    encode_symbolic,
    eval_guard,
    full_counters,
    guard_satisfiable,
    ltl_to_ucw,
    ucw_accepts_lasso,
    ucw_to_dot,
)
from ltlsynth.ltl import parse_ltl
from oracles import all_lassos, all_letters, eval_ltl_lasso, random_formula

ARBITER = "G (r1 -> X F g1) && G (r2 -> X F g2) && G ! (g1 && g2)"


def ucw(text, inputs, outputs):
    return ltl_to_ucw(parse_ltl(text), inputs, outputs)


def test_guard_eval():
    g = parse_ltl("r1 && ! g1")
    assert eval_guard(g, frozenset(["r1"]))
    assert not eval_guard(g, frozenset(["r1", "g1"]))
    assert guard_satisfiable(g)
    assert not guard_satisfiable(parse_ltl("a && ! a"))


def test_ucw_globally_accepts_expected_lassos():
    a = ucw("G a", [], ["a"])
    on = frozenset(["a"])
    off = frozenset()
    for prefix, loop in all_lassos(["a"], 2, 2):
        expected = all(l == on for l in prefix + loop)
        assert ucw_accepts_lasso(a, prefix, loop) == expected
    assert ucw_accepts_lasso(a, [], [on])
    assert not ucw_accepts_lasso(a, [off], [on])


def test_ucw_false_accepts_nothing():
    a = ucw("false", [], ["a"])
    for prefix, loop in all_lassos(["a"], 1, 2):
        assert not ucw_accepts_lasso(a, prefix, loop)


def test_ucw_arbiter_paper_lassos():
    a = ucw(ARBITER, ["r1", "r2"], ["g1", "g2"])
    # the alternating-grant word realizes the arbiter formula
    assert ucw_accepts_lasso(a, [], [frozenset(["g1"]), frozenset(["g2"])])
    assert ucw_accepts_lasso(
        a, [], [frozenset(["r1", "g1"]), frozenset(["r2", "g2"])]
    )
    # simultaneous grants violate mutual exclusion
    assert not ucw_accepts_lasso(a, [], [frozenset(["g1", "g2"])])
    # a pending request never granted violates liveness
    assert not ucw_accepts_lasso(a, [], [frozenset(["r1"])])


def test_ltl_to_ucw_rejects_stray_atoms():
    with pytest.raises(ValueError):
        ucw("G x", ["a"], ["b"])


def test_language_against_trace_oracle_small():
    rng = random.Random(21)
    lassos = list(all_lassos(["a", "b"], 2, 2))
    for _ in range(40):
        f = random_formula(rng, ["a", "b"], depth=3)
        a = ltl_to_ucw(f, ["a"], ["b"])
        for prefix, loop in lassos:
            assert ucw_accepts_lasso(a, prefix, loop) == eval_ltl_lasso(
                f, prefix, loop
            ), ltl.format_ltl(f)


def test_language_against_trace_oracle_four_atoms():
    rng = random.Random(22)
    atoms = ["a", "b", "c", "d"]
    letters = all_letters(atoms)
    for _ in range(25):
        f = random_formula(rng, atoms, depth=3)
        a = ltl_to_ucw(f, ["a", "b"], ["c", "d"])
        for _ in range(60):
            prefix = [rng.choice(letters) for _ in range(rng.randrange(0, 3))]
            loop = [rng.choice(letters) for _ in range(rng.randrange(1, 3))]
            assert ucw_accepts_lasso(a, prefix, loop) == eval_ltl_lasso(
                f, prefix, loop
            ), ltl.format_ltl(f)


# ---------------------------------------------------------------------------
# SCC analysis


def test_analyze_sccs_non_rejecting_loop():
    a = Ucw((), ("a",), 1, 0, {(0, 0): ltl.LTRUE}, frozenset())
    info = analyze_sccs(a, 3)
    assert info.counted == frozenset()
    assert info.counter_bits == 1


def test_analyze_sccs_finally_wait_state():
    a = ucw("F g", [], ["g"])
    info = analyze_sccs(a, 2)
    # |F| = 1 rejecting wait state; bound n*|F| = 2 so two counter bits
    assert len(a.rejecting) == 1
    assert info.counter_bits == 2
    (wait,) = a.rejecting
    assert wait in info.counted


def test_analyze_sccs_arbiter_has_counted_rejecting_state():
    a = ucw(ARBITER, ["r1", "r2"], ["g1", "g2"])
    assert a.rejecting
    assert any(q in info_counted for info_counted in [analyze_sccs(a, 2).counted] for q in a.rejecting)


def test_analyze_sccs_matches_networkx():
    rng = random.Random(5)
    for _ in range(30):
        f = random_formula(rng, ["a", "b"], depth=3)
        a = ltl_to_ucw(f, ["a"], ["b"])
        info = analyze_sccs(a, 2)
        g = nx.DiGraph()
        g.add_nodes_from(range(a.n_states))
        for (q, q2), guard in a.guards.items():
            if guard_satisfiable(guard):
                g.add_edge(q, q2)
        expected = set()
        for comp in nx.strongly_connected_components(g):
            if any(q in a.rejecting for q in comp):
                expected |= comp
        assert info.counted == expected
        # scc ids partition consistently
        for comp in nx.strongly_connected_components(g):
            ids = {info.scc_id[q] for q in comp}
            assert len(ids) == 1


def test_counted_monotone_under_adding_rejecting():
    rng = random.Random(6)
    for _ in range(20):
        f = random_formula(rng, ["a", "b"], depth=3)
        a = ltl_to_ucw(f, ["a"], ["b"])
        base = analyze_sccs(a, 2).counted
        extra = frozenset(a.rejecting | {a.n_states - 1})
        grown = Ucw(a.inputs, a.outputs, a.n_states, a.initial, a.guards, extra)
        assert base <= analyze_sccs(grown, 2).counted


def test_full_counters():
    a = ucw("F g", [], ["g"])
    info = full_counters(a, 2)
    assert info.counted == frozenset(range(a.n_states))
    assert info.compare_all
    assert info.needs_compare(0, a.n_states - 1)


# ---------------------------------------------------------------------------
# Symbolic encoding


def _delta_models(sa):
    """Decode delta's satisfying assignments into (q, letter, q') triples."""
    triples = set()
    alphabet = list(sa.inputs + sa.outputs)
    width = len(sa.state_vars)
    for q in range(1 << width):
        for q2 in range(1 << width):
            for letter in all_letters(alphabet):
                env = set(letter)
                env |= {sa.state_vars[j] for j in range(width) if q >> j & 1}
                env |= {sa.state_vars_primed[j] for j in range(width) if q2 >> j & 1}
                if eval_guard(sa.delta_formula, frozenset(env)):
                    triples.add((q, frozenset(letter), q2))
    return triples


def test_encode_symbolic_single_state():
    a = Ucw((), ("a",), 1, 0, {(0, 0): ltl.LTRUE}, frozenset())
    sa = encode_symbolic(a)
    assert len(sa.state_vars) == 1
    # delta is satisfied exactly by code 0 -> code 0
    assert _delta_models(sa) == {
        (0, frozenset(), 0),
        (0, frozenset(["a"]), 0),
    }
    assert eval_guard(sa.init_formula, frozenset())
    assert not eval_guard(sa.init_formula, frozenset(sa.state_vars))


def test_encode_symbolic_three_states_excludes_dead_code():
    guards = {(0, 1): ltl.LTRUE, (1, 2): ltl.LTRUE, (2, 0): ltl.LTRUE}
    a = Ucw((), ("a",), 3, 0, guards, frozenset([2]))
    sa = encode_symbolic(a)
    assert len(sa.state_vars) == 2
    models = _delta_models(sa)
    assert all(q != 3 and q2 != 3 for q, _, q2 in models)
    # init excludes code 3
    env3 = frozenset(sa.state_vars)
    assert not eval_guard(sa.init_formula, env3)
    # reject formula is the primed code of state 2
    assert eval_guard(sa.reject_formula, frozenset([sa.state_vars_primed[1]]))
    assert not eval_guard(sa.reject_formula, frozenset())


def test_encode_symbolic_roundtrip_arbiter():
    a = ucw(ARBITER, ["r1", "r2"], ["g1", "g2"])
    sa = encode_symbolic(a)
    expected = set()
    for (q, q2), guard in a.guards.items():
        for letter in all_letters(list(a.alphabet)):
            if eval_guard(guard, letter):
                expected.add((q, letter, q2))
    assert _delta_models(sa) == expected


def test_ucw_to_dot_smoke():
    a = ucw("F g", [], ["g"])
    text = ucw_to_dot(a)
    assert "doublecircle" in text
    assert text == ucw_to_dot(a)
