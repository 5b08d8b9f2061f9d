"""The four bounded-synthesis encoders: SAT, QBF, and two DQBF variants.

Each encoder turns (automaton, system bound, semantics, counter info) into
a QuantifiedProblem over a fresh Store plus a VarDirectory mapping the
encoding roles back to variable numbers for extraction.

Shared structure: reachability flags per (system state, automaton state),
rank counters compared along automaton edges (strictly into rejecting
states), a transition relation with at least one successor everywhere, and
output variables feeding the specialized edge guards.  The variants differ
in what stays explicit: the basic encoding enumerates inputs and states,
the input-symbolic one quantifies over inputs, the state-symbolic one also
treats system states as universally quantified bit vectors (with
Ackermann-style consistency ties between the two state occurrences), and
the fully symbolic one additionally runs over a binary-coded automaton.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ltl
from .automaton import SccInfo, SymbolicUcw, Ucw
from .logic import (
    FALSE,
    TRUE,
    BitVec,
    QuantifiedProblem,
    Store,
    bv_equal,
    bv_greater,
    bv_less_const,
)
from .ltl import LtlFormula
from .system import MEALY, MOORE, input_valuations

BASIC = "basic"
INPUT_SYMBOLIC = "input"
STATE_SYMBOLIC = "state"
FULLY_SYMBOLIC = "full"


@dataclass
class VarDirectory:
    """Role -> variable map for one encoded instance.

    Key shapes per kind:
      basic:  reach[(t,q)], rank[(t,q)]=BitVec, trans[(t,i_idx,t2)],
              out[(name,t,i_idx)] (Mealy) or out[(name,t)] (Moore)
      input:  reach[(t,q)], rank[(t,q)], trans[(t,t2)], out[(name,t)]
      state:  reach[q], rank[q], reach2[q], rank2[q], trans[j], out[name]
      full:   reach[()], rank[()], reach2[()], rank2[()], trans[j], out[name]
    """

    kind: str
    semantics: str
    n: int
    counter_bits: int
    reach: dict = field(default_factory=dict)
    rank: dict = field(default_factory=dict)
    reach2: dict = field(default_factory=dict)
    rank2: dict = field(default_factory=dict)
    trans: dict = field(default_factory=dict)
    out: dict = field(default_factory=dict)
    univ_inputs: dict = field(default_factory=dict)
    univ_state: list = field(default_factory=list)
    univ_state2: list = field(default_factory=list)
    univ_aut: list = field(default_factory=list)
    univ_aut2: list = field(default_factory=list)

    def all_vars(self) -> list[int]:
        out: list[int] = []
        for d in (self.reach, self.reach2, self.trans, self.out):
            out.extend(d.values())
        for d in (self.rank, self.rank2):
            for ids in d.values():
                out.extend(ids)
        out.extend(self.univ_inputs.values())
        out.extend(self.univ_state)
        out.extend(self.univ_state2)
        out.extend(self.univ_aut)
        out.extend(self.univ_aut2)
        return out


def guard_to_node(store: Store, guard: LtlFormula, atom_map: dict[str, int]) -> int:
    """Compile a propositional guard, substituting nodes for atoms."""
    k = guard.kind
    if k == ltl.ATOM:
        return atom_map[guard.name]
    if k == ltl.TRUE:
        return TRUE
    if k == ltl.FALSE:
        return FALSE
    if k == ltl.NOT:
        return store.not_(guard_to_node(store, guard.children[0], atom_map))
    if k == ltl.AND:
        return store.and_([guard_to_node(store, c, atom_map) for c in guard.children])
    if k == ltl.OR:
        return store.or_([guard_to_node(store, c, atom_map) for c in guard.children])
    if k == ltl.IMPLIES:
        a, b = guard.children
        return store.implies(
            guard_to_node(store, a, atom_map), guard_to_node(store, b, atom_map)
        )
    if k == ltl.IFF:
        a, b = guard.children
        return store.iff(
            guard_to_node(store, a, atom_map), guard_to_node(store, b, atom_map)
        )
    raise ValueError(f"guard contains temporal operator {k}")


def specialize_guard(
    store: Store,
    a: Ucw,
    q: int,
    q2: int,
    i: frozenset[str],
    outvars: dict[str, int],
) -> int:
    """Edge guard with inputs fixed to the valuation and outputs to nodes."""
    guard = a.guards.get((q, q2))
    if guard is None:
        return FALSE
    atom_map = {name: (TRUE if name in i else FALSE) for name in a.inputs}
    atom_map.update(outvars)
    return guard_to_node(store, guard, atom_map)


def _rank_vec(store: Store, directory_rank: dict, key, b: int, prefix: str) -> BitVec:
    ids = [store.new_var(f"{prefix}_b{j}") for j in range(b)]
    directory_rank[key] = tuple(ids)
    return BitVec(tuple(store.var(v) for v in ids))


def _compare(store, scc: SccInfo, a: Ucw, rank_nodes, q, t_key, q2, t2_key) -> int | None:
    """rank[target] >= rank[source], strict into rejecting states."""
    if not scc.needs_compare(q, q2):
        return None
    src = rank_nodes[(t_key, q)]
    tgt = rank_nodes[(t2_key, q2)]
    return bv_greater(store, tgt, src, strict=q2 in a.rejecting)


# ---------------------------------------------------------------------------
# Basic (purely propositional)


def encode_basic(a: Ucw, n: int, sem: str, scc: SccInfo) -> tuple[QuantifiedProblem, VarDirectory]:
    if n < 1:
        raise ValueError("bound must be positive")
    store = Store()
    m = a.n_states
    b = scc.counter_bits
    vals = input_valuations(a.inputs)
    d = VarDirectory(BASIC, sem, n, b)

    for t in range(n):
        for q in range(m):
            d.reach[(t, q)] = store.new_var(f"reach_t{t}_q{q}")
    rank_nodes: dict = {}
    for t in range(n):
        for q in sorted(scc.counted):
            rank_nodes[(t, q)] = _rank_vec(store, d.rank, (t, q), b, f"rank_t{t}_q{q}")
    for t in range(n):
        for ii in range(len(vals)):
            for t2 in range(n):
                d.trans[(t, ii, t2)] = store.new_var(f"trans_t{t}_i{ii}_t{t2}")
    for name in a.outputs:
        for t in range(n):
            if sem == MOORE:
                d.out[(name, t)] = store.new_var(f"out_{name}_t{t}")
            else:
                for ii in range(len(vals)):
                    d.out[(name, t, ii)] = store.new_var(f"out_{name}_t{t}_i{ii}")

    def outvars(t: int, ii: int) -> dict[str, int]:
        if sem == MOORE:
            return {name: store.var(d.out[(name, t)]) for name in a.outputs}
        return {name: store.var(d.out[(name, t, ii)]) for name in a.outputs}

    conjuncts = [store.var(d.reach[(0, a.initial)])]
    for t in range(n):
        for ii in range(len(vals)):
            conjuncts.append(store.or_([store.var(d.trans[(t, ii, t2)]) for t2 in range(n)]))

    for q in range(m):
        for t in range(n):
            parts = []
            for q2 in a.successors(q):
                for ii, i in enumerate(vals):
                    delta = specialize_guard(store, a, q, q2, i, outvars(t, ii))
                    if delta == FALSE:
                        continue
                    inner = []
                    for t2 in range(n):
                        body = [store.var(d.reach[(t2, q2)])]
                        cmp = _compare(store, scc, a, rank_nodes, q, t, q2, t2)
                        if cmp is not None:
                            body.append(cmp)
                        inner.append(
                            store.implies(store.var(d.trans[(t, ii, t2)]), store.and_(body))
                        )
                    parts.append(store.implies(delta, store.and_(inner)))
            if parts:
                conjuncts.append(store.implies(store.var(d.reach[(t, q)]), store.and_(parts)))

    matrix = store.and_(conjuncts)
    problem = QuantifiedProblem(store, matrix, [("e", list(range(1, store.num_vars + 1)))])
    return problem, d


# ---------------------------------------------------------------------------
# Input-symbolic (QBF)


def encode_input_symbolic(a: Ucw, n: int, sem: str, scc: SccInfo) -> tuple[QuantifiedProblem, VarDirectory]:
    if n < 1:
        raise ValueError("bound must be positive")
    store = Store()
    m = a.n_states
    b = scc.counter_bits
    d = VarDirectory(INPUT_SYMBOLIC, sem, n, b)

    outer: list[int] = []
    inner: list[int] = []
    for t in range(n):
        for q in range(m):
            d.reach[(t, q)] = store.new_var(f"reach_t{t}_q{q}")
            outer.append(d.reach[(t, q)])
    rank_nodes: dict = {}
    for t in range(n):
        for q in sorted(scc.counted):
            rank_nodes[(t, q)] = _rank_vec(store, d.rank, (t, q), b, f"rank_t{t}_q{q}")
            outer.extend(d.rank[(t, q)])
    if sem == MOORE:
        for name in a.outputs:
            for t in range(n):
                d.out[(name, t)] = store.new_var(f"out_{name}_t{t}")
                outer.append(d.out[(name, t)])

    universals = [store.new_var(f"in_{name}") for name in a.inputs]
    d.univ_inputs = dict(zip(a.inputs, universals))

    for t in range(n):
        for t2 in range(n):
            d.trans[(t, t2)] = store.new_var(f"trans_t{t}_t{t2}")
            inner.append(d.trans[(t, t2)])
    if sem == MEALY:
        for name in a.outputs:
            for t in range(n):
                d.out[(name, t)] = store.new_var(f"out_{name}_t{t}")
                inner.append(d.out[(name, t)])

    def atom_map(t: int) -> dict[str, int]:
        mapping = {name: store.var(v) for name, v in d.univ_inputs.items()}
        mapping.update({name: store.var(d.out[(name, t)]) for name in a.outputs})
        return mapping

    conjuncts = [store.var(d.reach[(0, a.initial)])]
    for t in range(n):
        conjuncts.append(store.or_([store.var(d.trans[(t, t2)]) for t2 in range(n)]))

    for q in range(m):
        for t in range(n):
            parts = []
            for q2 in a.successors(q):
                delta = guard_to_node(store, a.guards[(q, q2)], atom_map(t))
                if delta == FALSE:
                    continue
                inner_parts = []
                for t2 in range(n):
                    body = [store.var(d.reach[(t2, q2)])]
                    cmp = _compare(store, scc, a, rank_nodes, q, t, q2, t2)
                    if cmp is not None:
                        body.append(cmp)
                    inner_parts.append(
                        store.implies(store.var(d.trans[(t, t2)]), store.and_(body))
                    )
                parts.append(store.implies(delta, store.and_(inner_parts)))
            if parts:
                conjuncts.append(store.implies(store.var(d.reach[(t, q)]), store.and_(parts)))

    matrix = store.and_(conjuncts)
    problem = QuantifiedProblem(
        store, matrix, [("e", outer), ("a", universals), ("e", inner)]
    )
    return problem, d


# ---------------------------------------------------------------------------
# State-symbolic (DQBF over explicit automaton states)


def encode_state_symbolic(a: Ucw, n: int, sem: str, scc: SccInfo) -> tuple[QuantifiedProblem, VarDirectory]:
    if n < 1:
        raise ValueError("bound must be positive")
    store = Store()
    m = a.n_states
    b = scc.counter_bits
    k = (n - 1).bit_length()
    d = VarDirectory(STATE_SYMBOLIC, sem, n, b)

    d.univ_inputs = {name: store.new_var(f"in_{name}") for name in a.inputs}
    d.univ_state = [store.new_var(f"st_{j}") for j in range(k)]
    d.univ_state2 = [store.new_var(f"st2_{j}") for j in range(k)]
    universals = list(d.univ_inputs.values()) + d.univ_state + d.univ_state2

    t_set = frozenset(d.univ_state)
    t2_set = frozenset(d.univ_state2)
    ti_set = t_set | frozenset(d.univ_inputs.values())
    out_deps = ti_set if sem == MEALY else t_set

    deps: dict[int, frozenset[int]] = {}
    existentials: list[int] = []

    def allocate(name: str, dep: frozenset[int]) -> int:
        v = store.new_var(name)
        deps[v] = dep
        existentials.append(v)
        return v

    rank_nodes: dict = {}
    rank2_nodes: dict = {}
    for q in range(m):
        d.reach[q] = allocate(f"reach_q{q}", t_set)
    for q in sorted(scc.counted):
        ids = [allocate(f"rank_q{q}_b{j}", t_set) for j in range(b)]
        d.rank[q] = tuple(ids)
        rank_nodes[(0, q)] = BitVec(tuple(store.var(v) for v in ids))
    for q in range(m):
        d.reach2[q] = allocate(f"reach2_q{q}", t2_set)
    for q in sorted(scc.counted):
        ids = [allocate(f"rank2_q{q}_b{j}", t2_set) for j in range(b)]
        d.rank2[q] = tuple(ids)
        rank2_nodes[(1, q)] = BitVec(tuple(store.var(v) for v in ids))
    for j in range(k):
        d.trans[j] = allocate(f"trans_b{j}", ti_set)
    for name in a.outputs:
        d.out[name] = allocate(f"out_{name}", out_deps)

    t_vec = BitVec(tuple(store.var(v) for v in d.univ_state))
    t2_vec = BitVec(tuple(store.var(v) for v in d.univ_state2))
    trans_vec = BitVec(tuple(store.var(d.trans[j]) for j in range(k)))

    atom_map = {name: store.var(v) for name, v in d.univ_inputs.items()}
    atom_map.update({name: store.var(d.out[name]) for name in a.outputs})

    t_zero = store.and_([store.not_(bit) for bit in t_vec.bits])
    conjuncts = [store.implies(t_zero, store.var(d.reach[a.initial]))]

    match = store.and_(
        [store.iff(trans_vec.bits[j], t2_vec.bits[j]) for j in range(k)]
    )

    main_parts = []
    for q in range(m):
        parts = []
        for q2 in a.successors(q):
            delta = guard_to_node(store, a.guards[(q, q2)], atom_map)
            if delta == FALSE:
                continue
            body = [store.var(d.reach2[q2])]
            if scc.needs_compare(q, q2):
                body.append(
                    bv_greater(
                        store,
                        rank2_nodes[(1, q2)],
                        rank_nodes[(0, q)],
                        strict=q2 in a.rejecting,
                    )
                )
            parts.append(store.implies(store.and_([delta, match]), store.and_(body)))
        if parts:
            main_parts.append(store.implies(store.var(d.reach[q]), store.and_(parts)))

    main = store.and_(main_parts)
    if (1 << k) > n:
        # dead state codes carry no obligations, and tau may not produce one
        valid = store.and_([bv_less_const(store, t_vec, n), bv_less_const(store, t2_vec, n)])
        conjuncts.append(store.implies(valid, main))
        conjuncts.append(
            store.implies(bv_less_const(store, t_vec, n), bv_less_const(store, trans_vec, n))
        )
    else:
        conjuncts.append(main)

    # Ackermann consistency: equal state codes force equal function values
    same = bv_equal(store, t_vec, t2_vec)
    for q in range(m):
        ties = [store.iff(store.var(d.reach[q]), store.var(d.reach2[q]))]
        if q in scc.counted:
            ties.append(
                store.and_(
                    [
                        store.iff(x, y)
                        for x, y in zip(rank_nodes[(0, q)].bits, rank2_nodes[(1, q)].bits)
                    ]
                )
            )
        conjuncts.append(store.implies(same, store.and_(ties)))

    matrix = store.and_(conjuncts)
    problem = QuantifiedProblem(
        store,
        matrix,
        [("a", universals), ("e", existentials)],
        deps=deps,
    )
    return problem, d


# ---------------------------------------------------------------------------
# Fully symbolic (DQBF over a binary-coded automaton)


def encode_fully_symbolic(
    sa: SymbolicUcw, n: int, sem: str, scc_bits: int
) -> tuple[QuantifiedProblem, VarDirectory]:
    if n < 1:
        raise ValueError("bound must be positive")
    store = Store()
    b = scc_bits
    k = (n - 1).bit_length()
    d = VarDirectory(FULLY_SYMBOLIC, sem, n, b)

    d.univ_inputs = {name: store.new_var(f"in_{name}") for name in sa.inputs}
    d.univ_state = [store.new_var(f"st_{j}") for j in range(k)]
    d.univ_state2 = [store.new_var(f"st2_{j}") for j in range(k)]
    d.univ_aut = [store.new_var(f"aq_{j}") for j in range(len(sa.state_vars))]
    d.univ_aut2 = [store.new_var(f"aq2_{j}") for j in range(len(sa.state_vars))]
    universals = (
        list(d.univ_inputs.values())
        + d.univ_state
        + d.univ_state2
        + d.univ_aut
        + d.univ_aut2
    )

    t_set = frozenset(d.univ_state)
    t2_set = frozenset(d.univ_state2)
    tq_set = t_set | frozenset(d.univ_aut)
    tq2_set = t2_set | frozenset(d.univ_aut2)
    ti_set = t_set | frozenset(d.univ_inputs.values())
    out_deps = ti_set if sem == MEALY else t_set

    deps: dict[int, frozenset[int]] = {}
    existentials: list[int] = []

    def allocate(name: str, dep: frozenset[int]) -> int:
        v = store.new_var(name)
        deps[v] = dep
        existentials.append(v)
        return v

    d.reach[()] = allocate("reach", tq_set)
    d.rank[()] = tuple(allocate(f"rank_b{j}", tq_set) for j in range(b))
    d.reach2[()] = allocate("reach2", tq2_set)
    d.rank2[()] = tuple(allocate(f"rank2_b{j}", tq2_set) for j in range(b))
    for j in range(k):
        d.trans[j] = allocate(f"trans_b{j}", ti_set)
    for name in sa.outputs:
        d.out[name] = allocate(f"out_{name}", out_deps)

    t_vec = BitVec(tuple(store.var(v) for v in d.univ_state))
    t2_vec = BitVec(tuple(store.var(v) for v in d.univ_state2))
    trans_vec = BitVec(tuple(store.var(d.trans[j]) for j in range(k)))
    rank_vec = BitVec(tuple(store.var(v) for v in d.rank[()]))
    rank2_vec = BitVec(tuple(store.var(v) for v in d.rank2[()]))

    atom_map = {name: store.var(v) for name, v in d.univ_inputs.items()}
    atom_map.update({name: store.var(d.out[name]) for name in sa.outputs})
    for j, name in enumerate(sa.state_vars):
        atom_map[name] = store.var(d.univ_aut[j])
    for j, name in enumerate(sa.state_vars_primed):
        atom_map[name] = store.var(d.univ_aut2[j])

    q_init = guard_to_node(store, sa.init_formula, atom_map)
    q_reject2 = guard_to_node(store, sa.reject_formula, atom_map)
    delta = guard_to_node(store, sa.delta_formula, atom_map)

    t_zero = store.and_([store.not_(bit) for bit in t_vec.bits])
    reach = store.var(d.reach[()])
    reach2 = store.var(d.reach2[()])

    conjuncts = [store.implies(store.and_([t_zero, q_init]), reach)]

    match = store.and_(
        [store.iff(trans_vec.bits[j], t2_vec.bits[j]) for j in range(k)]
    )
    compare = store.and_(
        [
            store.implies(q_reject2, bv_greater(store, rank2_vec, rank_vec, True)),
            store.implies(store.not_(q_reject2), bv_greater(store, rank2_vec, rank_vec, False)),
        ]
    )
    main = store.implies(
        reach,
        store.implies(store.and_([delta, match]), store.and_([reach2, compare])),
    )
    if (1 << k) > n:
        valid = store.and_([bv_less_const(store, t_vec, n), bv_less_const(store, t2_vec, n)])
        conjuncts.append(store.implies(valid, main))
        conjuncts.append(
            store.implies(bv_less_const(store, t_vec, n), bv_less_const(store, trans_vec, n))
        )
    else:
        conjuncts.append(main)

    same = store.and_(
        [
            bv_equal(store, t_vec, t2_vec),
            store.and_(
                [
                    store.iff(store.var(a1), store.var(a2))
                    for a1, a2 in zip(d.univ_aut, d.univ_aut2)
                ]
            ),
        ]
    )
    ties = [store.iff(reach, reach2)]
    ties.append(store.and_([store.iff(x, y) for x, y in zip(rank_vec.bits, rank2_vec.bits)]))
    conjuncts.append(store.implies(same, store.and_(ties)))

    matrix = store.and_(conjuncts)
    problem = QuantifiedProblem(
        store,
        matrix,
        [("a", universals), ("e", existentials)],
        deps=deps,
    )
    return problem, d


# ---------------------------------------------------------------------------


def count_profile(problem: QuantifiedProblem) -> tuple[int, int, int]:
    """(existential count, universal count, matrix node count), pre-Tseitin."""
    n_exist = len(problem.existentials())
    n_univ = len(problem.universals())
    n_nodes = len(problem.store.reachable(problem.matrix))
    return n_exist, n_univ, n_nodes


ENCODERS = {
    BASIC: encode_basic,
    INPUT_SYMBOLIC: encode_input_symbolic,
    STATE_SYMBOLIC: encode_state_symbolic,
}
