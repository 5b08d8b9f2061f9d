"""Universal co-Buchi automata: construction from LTL, analysis, encodings.

The construction follows the classic expand/cover tableau of Gerth, Peled,
Vardi and Wolper: build a nondeterministic generalized Buchi automaton for
the negated formula, degeneralize with a counting construction, then read
the result as a universal co-Buchi automaton for the original formula
(transitions interpreted universally, Buchi-accepting states marked
rejecting).  Top-level disjuncts of the negation are translated separately
and joined under a fresh initial state, which keeps the degeneralization
counters local to each disjunct.

Edge guards are propositional LtlFormula values over the alphabet atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ltl
from .ltl import LtlFormula, atoms_of, is_propositional


@dataclass
class Ucw:
    """Universal co-Buchi automaton with formula-labelled edges.

    Missing (q, q') pairs mean no edge; a run that cannot continue simply
    dies, which is accepting under the universal reading.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    n_states: int
    initial: int
    guards: dict[tuple[int, int], LtlFormula]
    rejecting: frozenset[int]

    def __post_init__(self):
        assert 0 <= self.initial < self.n_states
        assert all(0 <= q < self.n_states for q in self.rejecting)
        alphabet = set(self.inputs) | set(self.outputs)
        for (q, q2), g in self.guards.items():
            assert 0 <= q < self.n_states and 0 <= q2 < self.n_states
            assert is_propositional(g), "guards must be propositional"
            assert atoms_of(g) <= alphabet, "guard mentions atoms outside the alphabet"

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def successors(self, q: int) -> list[int]:
        return sorted(q2 for (q1, q2) in self.guards if q1 == q)


def eval_guard(guard: LtlFormula, letter: frozenset[str]) -> bool:
    """Evaluate a propositional guard under a letter (set of true atoms)."""
    k = guard.kind
    if k == ltl.ATOM:
        return guard.name in letter
    if k == ltl.TRUE:
        return True
    if k == ltl.FALSE:
        return False
    if k == ltl.NOT:
        return not eval_guard(guard.children[0], letter)
    if k == ltl.AND:
        return all(eval_guard(c, letter) for c in guard.children)
    if k == ltl.OR:
        return any(eval_guard(c, letter) for c in guard.children)
    if k == ltl.IMPLIES:
        a, b = guard.children
        return (not eval_guard(a, letter)) or eval_guard(b, letter)
    if k == ltl.IFF:
        a, b = guard.children
        return eval_guard(a, letter) == eval_guard(b, letter)
    raise ValueError(f"guard contains temporal operator {k}")


def guard_satisfiable(guard: LtlFormula) -> bool:
    """Brute-force satisfiability over the guard's own atoms."""
    names = sorted(atoms_of(guard))
    for mask in range(1 << len(names)):
        letter = frozenset(n for j, n in enumerate(names) if mask >> j & 1)
        if eval_guard(guard, letter):
            return True
    return False


# ---------------------------------------------------------------------------
# Tableau construction


@dataclass
class _TabNode:
    old: frozenset[LtlFormula]
    nxt: frozenset[LtlFormula]
    incoming: set[int] = field(default_factory=set)


_INIT = -1


def _is_literal(f: LtlFormula) -> bool:
    return f.kind == ltl.ATOM or (f.kind == ltl.NOT and f.children[0].kind == ltl.ATOM)


def _expand(new: set, old: set, nxt: set, incoming: set[int], closed: list[_TabNode], work: list):
    while True:
        if not new:
            old_f, nxt_f = frozenset(old), frozenset(nxt)
            for nd in closed:
                if nd.old == old_f and nd.nxt == nxt_f:
                    nd.incoming |= incoming
                    return
            closed.append(_TabNode(old_f, nxt_f, set(incoming)))
            work.append((nxt_f, len(closed) - 1))
            return
        f = new.pop()
        if f in old:
            continue
        k = f.kind
        if k == ltl.TRUE:
            continue
        if k == ltl.FALSE:
            return  # contradictory branch
        if _is_literal(f):
            neg = f.children[0] if k == ltl.NOT else ltl.lnot(f)
            if neg in old:
                return
            old.add(f)
            continue
        if k == ltl.AND:
            new.update(set(f.children) - old)
            old.add(f)
            continue
        if k == ltl.NEXT:
            nxt.add(f.children[0])
            old.add(f)
            continue
        if k == ltl.OR:
            a, b = f.children
            _expand(new | {a}, old | {f}, set(nxt), set(incoming), closed, work)
            new.add(b)
            old.add(f)
            continue
        if k == ltl.UNTIL:
            a, b = f.children
            # a U b  =  b or (a and X(a U b))
            _expand(new | {a}, old | {f}, nxt | {f}, set(incoming), closed, work)
            new.add(b)
            old.add(f)
            continue
        if k == ltl.RELEASE:
            a, b = f.children
            # a R b  =  b and (a or X(a R b))
            _expand(new | {b}, old | {f}, nxt | {f}, set(incoming), closed, work)
            new.update({a, b} - old)
            old.add(f)
            continue
        raise ValueError(f"tableau input must be in negation normal form, got {k}")


def _tableau(phi: LtlFormula):
    """GPVW expansion.  Returns (nodes, initial ids, acceptance sets, labels).

    Acceptance sets are per Until subformula of phi: a run must infinitely
    often visit a node where the Until is absent or already fulfilled.
    """
    closed: list[_TabNode] = []
    work: list[tuple[frozenset, int]] = []
    _expand({phi}, set(), set(), {_INIT}, closed, work)
    while work:
        nxt_f, src = work.pop()
        _expand(set(nxt_f), set(), set(), {src}, closed, work)

    untils = []
    seen = set()
    stack = [phi]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if g.kind == ltl.UNTIL:
            untils.append(g)
        stack.extend(g.children)
    untils.sort(key=ltl.format_ltl)

    acc_sets = []
    for u in untils:
        fulfilled = u.children[1]
        acc_sets.append(
            frozenset(
                idx
                for idx, nd in enumerate(closed)
                if u not in nd.old or fulfilled in nd.old
            )
        )

    labels = []
    for nd in closed:
        lab = {}
        for f in nd.old:
            if f.kind == ltl.ATOM:
                lab[f.name] = True
            elif _is_literal(f):
                lab[f.children[0].name] = False
        labels.append(lab)

    initial = [idx for idx, nd in enumerate(closed) if _INIT in nd.incoming]
    succ = [[] for _ in closed]
    for idx, nd in enumerate(closed):
        for src in nd.incoming:
            if src != _INIT:
                succ[src].append(idx)
    return succ, initial, acc_sets, labels


def _degeneralize(succ, initial, acc_sets, labels):
    """Counting construction; returns (succ, initial, accepting, labels)."""
    k = len(acc_sets)
    if k == 0:
        accepting = frozenset(range(len(succ)))
        return succ, initial, accepting, labels
    if k == 1:
        return succ, initial, acc_sets[0], labels

    index: dict[tuple[int, int], int] = {}
    out_succ: list[list[int]] = []
    out_labels: list[dict] = []

    def get(s: int, c: int) -> int:
        key = (s, c)
        if key not in index:
            index[key] = len(out_succ)
            out_succ.append([])
            out_labels.append(labels[s])
        return index[key]

    start = [get(s, 0) for s in initial]
    frontier = list(index)
    done = set()
    while frontier:
        key = frontier.pop()
        if key in done:
            continue
        done.add(key)
        s, c = key
        c2 = (c + 1) % k if s in acc_sets[c] else c
        for s2 in succ[s]:
            out_succ[get(s, c)].append(get(s2, c2))
            if (s2, c2) not in done:
                frontier.append((s2, c2))
    accepting = frozenset(
        idx for (s, c), idx in index.items() if c == 0 and s in acc_sets[0]
    )
    return out_succ, start, accepting, out_labels


def _label_guard(label: dict) -> LtlFormula:
    parts = []
    for name in sorted(label):
        a = ltl.atom(name)
        parts.append(a if label[name] else ltl.lnot(a))
    if not parts:
        return ltl.LTRUE
    out = parts[0]
    for p in parts[1:]:
        out = ltl.land(out, p)
    return out


def _top_disjuncts(f: LtlFormula) -> list[LtlFormula]:
    if f.kind == ltl.OR:
        return _top_disjuncts(f.children[0]) + _top_disjuncts(f.children[1])
    return [f]


def ltl_to_ucw(f: LtlFormula, inputs, outputs) -> Ucw:
    """Universal co-Buchi automaton accepting exactly the models of f."""
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    alphabet = set(inputs) | set(outputs)
    stray = atoms_of(f) - alphabet
    if stray:
        raise ValueError(f"formula atoms {sorted(stray)} outside the alphabet")

    # NBW for the negation; its accepting states become rejecting here.
    negated = ltl.negate(f)

    guards: dict[tuple[int, int], LtlFormula] = {}
    rejecting: set[int] = set()
    n_states = 1  # state 0 is the fresh initial state
    for part in _top_disjuncts(negated):
        if part.kind == ltl.FALSE:
            continue
        succ, initial, accepting, labels = _degeneralize(*_tableau(part))
        base = n_states
        n_states += len(succ)
        rejecting.update(base + s for s in accepting)
        for s in initial:
            guards[(0, base + s)] = _label_guard(labels[s])
        for s, targets in enumerate(succ):
            for s2 in set(targets):
                guards[(base + s, base + s2)] = _label_guard(labels[s2])

    a = Ucw(inputs, outputs, n_states, 0, guards, frozenset(rejecting))
    a = _prune_unreachable(a)
    a = _merge_duplicates(a)
    return a


def _prune_unreachable(a: Ucw) -> Ucw:
    reach = {a.initial}
    frontier = [a.initial]
    adj: dict[int, list[int]] = {}
    for (q, q2), g in a.guards.items():
        if guard_satisfiable(g):
            adj.setdefault(q, []).append(q2)
    while frontier:
        q = frontier.pop()
        for q2 in adj.get(q, ()):
            if q2 not in reach:
                reach.add(q2)
                frontier.append(q2)
    if len(reach) == a.n_states:
        return a
    remap = {q: j for j, q in enumerate(sorted(reach))}
    return Ucw(
        a.inputs,
        a.outputs,
        len(reach),
        remap[a.initial],
        {
            (remap[q], remap[q2]): g
            for (q, q2), g in a.guards.items()
            if q in reach and q2 in reach
        },
        frozenset(remap[q] for q in a.rejecting if q in reach),
    )


def _merge_duplicates(a: Ucw) -> Ucw:
    """Collapse states with identical rejecting flag and outgoing rows."""
    while True:
        signature: dict[tuple, int] = {}
        alias: dict[int, int] = {}
        for q in range(a.n_states):
            row = tuple(sorted(
                ((q2, ltl.format_ltl(g)) for (q1, q2), g in a.guards.items() if q1 == q)
            ))
            sig = (q in a.rejecting, q == a.initial, row)
            if sig in signature:
                alias[q] = signature[sig]
            else:
                signature[sig] = q
        if not alias:
            return a
        kept = sorted(set(range(a.n_states)) - set(alias))
        remap = {q: j for j, q in enumerate(kept)}
        for q, rep in alias.items():
            remap[q] = remap[rep]
        guards: dict[tuple[int, int], LtlFormula] = {}
        for (q, q2), g in sorted(a.guards.items(), key=lambda kv: kv[0]):
            key = (remap[q], remap[q2])
            guards[key] = ltl.lor(guards[key], g) if key in guards else g
        a = Ucw(
            a.inputs,
            a.outputs,
            len(kept),
            remap[a.initial],
            guards,
            frozenset(remap[q] for q in a.rejecting),
        )


# ---------------------------------------------------------------------------
# Lasso acceptance


def _sccs(num_nodes: int, adj) -> list[list[int]]:
    """Iterative Tarjan; returns components in reverse topological order."""
    index = [0] * num_nodes
    low = [0] * num_nodes
    on_stack = [False] * num_nodes
    visited = [False] * num_nodes
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = [1]

    for root in range(num_nodes):
        if visited[root]:
            continue
        call: list[tuple[int, int]] = [(root, 0)]
        while call:
            v, pos = call.pop()
            if pos == 0:
                visited[v] = True
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            neighbors = adj(v)
            while pos < len(neighbors):
                w = neighbors[pos]
                pos += 1
                if not visited[w]:
                    call.append((v, pos))
                    call.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
            if call:
                parent = call[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def ucw_accepts_lasso(a: Ucw, prefix, loop) -> bool:
    """True iff every run over prefix . loop^omega hits rejecting states
    only finitely often, checked on the product with the word positions."""
    if not loop:
        raise ValueError("loop must be nonempty")
    letters = [frozenset(l) for l in list(prefix) + list(loop)]
    total = len(letters)
    loop_start = len(prefix)

    def succ_pos(p: int) -> int:
        return p + 1 if p + 1 < total else loop_start

    # reachable product vertices (q, p)
    start = (a.initial, 0)
    nodes = {start: 0}
    order = [start]
    adj_list: list[list[int]] = [[]]
    frontier = [start]
    while frontier:
        q, p = frontier.pop()
        vid = nodes[(q, p)]
        p2 = succ_pos(p)
        for (q1, q2), g in a.guards.items():
            if q1 != q or not eval_guard(g, letters[p]):
                continue
            key = (q2, p2)
            if key not in nodes:
                nodes[key] = len(order)
                order.append(key)
                adj_list.append([])
                frontier.append(key)
            adj_list[vid].append(nodes[key])

    comps = _sccs(len(order), lambda v: adj_list[v])
    for comp in comps:
        members = set(comp)
        cyclic = len(comp) > 1 or comp[0] in adj_list[comp[0]]
        if cyclic and any(order[v][0] in a.rejecting for v in comp):
            return False
    return True


# ---------------------------------------------------------------------------
# SCC analysis for the counter reduction


@dataclass
class SccInfo:
    """Which automaton states carry rank counters, and how wide they are.

    compare_all disables the same-component restriction on rank
    comparisons (the unreduced encoding).
    """

    scc_id: dict[int, int]
    counted: frozenset[int]
    counter_bits: int
    compare_all: bool = False

    def needs_compare(self, q: int, q2: int) -> bool:
        if q not in self.counted or q2 not in self.counted:
            return False
        return self.compare_all or self.scc_id[q] == self.scc_id[q2]


def _edge_components(a: Ucw) -> list[list[int]]:
    adj: dict[int, list[int]] = {q: [] for q in range(a.n_states)}
    for (q, q2), g in a.guards.items():
        if guard_satisfiable(g):
            adj[q].append(q2)
    return _sccs(a.n_states, lambda v: adj[v])


def counter_width(a: Ucw, n_states_of_system: int) -> int:
    """Bits needed for ranks up to n*|F| (a run repeats beyond that)."""
    bound = n_states_of_system * len(a.rejecting)
    return max(1, (bound + 1 - 1).bit_length() if bound else 1)


def analyze_sccs(a: Ucw, n_states_of_system: int) -> SccInfo:
    """Counters only for states whose component contains a rejecting state."""
    if n_states_of_system < 1:
        raise ValueError("system bound must be positive")
    comps = _edge_components(a)
    scc_id = {}
    counted = set()
    for cid, comp in enumerate(comps):
        for q in comp:
            scc_id[q] = cid
        if any(q in a.rejecting for q in comp):
            counted.update(comp)
    return SccInfo(scc_id, frozenset(counted), counter_width(a, n_states_of_system))


def full_counters(a: Ucw, n_states_of_system: int) -> SccInfo:
    """Unreduced variant: every state counted, comparisons everywhere."""
    info = analyze_sccs(a, n_states_of_system)
    return SccInfo(
        info.scc_id,
        frozenset(range(a.n_states)),
        info.counter_bits,
        compare_all=True,
    )


# ---------------------------------------------------------------------------
# Symbolic (binary-coded) representation


@dataclass
class SymbolicUcw:
    """Binary-coded automaton: formulas over fresh state-bit atoms.

    delta_formula is satisfied by (code, letter, primed code) exactly for
    the explicit edges; codes outside 0..n_states-1 satisfy neither
    init_formula nor any source occurrence in delta_formula.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    n_states: int
    state_vars: tuple[str, ...]
    state_vars_primed: tuple[str, ...]
    init_formula: LtlFormula
    reject_formula: LtlFormula
    delta_formula: LtlFormula


def _code_formula(names, value: int) -> LtlFormula:
    out = None
    for j, name in enumerate(names):
        a = ltl.atom(name)
        bit = a if value >> j & 1 else ltl.lnot(a)
        out = bit if out is None else ltl.land(out, bit)
    return out if out is not None else ltl.LTRUE


def encode_symbolic(a: Ucw) -> SymbolicUcw:
    """Binary-encode states with fresh bit atoms (at least one bit)."""
    bits = max(1, (a.n_states - 1).bit_length())
    taken = set(a.alphabet)
    base = "aut_b"
    while any(f"{base}{j}" in taken or f"{base}{j}_p" in taken for j in range(bits)):
        base += "_"
    names = tuple(f"{base}{j}" for j in range(bits))
    primed = tuple(f"{base}{j}_p" for j in range(bits))

    init = _code_formula(names, a.initial)

    reject = None
    for q in sorted(a.rejecting):
        term = _code_formula(primed, q)
        reject = term if reject is None else ltl.lor(reject, term)
    if reject is None:
        reject = ltl.LFALSE

    delta = None
    for (q, q2) in sorted(a.guards):
        term = ltl.land(
            ltl.land(_code_formula(names, q), a.guards[(q, q2)]),
            _code_formula(primed, q2),
        )
        delta = term if delta is None else ltl.lor(delta, term)
    if delta is None:
        delta = ltl.LFALSE

    return SymbolicUcw(
        a.inputs, a.outputs, a.n_states, names, primed, init, reject, delta
    )


# ---------------------------------------------------------------------------
# Debug output


def ucw_to_dot(a: Ucw) -> str:
    """Graphviz text: double circles for rejecting states, guards on edges."""
    lines = ["digraph ucw {", "  init [shape=point];"]
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.rejecting else "circle"
        lines.append(f'  q{q} [shape={shape}, label="q{q}"];')
    lines.append(f"  init -> q{a.initial};")
    for (q, q2) in sorted(a.guards):
        text = ltl.format_ltl(a.guards[(q, q2)])
        lines.append(f'  q{q} -> q{q2} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
