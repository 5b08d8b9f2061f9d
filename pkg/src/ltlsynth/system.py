"""Finite Mealy/Moore transition systems and their dot/AIGER serializations."""

from __future__ import annotations

from dataclasses import dataclass

MEALY = "mealy"
MOORE = "moore"


def input_valuations(inputs) -> list[frozenset[str]]:
    """All input valuations in canonical order (bitmask over the name list)."""
    names = list(inputs)
    out = []
    for mask in range(1 << len(names)):
        out.append(frozenset(n for j, n in enumerate(names) if mask >> j & 1))
    return out


def _cube(names, valuation: frozenset[str]) -> str:
    return " ".join(n if n in valuation else f"!{n}" for n in names) or "-"


@dataclass
class TransitionSystem:
    """Deterministic finite-state machine over input/output propositions.

    State 0 is initial.  trans and label are total over states and input
    valuations; for Moore semantics the label may not depend on the input.
    """

    n: int
    semantics: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    trans: dict[tuple[int, frozenset[str]], int]
    label: dict[tuple[int, frozenset[str]], frozenset[str]]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one state")
        if self.semantics not in (MEALY, MOORE):
            raise ValueError(f"bad semantics {self.semantics!r}")
        vals = input_valuations(self.inputs)
        for t in range(self.n):
            for i in vals:
                if (t, i) not in self.trans:
                    raise ValueError(f"trans not total at ({t}, {set(i)})")
                tgt = self.trans[(t, i)]
                if not 0 <= tgt < self.n:
                    raise ValueError(f"transition target {tgt} out of range")
                if (t, i) not in self.label:
                    raise ValueError(f"label not total at ({t}, {set(i)})")
                if not self.label[(t, i)] <= set(self.outputs):
                    raise ValueError("label uses undeclared outputs")
            if self.semantics == MOORE:
                outs = {self.label[(t, i)] for i in vals}
                if len(outs) > 1:
                    raise ValueError(f"Moore label of state {t} depends on input")

    def moore_label(self, t: int) -> frozenset[str]:
        assert self.semantics == MOORE
        return self.label[(t, frozenset())]


def moore_system(n, inputs, outputs, trans, state_labels) -> TransitionSystem:
    """Convenience constructor: per-state labels, per-(state,input) successors."""
    vals = input_valuations(inputs)
    label = {(t, i): frozenset(state_labels[t]) for t in range(n) for i in vals}
    return TransitionSystem(n, MOORE, tuple(inputs), tuple(outputs), dict(trans), label)


def run(ts: TransitionSystem, inputs: list) -> list[tuple[int, frozenset[str]]]:
    """Execute from state 0; element j is (state_j, outputs_j)."""
    trace = []
    state = 0
    for raw in inputs:
        i = frozenset(raw)
        stray = i - set(ts.inputs)
        if stray:
            raise ValueError(f"unknown input atoms {sorted(stray)}")
        trace.append((state, ts.label[(state, i)]))
        state = ts.trans[(state, i)]
    return trace


def to_dot(ts: TransitionSystem) -> str:
    """Deterministic dot text; Moore labels in nodes, Mealy labels on edges."""
    lines = ["digraph system {", '  node [shape=circle];', "  init [shape=point];"]
    for t in range(ts.n):
        if ts.semantics == MOORE:
            lines.append(f'  s{t} [label="{t}\\n{_cube(ts.outputs, ts.moore_label(t))}"];')
        else:
            lines.append(f'  s{t} [label="{t}"];')
    lines.append("  init -> s0;")
    for t in range(ts.n):
        for i in input_valuations(ts.inputs):
            tgt = ts.trans[(t, i)]
            if ts.semantics == MOORE:
                edge = _cube(ts.inputs, i)
            else:
                edge = f"{_cube(ts.inputs, i)} / {_cube(ts.outputs, ts.label[(t, i)])}"
            lines.append(f'  s{t} -> s{tgt} [label="{edge}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


class _AagBuilder:
    """Accumulates AND gates; literals are AIGER-encoded (2v, negation +1)."""

    def __init__(self, first_free_var: int):
        self.next_var = first_free_var
        self.gates: list[tuple[int, int, int]] = []
        self._memo: dict[tuple[int, int], int] = {}

    def and2(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if a == 1:
            return b
        if b == 1:
            return a
        if a == b:
            return a
        if a > b:
            a, b = b, a
        key = (a, b)
        if key in self._memo:
            return self._memo[key]
        lhs = 2 * self.next_var
        self.next_var += 1
        self.gates.append((lhs, a, b))
        self._memo[key] = lhs
        return lhs

    def and_many(self, lits: list[int]) -> int:
        acc = 1
        for l in lits:
            acc = self.and2(acc, l)
        return acc

    def or_many(self, lits: list[int]) -> int:
        return self.and_many([l ^ 1 for l in lits]) ^ 1


def to_aiger(ts: TransitionSystem) -> str:
    """ASCII AIGER circuit: binary state code in latches, all-zero reset.

    Every output bit and next-state bit is a sum of products over the latch
    bits (plus input bits for Mealy outputs and all transitions), decomposed
    into two-input AND gates with inverters.
    """
    n_in = len(ts.inputs)
    state_bits = max(0, (ts.n - 1).bit_length())

    in_lit = {name: 2 * (j + 1) for j, name in enumerate(ts.inputs)}
    latch_lit = [2 * (n_in + j + 1) for j in range(state_bits)]
    builder = _AagBuilder(first_free_var=n_in + state_bits + 1)

    vals = input_valuations(ts.inputs)

    def minterm(t: int, i: frozenset[str], use_inputs: bool) -> int:
        lits = []
        for j in range(state_bits):
            lits.append(latch_lit[j] ^ (0 if t >> j & 1 else 1))
        if use_inputs:
            for name in ts.inputs:
                lits.append(in_lit[name] ^ (0 if name in i else 1))
        return builder.and_many(lits)

    def compile_function(true_points: list[tuple[int, frozenset[str]]], use_inputs: bool) -> int:
        if not true_points:
            return 0
        total = ts.n * (len(vals) if use_inputs else 1)
        if len(true_points) == total and state_bits == 0:
            return 1
        return builder.or_many([minterm(t, i, use_inputs) for t, i in true_points])

    out_lits = []
    for name in ts.outputs:
        if ts.semantics == MOORE:
            points = [(t, frozenset()) for t in range(ts.n) if name in ts.moore_label(t)]
            out_lits.append(compile_function(points, use_inputs=False))
        else:
            points = [(t, i) for t in range(ts.n) for i in vals if name in ts.label[(t, i)]]
            out_lits.append(compile_function(points, use_inputs=True))

    next_lits = []
    for j in range(state_bits):
        points = [(t, i) for t in range(ts.n) for i in vals if ts.trans[(t, i)] >> j & 1]
        next_lits.append(compile_function(points, use_inputs=True))

    max_var = builder.next_var - 1
    lines = [
        f"aag {max_var} {n_in} {state_bits} {len(ts.outputs)} {len(builder.gates)}"
    ]
    for name in ts.inputs:
        lines.append(str(in_lit[name]))
    for j in range(state_bits):
        lines.append(f"{latch_lit[j]} {next_lits[j]}")
    for lit in out_lits:
        lines.append(str(lit))
    for lhs, a, b in builder.gates:
        lines.append(f"{lhs} {a} {b}")
    for j, name in enumerate(ts.inputs):
        lines.append(f"i{j} {name}")
    for j in range(state_bits):
        lines.append(f"l{j} state_bit_{j}")
    for j, name in enumerate(ts.outputs):
        lines.append(f"o{j} {name}")
    lines.append("c")
    lines.append(f"{ts.semantics} system, {ts.n} states")
    return "\n".join(lines) + "\n"
