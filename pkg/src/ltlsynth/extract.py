"""Rebuild transition systems from solver models, per encoding."""

from __future__ import annotations

from .encode import BASIC, FULLY_SYMBOLIC, INPUT_SYMBOLIC, STATE_SYMBOLIC, VarDirectory
from .solve import Model
from .system import MOORE, TransitionSystem, input_valuations


class ExtractionError(RuntimeError):
    """Model inconsistent with the encoding contract; an encoder bug."""


def _build(d: VarDirectory, inputs, outputs, trans, label) -> TransitionSystem:
    return TransitionSystem(d.n, d.semantics, tuple(inputs), tuple(outputs), trans, label)


def extract_basic(model: Model, d: VarDirectory, inputs, outputs) -> TransitionSystem:
    """Least true successor per (state, input); labels straight off the model."""
    assert d.kind == BASIC
    vals = input_valuations(inputs)
    trans = {}
    label = {}
    values = model.assignment
    for t in range(d.n):
        for ii, i in enumerate(vals):
            successor = next(
                (t2 for t2 in range(d.n) if values.get(d.trans[(t, ii, t2)], False)),
                None,
            )
            if successor is None:
                raise ExtractionError(f"no successor chosen at state {t}, input {set(i)}")
            trans[(t, i)] = successor
            if d.semantics == MOORE:
                label[(t, i)] = frozenset(
                    name for name in outputs if values.get(d.out[(name, t)], False)
                )
            else:
                label[(t, i)] = frozenset(
                    name for name in outputs if values.get(d.out[(name, t, ii)], False)
                )
    return _build(d, inputs, outputs, trans, label)


def extract_input_symbolic(model: Model, d: VarDirectory, inputs, outputs) -> TransitionSystem:
    """Skolem tables over the inputs give transitions and Mealy labels."""
    assert d.kind == INPUT_SYMBOLIC
    vals = input_valuations(inputs)
    trans = {}
    label = {}
    for t in range(d.n):
        for i in vals:
            env = {v: (name in i) for name, v in d.univ_inputs.items()}
            successor = next(
                (t2 for t2 in range(d.n) if model.value_of(d.trans[(t, t2)], env)),
                None,
            )
            if successor is None:
                raise ExtractionError(f"no successor chosen at state {t}, input {set(i)}")
            trans[(t, i)] = successor
            label[(t, i)] = frozenset(
                name for name in outputs if model.value_of(d.out[(name, t)], env)
            )
    return _build(d, inputs, outputs, trans, label)


def extract_state_symbolic(model: Model, d: VarDirectory, inputs, outputs) -> TransitionSystem:
    """Assemble successor codes from the transition-bit Skolem tables.

    Also serves the fully symbolic encoding: automaton bits are universal
    there but never occur in the dependency sets of transitions or outputs.
    """
    assert d.kind in (STATE_SYMBOLIC, FULLY_SYMBOLIC)
    vals = input_valuations(inputs)
    bits = sorted(d.trans)
    trans = {}
    label = {}
    for t in range(d.n):
        for i in vals:
            env = {v: (name in i) for name, v in d.univ_inputs.items()}
            for j, v in enumerate(d.univ_state):
                env[v] = bool(t >> j & 1)
            code = 0
            for j in bits:
                if model.value_of(d.trans[j], env):
                    code |= 1 << j
            if code >= d.n:
                raise ExtractionError(f"successor code {code} out of range at state {t}")
            trans[(t, i)] = code
            label[(t, i)] = frozenset(
                name for name in outputs if model.value_of(d.out[name], env)
            )
    return _build(d, inputs, outputs, trans, label)


def extract(model: Model, d: VarDirectory, inputs, outputs) -> TransitionSystem:
    if d.kind == BASIC:
        return extract_basic(model, d, inputs, outputs)
    if d.kind == INPUT_SYMBOLIC:
        return extract_input_symbolic(model, d, inputs, outputs)
    return extract_state_symbolic(model, d, inputs, outputs)
