"""Decision procedures: CDCL SAT, QBF/DQBF by universal expansion, externals.

The SAT core is a conflict-driven solver with two watched literals per
clause, first-UIP learning, VSIDS-style activities with phase saving, and
Luby restarts.  Quantified problems are decided by full universal
expansion: every existential is copied once per assignment of exactly its
dependency set, the universals are substituted through the matrix, and the
conjunction over all universal assignments goes to the SAT core.  Skolem
tables fall out of the copies directly.
"""

from __future__ import annotations

import heapq
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from itertools import product

from .logic import (
    FALSE,
    TRUE,
    QuantifiedProblem,
    emit_dimacs,
    emit_dqdimacs,
    emit_qdimacs,
    tseitin,
)

DEFAULT_EXPANSION_CAP = 1 << 22


class ExpansionLimitError(RuntimeError):
    """Universal expansion would exceed the configured size cap."""


@dataclass
class SkolemTable:
    """Boolean function table for one existential over its dependency set."""

    deps: tuple[int, ...]  # universal var numbers, ascending
    table: dict[tuple[bool, ...], bool]


@dataclass
class Model:
    assignment: dict[int, bool]
    skolem: dict[int, SkolemTable] = field(default_factory=dict)

    def value_of(self, var: int, univ_assignment: dict[int, bool] | None = None) -> bool:
        """Value of an existential; dependent ones need the universal context."""
        entry = self.skolem.get(var)
        if entry is None:
            return self.assignment.get(var, False)
        key = tuple(bool(univ_assignment[d]) for d in entry.deps)
        return entry.table.get(key, False)


@dataclass
class SolveResult:
    status: str  # 'sat' | 'unsat' | 'unknown'
    model: Model | None = None
    detail: str = ""


# ---------------------------------------------------------------------------
# CDCL


def sat_solve(clauses, num_vars: int | None = None, max_conflicts: int | None = None) -> SolveResult:
    """Complete CDCL decision; the returned model covers every variable."""
    nv = num_vars or max((abs(l) for c in clauses for l in c), default=0)

    # encoded literals: 2v for v, 2v+1 for -v
    def enc(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    value = bytearray(nv + 1)  # 0 unknown, 1 true, 2 false
    level = [0] * (nv + 1)
    reason = [-1] * (nv + 1)
    trail: list[int] = []
    trail_lim: list[int] = []
    qhead = 0
    db: list[list[int]] = []
    watches: list[list[int]] = [[] for _ in range(2 * nv + 2)]
    activity = [0.0] * (nv + 1)
    var_inc = 1.0
    heap = [(0.0, v) for v in range(1, nv + 1)]
    saved_phase = bytearray(nv + 1)  # 0 -> decide false first

    def lit_state(el: int) -> int:
        """1 satisfied, -1 falsified, 0 unknown."""
        v = value[el >> 1]
        if v == 0:
            return 0
        truth = v == 1
        if el & 1:
            truth = not truth
        return 1 if truth else -1

    def assign(el: int, why: int):
        nonlocal qhead
        var = el >> 1
        value[var] = 2 if el & 1 else 1
        level[var] = len(trail_lim)
        reason[var] = why
        trail.append(el)

    # load clauses
    units: list[int] = []
    for raw in clauses:
        cls = sorted({enc(l) for l in raw})
        if any((el ^ 1) in cls for el in cls):
            continue  # tautology
        if not cls:
            return SolveResult("unsat")
        if len(cls) == 1:
            units.append(cls[0])
            continue
        db.append(cls)
        watches[cls[0]].append(len(db) - 1)
        watches[cls[1]].append(len(db) - 1)
    for el in units:
        st = lit_state(el)
        if st == -1:
            return SolveResult("unsat")
        if st == 0:
            assign(el, -1)

    def propagate() -> int:
        nonlocal qhead
        while qhead < len(trail):
            el = trail[qhead]
            qhead += 1
            fl = el ^ 1
            ws = watches[fl]
            kept: list[int] = []
            k = 0
            total = len(ws)
            while k < total:
                ci = ws[k]
                k += 1
                cls = db[ci]
                if cls[0] == fl:
                    cls[0] = cls[1]
                    cls[1] = fl
                first = cls[0]
                fs = lit_state(first)
                if fs == 1:
                    kept.append(ci)
                    continue
                moved = False
                for j in range(2, len(cls)):
                    if lit_state(cls[j]) != -1:
                        cls[1] = cls[j]
                        cls[j] = fl
                        watches[cls[1]].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if fs == -1:
                    kept.extend(ws[k:])
                    watches[fl] = kept
                    return ci
                assign(first, ci)
            watches[fl] = kept
        return -1

    def bump(var: int):
        nonlocal var_inc
        activity[var] += var_inc
        if activity[var] > 1e100:
            for v in range(1, nv + 1):
                activity[v] *= 1e-100
            var_inc *= 1e-100
        heapq.heappush(heap, (-activity[var], var))

    def analyze(confl: int) -> tuple[list[int], int]:
        learnt: list[int] = []
        seen = bytearray(nv + 1)
        counter = 0
        idx = len(trail) - 1
        cur = len(trail_lim)
        p = -1
        ci = confl
        while True:
            cls = db[ci]
            for q in (cls if p == -1 else cls[1:]):
                var = q >> 1
                if not seen[var] and level[var] > 0:
                    seen[var] = 1
                    bump(var)
                    if level[var] == cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            var = p >> 1
            idx -= 1
            seen[var] = 0
            counter -= 1
            if counter == 0:
                break
            ci = reason[var]
        learnt.insert(0, p ^ 1)
        if len(learnt) == 1:
            return learnt, 0
        # watch the highest remaining level; backjump there
        best = max(range(1, len(learnt)), key=lambda j: level[learnt[j] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def cancel_until(target: int):
        nonlocal qhead
        if len(trail_lim) <= target:
            return
        limit = trail_lim[target]
        for el in reversed(trail[limit:]):
            var = el >> 1
            saved_phase[var] = 0 if el & 1 else 1
            value[var] = 0
            heapq.heappush(heap, (-activity[var], var))
        del trail[limit:]
        del trail_lim[target:]
        qhead = len(trail)

    def luby(i: int) -> int:
        """i-th element (1-based) of the Luby restart sequence."""
        x = i - 1
        size, seq = 1, 0
        while size < x + 1:
            seq += 1
            size = 2 * size + 1
        while size - 1 != x:
            size = (size - 1) >> 1
            seq -= 1
            x %= size
        return 1 << seq

    conflicts = 0
    restart_count = 0
    restart_budget = 128 * luby(1)

    while True:
        confl = propagate()
        if confl >= 0:
            conflicts += 1
            if max_conflicts is not None and conflicts > max_conflicts:
                return SolveResult("unknown", detail="conflict budget exhausted")
            if not trail_lim:
                return SolveResult("unsat")
            learnt, back = analyze(confl)
            cancel_until(back)
            if len(learnt) == 1:
                assign(learnt[0], -1)
            else:
                db.append(learnt)
                watches[learnt[0]].append(len(db) - 1)
                watches[learnt[1]].append(len(db) - 1)
                assign(learnt[0], len(db) - 1)
            var_inc /= 0.95
            restart_budget -= 1
            if restart_budget <= 0:
                restart_count += 1
                restart_budget = 128 * luby(restart_count + 1)
                cancel_until(0)
            continue
        if len(trail) == nv:
            model = {v: value[v] == 1 for v in range(1, nv + 1)}
            if __debug__:
                ok = all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses if c)
                assert ok, "SAT model fails a clause"
            return SolveResult("sat", Model(model))
        while True:
            _, var = heapq.heappop(heap)
            if value[var] == 0:
                break
        trail_lim.append(len(trail))
        assign(2 * var + (0 if saved_phase[var] else 1), -1)


# ---------------------------------------------------------------------------
# Universal expansion


def _dependency_map(problem: QuantifiedProblem) -> dict[int, tuple[int, ...]]:
    if problem.deps is not None:
        return {e: tuple(sorted(ds)) for e, ds in problem.deps.items()}
    deps: dict[int, tuple[int, ...]] = {}
    scope: list[int] = []
    for quant, vs in problem.prefix:
        if quant == "a":
            scope.extend(vs)
        else:
            frozen = tuple(sorted(scope))
            for e in vs:
                deps[e] = frozen
    return deps


def _expand_and_solve(problem: QuantifiedProblem, cap: int) -> SolveResult:
    store = problem.store
    universals = problem.universals()
    dep_map = _dependency_map(problem)
    inner = [e for e, ds in dep_map.items() if ds]
    load = (1 << len(universals)) * max(1, len(inner))
    if load > cap:
        raise ExpansionLimitError(
            f"expansion needs {load} copies, cap is {cap}"
        )

    upos = {u: j for j, u in enumerate(universals)}
    dep_positions = {e: [upos[u] for u in ds] for e, ds in dep_map.items()}

    copy_var: dict[tuple[int, tuple[bool, ...]], int] = {}

    def copy_of(e: int, key: tuple[bool, ...]) -> int:
        if not key:
            return e
        found = copy_var.get((e, key))
        if found is None:
            found = store.new_var(f"{store.var_name[e]}@{''.join('1' if b else '0' for b in key)}")
            copy_var[(e, key)] = found
        return found

    conjuncts: list[int] = []
    for bits in product((False, True), repeat=len(universals)):
        mapping = {u: (TRUE if bits[j] else FALSE) for u, j in upos.items()}
        for e, positions in dep_positions.items():
            key = tuple(bits[p] for p in positions)
            mapping[e] = store.var(copy_of(e, key))
        conjuncts.append(store.substitute(problem.matrix, mapping))
    big = store.and_(conjuncts)

    if big == TRUE:
        # unconstrained: any Skolem choice works
        result = SolveResult("sat", Model({}))
        _fill_tables(result.model, dep_map, copy_var, {})
        return result
    if big == FALSE:
        return SolveResult("unsat")

    clauses, _, num_vars = tseitin(store, big)
    outcome = sat_solve(clauses, num_vars)
    if outcome.status != "sat":
        return outcome
    values = outcome.model.assignment
    model = Model({e: values.get(e, False) for e in dep_map if not dep_map[e]})
    _fill_tables(model, dep_map, copy_var, values)
    return SolveResult("sat", model)


def _fill_tables(model: Model, dep_map, copy_var, values: dict[int, bool]):
    for e, ds in dep_map.items():
        if not ds:
            continue
        table: dict[tuple[bool, ...], bool] = {}
        for bits in product((False, True), repeat=len(ds)):
            cv = copy_var.get((e, bits))
            table[bits] = values.get(cv, False) if cv is not None else False
        model.skolem[e] = SkolemTable(tuple(ds), table)


def qbf_solve_expand(problem: QuantifiedProblem, cap: int = DEFAULT_EXPANSION_CAP) -> SolveResult:
    """Decide a prenex QBF by expanding every universal block."""
    if not problem.is_qbf_fragment():
        raise ValueError("problem carries dependency annotations; use dqbf_solve_expand")
    return _expand_and_solve(problem, cap)


def dqbf_solve_expand(problem: QuantifiedProblem, cap: int = DEFAULT_EXPANSION_CAP) -> SolveResult:
    """Decide a DQBF; copies are shared across non-dependencies."""
    if not problem.is_dqbf_fragment():
        raise ValueError("problem has no dependency annotations; use qbf_solve_expand")
    return _expand_and_solve(problem, cap)


def solve_internal(problem: QuantifiedProblem, cap: int = DEFAULT_EXPANSION_CAP) -> SolveResult:
    """Dispatch on the problem fragment."""
    if problem.is_dqbf_fragment():
        return dqbf_solve_expand(problem, cap)
    if problem.is_sat_fragment():
        clauses, _, num_vars = tseitin(problem.store, problem.matrix)
        if problem.matrix == TRUE:
            return SolveResult("sat", Model({v: False for v in problem.existentials()}))
        outcome = sat_solve(clauses, num_vars)
        if outcome.status != "sat":
            return outcome
        values = outcome.model.assignment
        return SolveResult(
            "sat", Model({e: values.get(e, False) for e in problem.existentials()})
        )
    return qbf_solve_expand(problem, cap)


# ---------------------------------------------------------------------------
# External solver bridge


def external_solve(problem: QuantifiedProblem, cmd: str) -> SolveResult:
    """Emit the matching format, spawn cmd, read the SAT-competition verdict.

    cmd must contain the placeholder {file}; exit code 10 means SAT and 20
    means UNSAT, and a `v` line model is parsed when present.  Only the
    verdict is available from solvers that do not print models.
    """
    if "{file}" not in cmd:
        raise ValueError("solver command must contain the {file} placeholder")
    if problem.is_dqbf_fragment():
        text, suffix = emit_dqdimacs(problem), ".dqdimacs"
    elif problem.is_sat_fragment():
        text, suffix = emit_dimacs(problem), ".cnf"
    else:
        text, suffix = emit_qdimacs(problem), ".qdimacs"

    fd, path = tempfile.mkstemp(suffix=suffix, prefix="ltlsynth_")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        argv = shlex.split(cmd.replace("{file}", path))
        try:
            proc = subprocess.run(argv, capture_output=True, text=True)
        except OSError as exc:
            return SolveResult("unknown", detail=f"spawn failed: {exc}")
        if proc.returncode == 20:
            return SolveResult("unsat")
        if proc.returncode != 10:
            return SolveResult(
                "unknown",
                detail=f"exit code {proc.returncode}; stderr: {proc.stderr.strip()}",
            )
        assignment: dict[int, bool] = {}
        for line in proc.stdout.splitlines():
            if not line.startswith("v"):
                continue
            for token in line[1:].split():
                lit = int(token)
                if lit != 0:
                    assignment[abs(lit)] = lit > 0
        return SolveResult("sat", Model(assignment))
    finally:
        os.unlink(path)
