"""Command-line entry point: spec ingestion, bound search, result emission.

Realizability searches the system side and (unless disabled) the
environment side in fair alternation, one bound step per side per round.
The environment plays the negated specification with inputs and outputs
swapped and the semantics dualized, so a win on either side settles the
verdict.  Exit codes: 10 realizable, 20 unrealizable, 0 emit-only success
or undetermined, 1 usage/input errors, 2 resource exhaustion.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from .automaton import (
    Ucw,
    analyze_sccs,
    encode_symbolic,
    full_counters,
    ltl_to_ucw,
    ucw_to_dot,
)
from .encode import (
    BASIC,
    FULLY_SYMBOLIC,
    INPUT_SYMBOLIC,
    STATE_SYMBOLIC,
    VarDirectory,
    encode_basic,
    encode_fully_symbolic,
    encode_input_symbolic,
    encode_state_symbolic,
)
from .extract import extract
from .ltl import SynthSpec, load_spec_file, negate
from .logic import QuantifiedProblem, emit_dimacs, emit_dqdimacs, emit_qdimacs
from .solve import (
    DEFAULT_EXPANSION_CAP,
    ExpansionLimitError,
    SolveResult,
    external_solve,
    solve_internal,
)
from .system import MEALY, MOORE, TransitionSystem, to_aiger, to_dot
from .verify import model_check

ENCODING_NAMES = (BASIC, INPUT_SYMBOLIC, STATE_SYMBOLIC, FULLY_SYMBOLIC)


@dataclass
class RunConfig:
    encoding: str = INPUT_SYMBOLIC
    mode: str = "realizability"  # 'realizability' | 'synthesis' | 'emit-only'
    semantics: str | None = None
    search: str = "exponential"  # 'exponential' | 'linear'
    max_bound: int = 8
    minimize: bool = False
    solver_cmd: str | None = None
    scc_reduction: bool = True
    counter_strategy: str = "auto"  # 'auto' | 'off'
    emit: str | None = None  # 'dimacs' | 'qdimacs' | 'dqdimacs'
    output: str | None = None
    fmt: str = "aag"  # 'aag' | 'dot'
    expansion_cap: int = DEFAULT_EXPANSION_CAP
    dump_ucw: str | None = None

    def validate(self):
        if self.encoding not in ENCODING_NAMES:
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.mode not in ("realizability", "synthesis", "emit-only"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_bound < 1:
            raise ValueError("max bound must be positive")
        if (
            self.mode == "synthesis"
            and self.solver_cmd is not None
            and self.encoding != BASIC
        ):
            raise ValueError(
                "synthesis with an external solver only works for the basic "
                "encoding; symbolic extraction needs the internal solvers"
            )


@dataclass
class SideProblem:
    """One player's bounded-synthesis instance family."""

    role: str  # 'system' | 'environment'
    automaton: Ucw
    semantics: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass
class SearchOutcome:
    status: str  # 'realizable' | 'unrealizable' | 'undetermined'
    bound: int | None = None
    system: TransitionSystem | None = None


def build_problem(
    side: SideProblem, n: int, cfg: RunConfig
) -> tuple[QuantifiedProblem, VarDirectory]:
    a = side.automaton
    scc = analyze_sccs(a, n) if cfg.scc_reduction else full_counters(a, n)
    if cfg.encoding == BASIC:
        return encode_basic(a, n, side.semantics, scc)
    if cfg.encoding == INPUT_SYMBOLIC:
        return encode_input_symbolic(a, n, side.semantics, scc)
    if cfg.encoding == STATE_SYMBOLIC:
        return encode_state_symbolic(a, n, side.semantics, scc)
    return encode_fully_symbolic(encode_symbolic(a), n, side.semantics, scc.counter_bits)


def _solve(problem: QuantifiedProblem, cfg: RunConfig) -> SolveResult:
    if cfg.solver_cmd is not None:
        return external_solve(problem, cfg.solver_cmd)
    return solve_internal(problem, cfg.expansion_cap)


def _attempt(
    side: SideProblem, n: int, cfg: RunConfig, want_system: bool
) -> TransitionSystem | bool | None:
    """None on unsat/unknown; the extracted system (or True) on sat."""
    problem, directory = build_problem(side, n, cfg)
    result = _solve(problem, cfg)
    if result.status != "sat":
        return None
    if not want_system:
        return True
    ts = extract(result.model, directory, side.inputs, side.outputs)
    counterexample = model_check(ts, side.automaton)
    if counterexample is not None:
        raise RuntimeError(
            f"extracted {side.role} system fails verification; encoder bug"
        )
    return ts


def make_sides(spec: SynthSpec, cfg: RunConfig) -> list[SideProblem]:
    semantics = cfg.semantics or spec.semantics
    formula = spec.formula()
    sides = [
        SideProblem(
            "system",
            ltl_to_ucw(formula, spec.inputs, spec.outputs),
            semantics,
            spec.inputs,
            spec.outputs,
        )
    ]
    if cfg.counter_strategy == "auto":
        dual_semantics = MEALY if semantics == MOORE else MOORE
        sides.append(
            SideProblem(
                "environment",
                ltl_to_ucw(negate(formula), spec.outputs, spec.inputs),
                dual_semantics,
                spec.outputs,
                spec.inputs,
            )
        )
    return sides


def _bounds(cfg: RunConfig) -> list[int]:
    if cfg.search == "linear":
        return list(range(1, cfg.max_bound + 1))
    out = []
    n = 1
    while n <= cfg.max_bound:
        out.append(n)
        n *= 2
    return out


def _minimized(side: SideProblem, found: int, cfg: RunConfig, want_system: bool):
    """Walk the bound down linearly while the instance stays satisfiable."""
    best_bound = found
    best = None
    for n in range(found - 1, 0, -1):
        won = _attempt(side, n, cfg, want_system)
        if won is None:
            break
        best_bound = n
        best = won
    return best_bound, best


def search_realizability(spec: SynthSpec, cfg: RunConfig) -> SearchOutcome:
    """Fair alternation over bounds between the system and the environment."""
    want_system = cfg.mode == "synthesis"
    sides = make_sides(spec, cfg)
    for n in _bounds(cfg):
        for side in sides:
            won = _attempt(side, n, cfg, want_system)
            if won is None:
                continue
            bound = n
            if cfg.minimize:
                bound, better = _minimized(side, n, cfg, want_system)
                if better is not None:
                    won = better
            status = "realizable" if side.role == "system" else "unrealizable"
            ts = won if isinstance(won, TransitionSystem) else None
            return SearchOutcome(status, bound, ts)
    return SearchOutcome("undetermined")


# ---------------------------------------------------------------------------
# CLI


def _arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlsynth",
        description="Bounded synthesis from LTL specifications via SAT/QBF/DQBF.",
    )
    parser.add_argument("spec", help="JSON specification file")
    parser.add_argument("--encoding", choices=ENCODING_NAMES, default=INPUT_SYMBOLIC)
    parser.add_argument(
        "--mode",
        choices=("realizability", "synthesis", "emit-only"),
        default="realizability",
    )
    parser.add_argument("--semantics", choices=(MEALY, MOORE), default=None,
                        help="override the semantics given in the spec file")
    parser.add_argument("--search", choices=("exponential", "linear"), default="exponential")
    parser.add_argument("--max-bound", type=int, default=8)
    parser.add_argument("--minimize", action="store_true",
                        help="shrink the bound linearly after the first success")
    parser.add_argument("--solver-cmd", default=None,
                        help="external solver command with a {file} placeholder")
    parser.add_argument("--no-scc-reduction", action="store_true",
                        help="keep rank counters for every automaton state")
    parser.add_argument("--counter-strategy", choices=("auto", "off"), default="auto")
    parser.add_argument("--emit", choices=("dimacs", "qdimacs", "dqdimacs"), default=None,
                        help="write the encoded constraint system and stop")
    parser.add_argument("--output", default=None, help="artifact or emission path")
    parser.add_argument("--format", dest="fmt", choices=("aag", "dot"), default="aag")
    parser.add_argument("--expansion-cap", type=int, default=DEFAULT_EXPANSION_CAP)
    parser.add_argument("--dump-ucw", default=None,
                        help="debug: write the specification automaton as dot")
    return parser


_EMITTERS = {"dimacs": emit_dimacs, "qdimacs": emit_qdimacs, "dqdimacs": emit_dqdimacs}


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def main(argv=None) -> int:
    try:
        args = _arg_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    cfg = RunConfig(
        encoding=args.encoding,
        mode="emit-only" if args.emit else args.mode,
        semantics=args.semantics,
        search=args.search,
        max_bound=args.max_bound,
        minimize=args.minimize,
        solver_cmd=args.solver_cmd,
        scc_reduction=not args.no_scc_reduction,
        counter_strategy=args.counter_strategy,
        emit=args.emit,
        output=args.output,
        fmt=args.fmt,
        expansion_cap=args.expansion_cap,
        dump_ucw=args.dump_ucw,
    )
    try:
        cfg.validate()
        spec = load_spec_file(args.spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    sides = make_sides(spec, cfg)
    if cfg.dump_ucw:
        _write(cfg.dump_ucw, ucw_to_dot(sides[0].automaton))

    if cfg.mode == "emit-only":
        problem, _ = build_problem(sides[0], cfg.max_bound, cfg)
        emitter = _EMITTERS[cfg.emit]
        try:
            text = emitter(problem)
        except ValueError as exc:
            print(f"error: {exc} (encoding {cfg.encoding!r})", file=sys.stderr)
            return 1
        _write(cfg.output, text)
        return 0

    try:
        outcome = search_realizability(spec, cfg)
    except ExpansionLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2

    if outcome.status == "realizable":
        print(f"REALIZABLE (bound {outcome.bound})")
        if cfg.mode == "synthesis" and outcome.system is not None:
            text = to_aiger(outcome.system) if cfg.fmt == "aag" else to_dot(outcome.system)
            _write(cfg.output, text)
        return 10
    if outcome.status == "unrealizable":
        print(f"UNREALIZABLE (environment bound {outcome.bound})")
        if cfg.mode == "synthesis" and outcome.system is not None:
            text = to_aiger(outcome.system) if cfg.fmt == "aag" else to_dot(outcome.system)
            _write(cfg.output, text)
        return 20
    print("UNKNOWN")
    return 0


def cli():
    raise SystemExit(main())
