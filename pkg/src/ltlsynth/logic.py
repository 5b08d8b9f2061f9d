"""Propositional formula DAG, CNF conversion, and solver file formats.

Formulas live in a Store: an append-only arena of hash-consed nodes
addressed by integer ids.  Children always precede parents, constants are
folded at construction time, and syntactically equal builds return the
same node id.  Variables are numbered densely from 1 in allocation order,
which doubles as the DIMACS numbering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

FALSE = 0
TRUE = 1

# node tags
_CONST = "c"
_VAR = "v"
_NOT = "n"
_AND = "a"
_OR = "o"
_XOR = "x"
_ITE = "i"


class Store:
    """Arena of hash-consed formula nodes plus the variable table."""

    def __init__(self):
        self.nodes: list[tuple] = [(_CONST, False), (_CONST, True)]
        self._intern: dict[tuple, int] = {self.nodes[0]: FALSE, self.nodes[1]: TRUE}
        self.var_name: list[str] = [""]  # 1-indexed
        self.var_node: list[int] = [-1]

    # -- construction -------------------------------------------------

    def _mk(self, node: tuple) -> int:
        found = self._intern.get(node)
        if found is not None:
            return found
        self.nodes.append(node)
        nid = len(self.nodes) - 1
        self._intern[node] = nid
        return nid

    def new_var(self, name: str) -> int:
        """Allocate a fresh variable; returns its 1-based number."""
        self.var_name.append(name)
        vid = len(self.var_name) - 1
        self.var_node.append(self._mk((_VAR, vid)))
        return vid

    @property
    def num_vars(self) -> int:
        return len(self.var_name) - 1

    def var(self, vid: int) -> int:
        """Node id for variable number vid."""
        return self.var_node[vid]

    def const(self, value: bool) -> int:
        return TRUE if value else FALSE

    def not_(self, f: int) -> int:
        if f == TRUE:
            return FALSE
        if f == FALSE:
            return TRUE
        node = self.nodes[f]
        if node[0] == _NOT:
            return node[1]
        return self._mk((_NOT, f))

    def _gate(self, tag: str, children) -> int:
        absorbing = FALSE if tag == _AND else TRUE
        neutral = TRUE if tag == _AND else FALSE
        seen: set[int] = set()
        kept: list[int] = []
        for c in children:
            if c == absorbing:
                return absorbing
            if c == neutral or c in seen:
                continue
            if self.not_(c) in seen:
                return absorbing
            seen.add(c)
            kept.append(c)
        if not kept:
            return neutral
        if len(kept) == 1:
            return kept[0]
        return self._mk((tag, tuple(kept)))

    def and_(self, children) -> int:
        return self._gate(_AND, children)

    def or_(self, children) -> int:
        return self._gate(_OR, children)

    def xor2(self, a: int, b: int) -> int:
        if a == FALSE:
            return b
        if b == FALSE:
            return a
        if a == TRUE:
            return self.not_(b)
        if b == TRUE:
            return self.not_(a)
        if a == b:
            return FALSE
        if a == self.not_(b):
            return TRUE
        if a > b:
            a, b = b, a
        return self._mk((_XOR, a, b))

    def ite(self, c: int, t: int, e: int) -> int:
        if c == TRUE:
            return t
        if c == FALSE:
            return e
        if t == e:
            return t
        if t == TRUE:
            return self.or_([c, e])
        if t == FALSE:
            return self.and_([self.not_(c), e])
        if e == TRUE:
            return self.or_([self.not_(c), t])
        if e == FALSE:
            return self.and_([c, t])
        return self._mk((_ITE, c, t, e))

    def implies(self, a: int, b: int) -> int:
        return self.or_([self.not_(a), b])

    def iff(self, a: int, b: int) -> int:
        return self.not_(self.xor2(a, b))

    # -- queries ------------------------------------------------------

    def evaluate(self, root: int, assignment: dict[int, bool]) -> bool:
        """Evaluate under a total assignment of the variables in root's cone."""
        memo: dict[int, bool] = {}

        def go(n: int) -> bool:
            v = memo.get(n)
            if v is not None:
                return v
            node = self.nodes[n]
            tag = node[0]
            if tag == _CONST:
                v = node[1]
            elif tag == _VAR:
                v = assignment[node[1]]
            elif tag == _NOT:
                v = not go(node[1])
            elif tag == _AND:
                v = all(go(c) for c in node[1])
            elif tag == _OR:
                v = any(go(c) for c in node[1])
            elif tag == _XOR:
                v = go(node[1]) != go(node[2])
            else:
                v = go(node[2]) if go(node[1]) else go(node[3])
            memo[n] = v
            return v

        return go(root)

    def substitute(self, root: int, mapping: dict[int, int]) -> int:
        """Rebuild root with variables replaced per mapping (var id -> node id).

        Unmapped variables stay themselves.  Constant folding happens on the
        way up, with early exits through and/or gates.
        """
        memo: dict[int, int] = {}

        def go(n: int) -> int:
            r = memo.get(n)
            if r is not None:
                return r
            node = self.nodes[n]
            tag = node[0]
            if tag == _CONST:
                r = n
            elif tag == _VAR:
                r = mapping.get(node[1], n)
            elif tag == _NOT:
                r = self.not_(go(node[1]))
            elif tag == _AND:
                parts = []
                r = None
                for c in node[1]:
                    m = go(c)
                    if m == FALSE:
                        r = FALSE
                        break
                    parts.append(m)
                if r is None:
                    r = self.and_(parts)
            elif tag == _OR:
                parts = []
                r = None
                for c in node[1]:
                    m = go(c)
                    if m == TRUE:
                        r = TRUE
                        break
                    parts.append(m)
                if r is None:
                    r = self.or_(parts)
            elif tag == _XOR:
                r = self.xor2(go(node[1]), go(node[2]))
            else:
                c = go(node[1])
                if c == TRUE:
                    r = go(node[2])
                elif c == FALSE:
                    r = go(node[3])
                else:
                    r = self.ite(c, go(node[2]), go(node[3]))
            memo[n] = r
            return r

        return go(root)

    def reachable(self, root: int) -> list[int]:
        """All node ids in root's cone, each once, children before parents."""
        seen: set[int] = set()
        order: list[int] = []
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            n, done = stack.pop()
            if done:
                order.append(n)
                continue
            if n in seen:
                continue
            seen.add(n)
            stack.append((n, True))
            node = self.nodes[n]
            tag = node[0]
            if tag == _NOT:
                stack.append((node[1], False))
            elif tag in (_AND, _OR):
                for c in node[1]:
                    stack.append((c, False))
            elif tag == _XOR:
                stack.append((node[1], False))
                stack.append((node[2], False))
            elif tag == _ITE:
                stack.append((node[1], False))
                stack.append((node[2], False))
                stack.append((node[3], False))
        return order

    def variables_in(self, root: int) -> set[int]:
        return {
            self.nodes[n][1]
            for n in self.reachable(root)
            if self.nodes[n][0] == _VAR
        }


# ---------------------------------------------------------------------------
# Bit vectors


@dataclass(frozen=True)
class BitVec:
    """Little-endian vector of formula nodes."""

    bits: tuple[int, ...]

    @property
    def width(self) -> int:
        return len(self.bits)


def bv_const(store: Store, value: int, width: int) -> BitVec:
    return BitVec(tuple(store.const(bool(value >> j & 1)) for j in range(width)))


def bv_vars(store: Store, prefix: str, width: int) -> tuple[BitVec, list[int]]:
    """Allocate width fresh variables; returns the vector and the var numbers."""
    ids = [store.new_var(f"{prefix}{j}") for j in range(width)]
    return BitVec(tuple(store.var(v) for v in ids)), ids


def bv_greater(store: Store, x: BitVec, y: BitVec, strict: bool) -> int:
    """Ripple comparator: x > y when strict, else x >= y.  Linear size."""
    if x.width != y.width:
        raise ValueError(f"width mismatch: {x.width} vs {y.width}")
    acc = store.const(not strict)
    for xb, yb in zip(x.bits, y.bits):  # LSB towards MSB
        win = store.and_([xb, store.not_(yb)])
        eq = store.not_(store.xor2(xb, yb))
        acc = store.or_([win, store.and_([eq, acc])])
    return acc


def bv_equal(store: Store, x: BitVec, y: BitVec) -> int:
    if x.width != y.width:
        raise ValueError(f"width mismatch: {x.width} vs {y.width}")
    return store.and_([store.not_(store.xor2(a, b)) for a, b in zip(x.bits, y.bits)])


def bv_less_const(store: Store, x: BitVec, bound: int) -> int:
    """Formula for x < bound (bound >= 1)."""
    if bound >= 1 << x.width:
        return TRUE
    return store.not_(bv_greater(store, x, bv_const(store, bound - 1, x.width), True))


# ---------------------------------------------------------------------------
# Quantified problems


@dataclass
class QuantifiedProblem:
    """A matrix plus quantifier prefix; deps present means DQBF."""

    store: Store
    matrix: int
    prefix: list[tuple[str, list[int]]]  # ('e'|'a', var numbers)
    deps: dict[int, frozenset[int]] | None = None

    def __post_init__(self):
        bound: set[int] = set()
        for quant, vs in self.prefix:
            if quant not in ("e", "a"):
                raise ValueError(f"bad quantifier {quant!r}")
            for v in vs:
                if v in bound:
                    raise ValueError(f"variable {v} bound twice")
                bound.add(v)
        free = self.store.variables_in(self.matrix) - bound
        if free:
            raise ValueError(f"unbound matrix variables: {sorted(free)}")
        if self.deps is not None:
            universals = self.universals()
            for v, ds in self.deps.items():
                if not ds <= set(universals):
                    raise ValueError(f"dependency of {v} not universal: {sorted(ds)}")

    def universals(self) -> list[int]:
        return [v for quant, vs in self.prefix for v in vs if quant == "a"]

    def existentials(self) -> list[int]:
        return [v for quant, vs in self.prefix for v in vs if quant == "e"]

    def is_sat_fragment(self) -> bool:
        return self.deps is None and not self.universals()

    def is_qbf_fragment(self) -> bool:
        return self.deps is None

    def is_dqbf_fragment(self) -> bool:
        return self.deps is not None


# ---------------------------------------------------------------------------
# Tseitin conversion


def tseitin(store: Store, root: int) -> tuple[list[list[int]], dict[int, int], int]:
    """Equisatisfiable CNF with full biconditional definitions.

    Returns (clauses, node->literal map, total variable count).  Original
    variables keep their numbers; each internal and/or/xor/ite node gets a
    fresh definition variable above them.  Not nodes become negated
    literals.  A constant root yields the trivial or the empty clause.
    """
    if root == TRUE:
        return [], {root: 0}, store.num_vars
    if root == FALSE:
        return [[]], {root: 0}, store.num_vars

    lit: dict[int, int] = {}
    clauses: list[list[int]] = []
    next_var = store.num_vars

    for n in store.reachable(root):
        node = store.nodes[n]
        tag = node[0]
        if tag == _CONST:
            raise AssertionError("constants fold away below the root")
        if tag == _VAR:
            lit[n] = node[1]
            continue
        if tag == _NOT:
            lit[n] = -lit[node[1]]
            continue
        next_var += 1
        t = next_var
        lit[n] = t
        if tag == _AND:
            kids = [lit[c] for c in node[1]]
            for k in kids:
                clauses.append([-t, k])
            clauses.append([t] + [-k for k in kids])
        elif tag == _OR:
            kids = [lit[c] for c in node[1]]
            for k in kids:
                clauses.append([t, -k])
            clauses.append([-t] + kids)
        elif tag == _XOR:
            a, b = lit[node[1]], lit[node[2]]
            clauses.append([-t, a, b])
            clauses.append([-t, -a, -b])
            clauses.append([t, a, -b])
            clauses.append([t, -a, b])
        else:  # ite
            c, a, b = lit[node[1]], lit[node[2]], lit[node[3]]
            clauses.append([-t, -c, a])
            clauses.append([-t, c, b])
            clauses.append([t, -c, -a])
            clauses.append([t, c, -b])

    clauses.append([lit[root]])
    return clauses, lit, next_var


def _tseitin_var_deps(
    store: Store, root: int, lit: dict[int, int], var_deps: dict[int, frozenset[int]]
) -> dict[int, frozenset[int]]:
    """Dependency sets for Tseitin variables: union over the node's cone."""
    cone: dict[int, frozenset[int]] = {}
    out: dict[int, frozenset[int]] = {}
    for n in store.reachable(root):
        node = store.nodes[n]
        tag = node[0]
        if tag == _CONST:
            cone[n] = frozenset()
        elif tag == _VAR:
            cone[n] = var_deps.get(node[1], frozenset())
        elif tag == _NOT:
            cone[n] = cone[node[1]]
        elif tag in (_AND, _OR):
            acc: frozenset[int] = frozenset()
            for c in node[1]:
                acc |= cone[c]
            cone[n] = acc
        elif tag == _XOR:
            cone[n] = cone[node[1]] | cone[node[2]]
        else:
            cone[n] = cone[node[1]] | cone[node[2]] | cone[node[3]]
        if tag in (_AND, _OR, _XOR, _ITE):
            out[lit[n]] = cone[n]
    return out


# ---------------------------------------------------------------------------
# File formats


def _clause_lines(clauses: list[list[int]]) -> str:
    return "".join(" ".join(str(l) for l in c) + " 0\n" for c in clauses)


def emit_dimacs(problem: QuantifiedProblem) -> str:
    """Plain CNF text for purely existential problems."""
    if not problem.is_sat_fragment():
        raise ValueError("problem is not purely existential")
    clauses, _, num_vars = tseitin(problem.store, problem.matrix)
    return f"p cnf {num_vars} {len(clauses)}\n" + _clause_lines(clauses)


def emit_qdimacs(problem: QuantifiedProblem) -> str:
    """Prenex QBF text; Tseitin variables join the innermost existentials."""
    if not problem.is_qbf_fragment():
        raise ValueError("problem has dependency annotations; use emit_dqdimacs")
    clauses, _, num_vars = tseitin(problem.store, problem.matrix)

    blocks: list[tuple[str, list[int]]] = []
    for quant, vs in problem.prefix:
        if not vs:
            continue
        if blocks and blocks[-1][0] == quant:
            blocks[-1][1].extend(vs)
        else:
            blocks.append((quant, list(vs)))
    fresh = list(range(problem.store.num_vars + 1, num_vars + 1))
    if fresh:
        if blocks and blocks[-1][0] == "e":
            blocks[-1][1].extend(fresh)
        else:
            blocks.append(("e", fresh))

    out = [f"p cnf {num_vars} {len(clauses)}\n"]
    for quant, vs in blocks:
        out.append(f"{quant} " + " ".join(str(v) for v in vs) + " 0\n")
    out.append(_clause_lines(clauses))
    return "".join(out)


def emit_dqdimacs(problem: QuantifiedProblem) -> str:
    """QDIMACS extended with explicit `d` dependency lines per existential."""
    if not problem.is_dqbf_fragment():
        raise ValueError("problem has no dependency annotations; use emit_qdimacs")
    clauses, lit, num_vars = tseitin(problem.store, problem.matrix)

    universals = problem.universals()
    deps = dict(problem.deps)
    uni_deps = {u: frozenset([u]) for u in universals}
    extra = _tseitin_var_deps(problem.store, problem.matrix, lit, {**deps, **uni_deps})
    deps.update(extra)

    out = [f"p cnf {num_vars} {len(clauses)}\n"]
    if universals:
        out.append("a " + " ".join(str(v) for v in universals) + " 0\n")
    for v in sorted(deps):
        ds = " ".join(str(u) for u in sorted(deps[v]))
        out.append(f"d {v}{' ' + ds if ds else ''} 0\n")
    out.append(_clause_lines(clauses))
    return "".join(out)


@dataclass
class DimacsFile:
    """Parsed (Q/DQ)DIMACS content, able to re-render itself byte-exactly."""

    num_vars: int
    comments: list[str] = field(default_factory=list)
    blocks: list[tuple[str, list[int]]] = field(default_factory=list)
    dep_lines: list[tuple[int, list[int]]] = field(default_factory=list)
    clauses: list[list[int]] = field(default_factory=list)

    def render(self) -> str:
        out = [f"c {c}\n" for c in self.comments]
        out.append(f"p cnf {self.num_vars} {len(self.clauses)}\n")
        for quant, vs in self.blocks:
            out.append(f"{quant} " + " ".join(str(v) for v in vs) + " 0\n")
        for v, ds in self.dep_lines:
            body = " ".join(str(u) for u in ds)
            out.append(f"d {v}{' ' + body if body else ''} 0\n")
        out.append(_clause_lines(self.clauses))
        return "".join(out)


def read_dimacs(text: str) -> DimacsFile:
    """Parse DIMACS/QDIMACS/DQDIMACS text (comments before the header only)."""
    doc = DimacsFile(num_vars=0)
    lines = text.splitlines()
    idx = 0
    while idx < len(lines) and lines[idx].startswith("c"):
        doc.comments.append(lines[idx][2:] if lines[idx].startswith("c ") else lines[idx][1:])
        idx += 1
    if idx >= len(lines) or not lines[idx].startswith("p cnf "):
        raise ValueError("missing DIMACS header")
    parts = lines[idx].split()
    doc.num_vars = int(parts[2])
    declared_clauses = int(parts[3])
    idx += 1
    for line in lines[idx:]:
        if not line.strip():
            continue
        fields = line.split()
        if fields[-1] != "0":
            raise ValueError(f"line not 0-terminated: {line!r}")
        if fields[0] in ("a", "e"):
            doc.blocks.append((fields[0], [int(x) for x in fields[1:-1]]))
        elif fields[0] == "d":
            doc.dep_lines.append((int(fields[1]), [int(x) for x in fields[2:-1]]))
        else:
            doc.clauses.append([int(x) for x in fields[:-1]])
    if len(doc.clauses) != declared_clauses:
        raise ValueError(
            f"clause count mismatch: header says {declared_clauses}, found {len(doc.clauses)}"
        )
    return doc
