"""3SAT to largest-WCS reduction, with decoding and a small-formula decision procedure.

Vertex layout of the reduction graph for ``n`` variables and ``m`` clauses::

    2(i-1)      x_i        positive literal
    2(i-1) + 1  not x_i    negative literal
    2n + i - 1  y_i        triangle gadget
    3n + j      c_j        clause, joined to the negations of its literals
    3n + m      z          joined to every literal

A formula is satisfiable exactly when the graph has a WCS of size ``2n + m``
avoiding ``z``: each triangle then gives ``y_i`` plus one literal and every
clause vertex is taken. Sets through ``z`` can reach ``2n + m`` for
unsatisfiable one-variable formulas such as ``(x) ∧ (¬x)``, so
:func:`decide_sat` searches with ``z`` excluded. The counting also needs
each variable to occur in both polarities. :func:`pad_polarities`
enforces that with tautological clauses over one fresh variable ``d``:
``(x ∨ ¬x ∨ d)`` for every one-sided ``x``, then ``(d ∨ ¬d ∨ x)`` so that
``d`` is two-sided too.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass

from .errors import DecodeError, DimacsError
from .graph import Graph
from .search import SearchConfig, lwcs_dfs


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 3:
                raise DimacsError(f"clause {clause} does not have exactly 3 literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise DimacsError(f"literal {lit} outside 1..{self.variable_count}")

    @classmethod
    def from_clauses(cls, clauses, variable_count: int | None = None) -> CnfFormula:
        """Build from clauses of width 1..3, widening short ones by repeating a literal."""
        wide = []
        for clause in clauses:
            clause = tuple(clause)
            if not 1 <= len(clause) <= 3:
                raise DimacsError(f"clause {clause} cannot be widened to 3 literals")
            wide.append(clause + (clause[-1],) * (3 - len(clause)))
        if variable_count is None:
            variable_count = max((abs(lit) for c in wide for lit in c), default=0)
        return cls(variable_count, tuple(wide))

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment[abs(lit)] == (lit > 0) for lit in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.variable_count} {self.clause_count}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad problem line {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before the problem line")
        try:
            tokens = [int(t) for t in line.split()]
        except ValueError as exc:
            raise DimacsError(f"line {lineno}: {exc}") from exc
        for lit in tokens:
            if lit == 0:
                if len(current) != 3:
                    raise DimacsError(f"line {lineno}: clause width {len(current)}, expected 3")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(f"line {lineno}: variable {abs(lit)} out of range")
                current.append(lit)
    if header is None:
        raise DimacsError("missing problem line")
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsError(f"expected {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses))


def pad_polarities(f: CnfFormula) -> CnfFormula:
    """Add tautologies so every variable occurs both plain and negated."""
    seen = {lit for c in f.clauses for lit in c}
    lopsided = [v for v in range(1, f.variable_count + 1) if not (v in seen and -v in seen)]
    if not lopsided:
        return f
    d = f.variable_count + 1
    extra = [(v, -v, d) for v in lopsided] + [(d, -d, lopsided[0])]
    return CnfFormula(d, f.clauses + tuple(extra))


class RoleKind(enum.Enum):
    POS_LITERAL = "POS_LITERAL"
    NEG_LITERAL = "NEG_LITERAL"
    GADGET = "GADGET"
    CLAUSE = "CLAUSE"
    AUXILIARY = "AUXILIARY"


@dataclass(frozen=True)
class Role:
    kind: RoleKind
    index: int | None = None

    def __str__(self) -> str:
        return self.kind.value if self.index is None else f"{self.kind.value}({self.index})"


def literal_vertex(lit: int) -> int:
    return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)


@dataclass(frozen=True)
class ReductionGraph:
    formula: CnfFormula
    graph: Graph
    roles: tuple[Role, ...]

    @property
    def target_size(self) -> int:
        return 2 * self.formula.variable_count + self.formula.clause_count

    def gadget_vertex(self, i: int) -> int:
        return 2 * self.formula.variable_count + i - 1

    def clause_vertex(self, j: int) -> int:
        return 3 * self.formula.variable_count + j

    @property
    def auxiliary_vertex(self) -> int:
        return 3 * self.formula.variable_count + self.formula.clause_count

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out["roles"] = [str(r) for r in self.roles]
        return out


def reduce_to_lwcs(f: CnfFormula) -> ReductionGraph:
    n, m = f.variable_count, f.clause_count
    edges = []
    roles = []
    for i in range(1, n + 1):
        roles += [Role(RoleKind.POS_LITERAL, i), Role(RoleKind.NEG_LITERAL, i)]
    roles += [Role(RoleKind.GADGET, i) for i in range(1, n + 1)]
    roles += [Role(RoleKind.CLAUSE, j) for j in range(1, m + 1)]
    roles.append(Role(RoleKind.AUXILIARY))
    z = 3 * n + m
    for i in range(1, n + 1):
        pos, neg, gadget = literal_vertex(i), literal_vertex(-i), 2 * n + i - 1
        edges += [(pos, neg), (pos, gadget), (neg, gadget), (z, pos), (z, neg)]
    for j, clause in enumerate(f.clauses):
        # repeated literals collapse into one simple edge
        edges += [(3 * n + j, literal_vertex(-lit)) for lit in set(clause)]
    return ReductionGraph(f, Graph(3 * n + m + 1, edges), tuple(roles))


def decode_assignment(r: ReductionGraph, members) -> dict[int, bool] | None:
    """Truth assignment read off the literal vertices of a WCS of size 2n + m."""
    members = frozenset(members)
    if len(members) != r.target_size:
        return None
    assignment = {}
    for i in range(1, r.formula.variable_count + 1):
        pos, neg = literal_vertex(i) in members, literal_vertex(-i) in members
        if pos == neg:
            raise DecodeError(f"variable {i}: {'both' if pos else 'neither'} literals selected")
        assignment[i] = pos
    if not r.formula.satisfied_by(assignment):
        raise DecodeError("decoded assignment does not satisfy the formula")
    return assignment


def truth_table_sat(f: CnfFormula) -> dict[int, bool] | None:
    """First satisfying assignment in 2^n order, or None."""
    for bits in itertools.product((False, True), repeat=f.variable_count):
        assignment = dict(enumerate(bits, 1))
        if f.satisfied_by(assignment):
            return assignment
    return None


class Verdict(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class Decision:
    verdict: Verdict
    assignment: dict[int, bool] | None
    reduction: ReductionGraph
    lwcs_size: int
    proven_optimal: bool


def decide_sat(f: CnfFormula, deadline: float = 60.0) -> Decision:
    """Decide a small formula by exact LWCS search on its reduction."""
    padded = pad_polarities(f)
    r = reduce_to_lwcs(padded)
    result = lwcs_dfs(r.graph, SearchConfig(deadline=deadline, tie_break_per=False),
                      forbidden={r.auxiliary_vertex})
    size = len(result.best)
    if size >= r.target_size:
        assignment = decode_assignment(r, result.best.members)
        if assignment is None:
            raise DecodeError(f"reduction has a WCS of size {size} > {r.target_size}")
        original = {v: assignment[v] for v in range(1, f.variable_count + 1)}
        return Decision(Verdict.SAT, original, r, size, result.proven_optimal)
    verdict = Verdict.UNSAT if result.proven_optimal else Verdict.UNKNOWN
    return Decision(verdict, None, r, size, result.proven_optimal)


def dump_reduction(r: ReductionGraph) -> str:
    return json.dumps(r.to_json())
