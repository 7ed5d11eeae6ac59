"""3SAT and generalized-K-coloring instances, and the gadget reduction between them.

A generalized coloring instance carries a per-edge relation table R; an edge
e = (v1, v2) with v1 < v2 is satisfied by a coloring c when
R[e][c(v1)][c(v2)] is true.  Colors are 1-based values in [K].
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import CapExceededError, InputError

DEFAULT_COLORING_CAP = 10**8


@dataclass(frozen=True)
class SatInstance:
    """A 3SAT formula: clauses are triples of signed 1-based variable indices."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise InputError("num_vars must be positive")
        for clause in self.clauses:
            if len(clause) != 3:
                raise InputError(f"clause {clause} does not have 3 literals")
            seen = set()
            for lit in clause:
                var = abs(lit)
                if lit == 0 or var > self.num_vars:
                    raise InputError(f"literal {lit} out of range in {clause}")
                if var in seen:
                    raise InputError(f"clause {clause} repeats variable {var}")
                seen.add(var)


@dataclass(frozen=True)
class KcolInstance:
    """Graph + color count K + per-edge allowed-color-pair relation.

    Vertices are 0-based.  Each edge is stored as (v1, v2) with v1 < v2 and
    relations[e] is a frozenset of allowed (color_v1, color_v2) pairs with
    1-based colors.
    """

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    K: int
    relations: tuple[frozenset[tuple[int, int]], ...]

    def __post_init__(self):
        if self.num_vertices < 1:
            raise InputError("num_vertices must be positive")
        if self.K < 1:
            raise InputError("K must be positive")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.num_vertices):
                raise InputError(f"edge ({u}, {v}) not in sorted 0-based form")
            if (u, v) in seen:
                raise InputError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        if len(self.relations) != len(self.edges):
            raise InputError("need one relation table per edge")
        for rel in self.relations:
            for c1, c2 in rel:
                if not (1 <= c1 <= self.K and 1 <= c2 <= self.K):
                    raise InputError(f"relation entry ({c1}, {c2}) out of [K]")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_allows(self, edge_index: int, c1: int, c2: int) -> bool:
        """Whether colors (c1 on the lower endpoint, c2 on the higher) satisfy R."""
        return (c1, c2) in self.relations[edge_index]

    def to_json(self) -> str:
        allowed = [
            [e, c1, c2]
            for e, rel in enumerate(self.relations)
            for c1, c2 in sorted(rel)
        ]
        return json.dumps(
            {
                "n": self.num_vertices,
                "edges": [list(e) for e in self.edges],
                "K": self.K,
                "R": allowed,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "KcolInstance":
        try:
            data = json.loads(text)
            n = int(data["n"])
            edges = tuple(tuple(map(int, e)) for e in data["edges"])
            K = int(data["K"])
            raw = data["R"]
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"bad instance JSON: {exc}") from exc
        rels: list[set[tuple[int, int]]] = [set() for _ in edges]
        for e, c1, c2 in raw:
            if not (0 <= e < len(edges)):
                raise InputError(f"relation row references unknown edge {e}")
            rels[e].add((int(c1), int(c2)))
        return cls(n, edges, K, tuple(frozenset(r) for r in rels))


Coloring = dict[int, int]  # vertex -> color in [K], total on [n]


def inequality_instance(num_vertices: int, edges, K: int) -> KcolInstance:
    """Proper-coloring instance: each edge allows any pair of distinct colors."""
    edges = tuple(tuple(sorted(e)) for e in edges)
    rel = frozenset(
        (c1, c2) for c1 in range(1, K + 1) for c2 in range(1, K + 1) if c1 != c2
    )
    return KcolInstance(num_vertices, edges, K, tuple(rel for _ in edges))


def _clause_assignments() -> list[tuple[int, int, int]]:
    # The 7 satisfying literal-value triples, lexicographic with False < True.
    return [t for t in itertools.product((0, 1), repeat=3) if any(t)]


def reduce_3sat_to_kcol(sat: SatInstance) -> KcolInstance:
    """Gadget reduction to generalized 7-coloring.

    Vertices 0..num_vars-1 are the variables; vertex num_vars + j is clause j.
    One edge per (clause, member variable) pair.  A clause vertex's color in
    [7] picks one of its 7 satisfying literal-value triples (lexicographic
    order); a variable vertex's color encodes a truth value (1 = false,
    2 = true), and colors 3..7 satisfy no incident edge.  The edge relation
    accepts iff the chosen local assignment gives the variable the encoded
    value.
    """
    n_vars = sat.num_vars
    assignments = _clause_assignments()
    edges: list[tuple[int, int]] = []
    rels: list[frozenset[tuple[int, int]]] = []
    for j, clause in enumerate(sat.clauses):
        clause_vertex = n_vars + j
        for pos, lit in enumerate(clause):
            var_vertex = abs(lit) - 1
            # Variable vertices come first, so var_vertex < clause_vertex.
            edges.append((var_vertex, clause_vertex))
            allowed = set()
            for color_c, triple in enumerate(assignments, start=1):
                # literal value -> variable value, accounting for negation
                var_value = triple[pos] if lit > 0 else 1 - triple[pos]
                allowed.add((var_value + 1, color_c))
            rels.append(frozenset(allowed))
    return KcolInstance(n_vars + len(sat.clauses), tuple(edges), 7, tuple(rels))


def coloring_from_assignment(sat: SatInstance, assignment: dict[int, bool]) -> Coloring:
    """The coloring induced on reduce_3sat_to_kcol(sat) by a satisfying assignment."""
    assignments = _clause_assignments()
    coloring: Coloring = {}
    for var in range(1, sat.num_vars + 1):
        coloring[var - 1] = 2 if assignment[var] else 1
    for j, clause in enumerate(sat.clauses):
        triple = tuple(
            int(assignment[abs(lit)] == (lit > 0)) for lit in clause
        )
        coloring[sat.num_vars + j] = assignments.index(triple) + 1
    return coloring


def count_violated_edges(inst: KcolInstance, coloring: Coloring) -> int:
    """Number of edges whose endpoint colors are not in the edge's relation."""
    for v in range(inst.num_vertices):
        if v not in coloring:
            raise InputError(f"coloring not total: vertex {v} missing")
    return sum(
        0 if inst.edge_allows(e, coloring[u], coloring[v]) else 1
        for e, (u, v) in enumerate(inst.edges)
    )


def is_colorable(
    inst: KcolInstance, cap: int = DEFAULT_COLORING_CAP
) -> tuple[bool, Coloring | None]:
    """Brute-force colorability with pruning.

    Returns (True, lexicographically first witness) or (False, None).
    Guarded by cap on K^n.
    """
    if inst.K ** inst.num_vertices > cap:
        raise CapExceededError(
            f"K^n = {inst.K}^{inst.num_vertices} exceeds cap {cap}"
        )
    # Edges whose endpoints are both <= v, keyed by the later endpoint.
    incident: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.num_vertices)]
    for e, (u, v) in enumerate(inst.edges):
        incident[v].append((e, u, v))
    colors = [0] * inst.num_vertices

    def extend(v: int) -> bool:
        if v == inst.num_vertices:
            return True
        for c in range(1, inst.K + 1):
            colors[v] = c
            ok = all(
                inst.edge_allows(e, colors[u], c) for e, u, _ in incident[v]
            )
            if ok and extend(v + 1):
                return True
        colors[v] = 0
        return False

    if extend(0):
        return True, {v: colors[v] for v in range(inst.num_vertices)}
    return False, None


def sat_brute_force(sat: SatInstance) -> dict[int, bool] | None:
    """Exhaustive satisfiability check; returns a satisfying assignment or None."""
    for bits in itertools.product((False, True), repeat=sat.num_vars):
        assignment = {v + 1: bits[v] for v in range(sat.num_vars)}
        if all(
            any(assignment[abs(lit)] == (lit > 0) for lit in clause)
            for clause in sat.clauses
        ):
            return assignment
    return None


def parse_dimacs(text: str) -> SatInstance:
    """Parse DIMACS CNF.  Raises InputError with line numbers on malformed input."""
    num_vars = None
    num_clauses = None
    clauses: list[tuple[int, int, int]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"line {lineno}: bad problem line {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise InputError(f"line {lineno}: {exc}") from exc
            continue
        if num_vars is None:
            raise InputError(f"line {lineno}: clause before problem line")
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        for val in values:
            if val == 0:
                if len(pending) != 3:
                    raise InputError(
                        f"line {lineno}: clause has {len(pending)} literals, need 3"
                    )
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(val)
    if pending:
        raise InputError("unterminated clause at end of file")
    if num_vars is None:
        raise InputError("missing problem line")
    if num_clauses is not None and len(clauses) != num_clauses:
        raise InputError(
            f"problem line declares {num_clauses} clauses, found {len(clauses)}"
        )
    return SatInstance(num_vars, tuple(clauses))
