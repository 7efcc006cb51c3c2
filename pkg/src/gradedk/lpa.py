"""Leavitt path algebras of finite no-exit graphs.

For a finite no-exit graph every infinite path is trapped in a cycle, so
the algebra decomposes into one matrix block per sink (over trivially
graded K, shifts = lengths of the paths into the sink) and one block per
cycle of length n (over K[x^n, x^-n], shifts = lengths of the paths into
the cycle's base vertex that avoid the base's unique outgoing edge — i.e.
that do not wrap the full cycle).  Monomials p q* rewrite to this basis:
extend along unique out-edges to the base, strip whole cycles, map
r c^k r'* to x^{kn} e_{jl}; off-cycle regular vertices expand by (CK2).
The graded K0 invariant is the per-component multiset of shift values, and
graded *-isomorphism is decided by matching sink multisets up to a uniform
translation and cycle residue multisets up to rotation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .grading import FGAbelianGroup
from .gralg import (GradedMatrix, GradedStarField, MatricialAlgebra,
                    MatricialElement, RATIONALS, BaseStarField)


class LpaError(Exception):
    pass


class NotInClass(LpaError):
    """The graph has an exit from a cycle; outside the classified class."""


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Finite directed multigraph; vertex/edge order is declaration order."""
    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[str, str, str], ...]  # (name, source, range)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex")
        if len({e[0] for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge name")
        vs = set(self.vertices)
        for name, s, r in self.edges:
            if s not in vs or r not in vs:
                raise ValueError(f"edge {name} has an undeclared endpoint")

    def out_edges(self, v: str) -> Tuple[Tuple[str, str, str], ...]:
        return tuple(e for e in self.edges if e[1] == v)

    def in_edges(self, v: str) -> Tuple[Tuple[str, str, str], ...]:
        return tuple(e for e in self.edges if e[2] == v)

    def edge(self, name: str) -> Tuple[str, str, str]:
        for e in self.edges:
            if e[0] == name:
                return e
        raise KeyError(name)

    def is_sink(self, v: str) -> bool:
        return not self.out_edges(v)

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)


@dataclass(frozen=True)
class GraphClassReport:
    sinks: Tuple[str, ...]
    regular: Tuple[str, ...]
    cycles: Tuple[Tuple[str, Tuple[str, ...]], ...]  # (base vertex, edge names)
    no_exit: bool
    in_class: bool


def _simple_cycles(g: Graph) -> List[Tuple[str, Tuple[str, ...]]]:
    """All simple cycles, each rotated to start at its minimal vertex."""
    index = {v: i for i, v in enumerate(g.vertices)}
    cycles = []
    for start in g.vertices:
        # DFS over vertices with index >= index(start), so each cycle is
        # found exactly once, based at its minimal vertex
        stack = [(start, [], {start})]
        while stack:
            v, path, seen = stack.pop()
            for e in g.out_edges(v):
                w = e[2]
                if w == start:
                    cycles.append((start, tuple(p[0] for p in path + [e])))
                elif index[w] > index[start] and w not in seen:
                    stack.append((w, path + [e], seen | {w}))
    cycles.sort(key=lambda c: (len(c[1]), c[1]))
    return cycles


def classify_graph(g: Graph) -> GraphClassReport:
    cycles = _simple_cycles(g)
    on_cycle = {v for base, names in cycles for v in
                [g.edge(n)[1] for n in names]}
    no_exit = all(len(g.out_edges(v)) == 1 for v in on_cycle)
    sinks = tuple(v for v in g.vertices if g.is_sink(v))
    regular = tuple(v for v in g.vertices if not g.is_sink(v))
    return GraphClassReport(sinks=sinks, regular=regular,
                            cycles=tuple(cycles),
                            no_exit=no_exit, in_class=no_exit)


# ---------------------------------------------------------------------------
# structure decomposition
# ---------------------------------------------------------------------------

_K = RATIONALS
_TRIV_Z = GradedStarField.trivially_graded(_K, FGAbelianGroup(1))


def _paths_into(g: Graph, target: str,
                banned: frozenset = frozenset()) -> List[Tuple[str, ...]]:
    """All paths (edge-name tuples) ending at target, avoiding banned edges.

    Enumerated breadth-first by length, then lexicographically by the tuple
    of edge declaration indices; the trivial path comes first.
    """
    eindex = {e[0]: i for i, e in enumerate(g.edges)}
    out: List[Tuple[str, ...]] = []
    level: List[Tuple[str, ...]] = [()]
    guard = 0
    while level:
        out.extend(level)
        nxt = []
        for path in level:
            start = g.edge(path[0])[1] if path else target
            for e in g.in_edges(start):
                if e[0] not in banned:
                    nxt.append((e[0],) + path)
        nxt.sort(key=lambda p: tuple(eindex[n] for n in p))
        level = nxt
        guard += 1
        if guard > len(g.edges) + 1:
            raise NotInClass("path enumeration does not terminate: "
                             "the graph has a cycle with an exit")
    return out


@dataclass(frozen=True)
class SinkComponent:
    sink: str
    paths: Tuple[Tuple[str, ...], ...]
    algebra: MatricialAlgebra


@dataclass(frozen=True)
class CycleComponent:
    base: str
    cycle: Tuple[str, ...]          # edge names, starting at base
    n: int
    rpaths: Tuple[Tuple[str, ...], ...]
    algebra: MatricialAlgebra


@dataclass(frozen=True)
class StructureData:
    sinks: Tuple[SinkComponent, ...]
    cycles: Tuple[CycleComponent, ...]

    def blocks(self):
        for c in self.sinks:
            yield ("sink", c.sink), c
        for c in self.cycles:
            yield ("cycle", c.base), c

    def component(self, key):
        for k, c in self.blocks():
            if k == key:
                return c
        raise KeyError(key)


def structure_decomposition(g: Graph,
                            report: Optional[GraphClassReport] = None
                            ) -> StructureData:
    report = report if report is not None else classify_graph(g)
    if not report.in_class:
        raise NotInClass("graph has a cycle with an exit")
    sinks = []
    for s in report.sinks:
        paths = tuple(_paths_into(g, s))
        shifts = [(len(p),) for p in paths]
        alg = MatricialAlgebra(_TRIV_Z, [(len(paths), shifts)])
        sinks.append(SinkComponent(s, paths, alg))
    cycles = []
    for base, names in report.cycles:
        n = len(names)
        out_edge = g.out_edges(base)[0][0]
        rpaths = tuple(_paths_into(g, base, banned=frozenset([out_edge])))
        shifts = [(len(p),) for p in rpaths]
        fld = GradedStarField.laurent(_K, n)
        alg = MatricialAlgebra(fld, [(len(rpaths), shifts)])
        cycles.append(CycleComponent(base, names, n, rpaths, alg))
    return StructureData(tuple(sinks), tuple(cycles))


# ---------------------------------------------------------------------------
# monomials and rewriting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """scalar * p q* with r(p) = r(q) = vertex."""
    scalar: object
    p: Tuple[str, ...]
    q: Tuple[str, ...]
    vertex: str

    @classmethod
    def of_vertex(cls, v: str, scalar=None) -> "Monomial":
        return cls(_K.one() if scalar is None else scalar, (), (), v)

    @classmethod
    def of_path(cls, g: Graph, p: Sequence[str], q: Sequence[str] = (),
                scalar=None) -> "Monomial":
        p, q = tuple(p), tuple(q)
        for seq in (p, q):
            for a, b in zip(seq, seq[1:]):
                if g.edge(a)[2] != g.edge(b)[1]:
                    raise ValueError("path is not composable")
        rp = g.edge(p[-1])[2] if p else None
        rq = g.edge(q[-1])[2] if q else None
        v = rp if rp is not None else rq
        if v is None:
            raise ValueError("a bare scalar needs of_vertex")
        if (rp is not None and rp != v) or (rq is not None and rq != v):
            raise ValueError("p and q must share their range vertex")
        return cls(_K.one() if scalar is None else scalar, p, q, v)

    def star(self) -> "Monomial":
        return Monomial(_K.conj(self.scalar), self.q, self.p, self.vertex)


def monomial_product(g: Graph, m1: Monomial, m2: Monomial) -> Optional[Monomial]:
    """The product m1 * m2, or None when it is zero (by CK1)."""
    s2 = g.edge(m2.p[0])[1] if m2.p else m2.vertex
    s1 = g.edge(m1.q[0])[1] if m1.q else m1.vertex
    if s1 != s2:
        return None
    scalar = _K.mul(m1.scalar, m2.scalar)
    if len(m1.q) <= len(m2.p):
        if m2.p[:len(m1.q)] != m1.q:
            return None
        rest = m2.p[len(m1.q):]
        return Monomial(scalar, m1.p + rest, m2.q, m2.vertex)
    if m1.q[:len(m2.p)] != m2.p:
        return None
    rest = m1.q[len(m2.p):]
    return Monomial(scalar, m1.p, m2.q + rest, m1.vertex)


class LpaElement:
    """An element of the decomposed algebra: one summand per block key."""

    def __init__(self, structure: StructureData,
                 parts: Dict[Tuple[str, str], MatricialElement]):
        self.structure = structure
        self.parts = {k: v for k, v in parts.items() if not v.is_zero()}

    @classmethod
    def zero(cls, structure: StructureData) -> "LpaElement":
        return cls(structure, {})

    def _merge(self, other: "LpaElement", op) -> "LpaElement":
        if self.structure != other.structure:
            raise ValueError("elements of different decompositions")
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = op(out[k], v) if k in out else op(None, v)
        return LpaElement(self.structure, out)

    def __add__(self, other):
        return self._merge(other, lambda a, b: b if a is None else a + b)

    def __sub__(self, other):
        return self + other.int_mul(-1) if hasattr(other, "int_mul") \
            else NotImplemented

    def int_mul(self, c: int) -> "LpaElement":
        return LpaElement(self.structure,
                          {k: v.int_mul(c) for k, v in self.parts.items()})

    def __mul__(self, other: "LpaElement") -> "LpaElement":
        if self.structure != other.structure:
            raise ValueError("elements of different decompositions")
        out = {}
        for k, v in self.parts.items():
            w = other.parts.get(k)
            if w is not None:
                out[k] = v * w
        return LpaElement(self.structure, out)

    def star(self) -> "LpaElement":
        return LpaElement(self.structure,
                          {k: v.star() for k, v in self.parts.items()})

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other) -> bool:
        return (isinstance(other, LpaElement)
                and self.structure == other.structure
                and self.parts == other.parts)

    def __repr__(self) -> str:
        return f"LpaElement({sorted(self.parts)})"


def _matrix_unit_elem(alg: MatricialAlgebra, j: int, l: int, degree: int,
                      scalar) -> MatricialElement:
    shifts = alg.block_shifts(0)
    m = GradedMatrix(alg.field, shifts, shifts, (degree,), {(j, l): scalar})
    return MatricialElement(alg, {(degree,): {0: m}})


def reduce_monomial(g: Graph, m: Monomial,
                    structure: Optional[StructureData] = None) -> LpaElement:
    """Rewrite scalar * p q* into the canonical matrix-unit basis."""
    structure = structure if structure is not None \
        else structure_decomposition(g)
    sink_of = {c.sink: c for c in structure.sinks}
    cycle_vertices = {}
    for c in structure.cycles:
        for name in c.cycle:
            cycle_vertices[g.edge(name)[1]] = c
    parts: Dict[Tuple[str, str], MatricialElement] = {}

    def emit(key, elem):
        parts[key] = parts[key] + elem if key in parts else elem

    def visit(scalar, p, q, v):
        if v in sink_of:
            c = sink_of[v]
            j, l = c.paths.index(p), c.paths.index(q)
            emit(("sink", c.sink),
                 _matrix_unit_elem(c.algebra, j, l, len(p) - len(q), scalar))
            return
        if v in cycle_vertices:
            c = cycle_vertices[v]
            while v != c.base:
                e = g.out_edges(v)[0]
                p, q, v = p + (e[0],), q + (e[0],), e[2]

            def strip(path):
                k = 0
                while path[len(path) - c.n:] == c.cycle:
                    path = path[:len(path) - c.n]
                    k += 1
                return path, k

            rp, a = strip(p)
            rq, b = strip(q)
            j, l = c.rpaths.index(rp), c.rpaths.index(rq)
            emit(("cycle", c.base),
                 _matrix_unit_elem(c.algebra, j, l,
                                   (a - b) * c.n + len(rp) - len(rq), scalar))
            return
        # regular vertex off every cycle: expand by (CK2)
        for e in g.out_edges(v):
            visit(scalar, p + (e[0],), q + (e[0],), e[2])

    visit(m.scalar, m.p, m.q, m.vertex)
    return LpaElement(structure, parts)


def lpa_one(g: Graph, structure: Optional[StructureData] = None) -> LpaElement:
    structure = structure if structure is not None \
        else structure_decomposition(g)
    total = LpaElement.zero(structure)
    for v in g.vertices:
        total = total + reduce_monomial(g, Monomial.of_vertex(v), structure)
    return total


# ---------------------------------------------------------------------------
# invariants and the decision procedure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LpaInvariant:
    """Per-component shift multisets of the graded K0 data."""
    sinks: Tuple[Tuple[int, ...], ...]             # sorted path lengths
    cycles: Tuple[Tuple[int, Tuple[int, ...]], ...]  # (n, sorted r-lengths)


def lpa_invariant(g: Graph,
                  structure: Optional[StructureData] = None) -> LpaInvariant:
    structure = structure if structure is not None \
        else structure_decomposition(g)
    sinks = tuple(tuple(sorted(len(p) for p in c.paths))
                  for c in structure.sinks)
    cycles = tuple((c.n, tuple(sorted(len(p) for p in c.rpaths)))
                   for c in structure.cycles)
    return LpaInvariant(sinks, cycles)


def _sink_canonical(lengths: Sequence[int]) -> Tuple[int, ...]:
    base = min(lengths)
    return tuple(sorted(l - base for l in lengths))


def _residue_counts(n: int, lengths: Sequence[int]) -> Tuple[int, ...]:
    counts = [0] * n
    for l in lengths:
        counts[l % n] += 1
    return tuple(counts)


def _cycle_canonical(n: int, lengths: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    counts = _residue_counts(n, lengths)
    best = min(tuple(counts[(d - r) % n] for d in range(n)) for r in range(n))
    return (n, best)


def decide_graded_iso(g1: Graph, g2: Graph):
    """Decide graded *-isomorphism of the two Leavitt path algebras.

    Returns (True, certificate) or (False, obstruction).  The certificate
    lists matched component pairs with their translation constants (sinks)
    and rotation constants (cycles).
    """
    inv1 = lpa_invariant(g1)
    inv2 = lpa_invariant(g2)
    if len(inv1.sinks) != len(inv2.sinks):
        return False, (f"sink component counts differ: "
                       f"{len(inv1.sinks)} vs {len(inv2.sinks)}")
    if len(inv1.cycles) != len(inv2.cycles):
        return False, (f"cycle component counts differ: "
                       f"{len(inv1.cycles)} vs {len(inv2.cycles)}")

    # sinks: match canonical (translation-normalized) length multisets
    free2 = list(range(len(inv2.sinks)))
    sink_pairs = []
    for i, lengths in enumerate(inv1.sinks):
        form = _sink_canonical(lengths)
        match = next((j for j in free2
                      if _sink_canonical(inv2.sinks[j]) == form), None)
        if match is None:
            return False, (f"sink component {i} with normalized lengths "
                           f"{form} has no counterpart")
        free2.remove(match)
        shift = min(inv2.sinks[match]) - min(lengths)
        sink_pairs.append((i, match, shift))

    # cycles: match (length, rotation-normalized residue counts)
    free2 = list(range(len(inv2.cycles)))
    cycle_pairs = []
    for i, (n, lengths) in enumerate(inv1.cycles):
        form = _cycle_canonical(n, lengths)
        match = None
        for j in free2:
            m, lengths2 = inv2.cycles[j]
            if m == n and _cycle_canonical(m, lengths2) == form:
                match = j
                break
        if match is None:
            return False, (f"cycle component {i} with invariant {form} "
                           f"has no counterpart")
        free2.remove(match)
        counts1 = _residue_counts(n, lengths)
        counts2 = _residue_counts(n, inv2.cycles[match][1])
        rot = next(r for r in range(n)
                   if tuple(counts1[(d - r) % n] for d in range(n)) == counts2)
        cycle_pairs.append((i, match, rot))

    return True, {"sinks": sink_pairs, "cycles": cycle_pairs}
