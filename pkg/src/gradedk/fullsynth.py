"""Constructive fullness: synthesize a graded *-homomorphism from a
contractive K0 matrix.

Given a contractive matrix f between the K0 modules of matricial algebras
R and S, each entry a_ji decomposes as a positive combination of cosets
sum_t a_jit * coset(alpha_jit).  Target block j receives, for every source
block i and term t, a_jit twisted copies of block i; the copies occupy
"slots" whose shifts are gamma^i_k - alpha_jit.  Each slot is matched to a
target position with the same shift coset (the greedy canonical choice),
the residual support-degree difference is absorbed by a cocycle unitary,
and unmatched target positions are zero padding.  Evaluation is then pure
index bookkeeping: entry (k,k') of source block i lands at positions
(sigma(l), sigma(l')) with its coefficient unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .grading import Coords, GroupRingElem
from .gralg import (GradedMatrix, MatricialAlgebra, MatricialElement,
                    StarAlgebraMap)
from .k0gr import (K0Module, KHomMatrix, class_of_projection, is_contractive,
                   is_order_preserving, unit_class)


class SynthesisError(Exception):
    pass


class NegativeCoefficient(SynthesisError):
    """f has a negative group-ring coefficient: not order-preserving."""


class NotOrderPreserving(NegativeCoefficient):
    pass


class NotContractive(SynthesisError):
    """f does not map the order-unit below the target order-unit."""


@dataclass(frozen=True)
class FCoefficients:
    """Per (target block j, source block i): the terms (a_jit, alpha_jit)."""
    source_rank: int
    target_rank: int
    table: Tuple[Tuple[Tuple[Tuple[int, Coords], ...], ...], ...]  # [j][i] -> terms

    def terms(self, j: int, i: int) -> Tuple[Tuple[int, Coords], ...]:
        return self.table[j][i]

    def k(self, j: int, i: int) -> int:
        return len(self.table[j][i])


def decompose_khom(f: KHomMatrix) -> FCoefficients:
    """Split every entry a_ji into positive coefficients on distinct cosets."""
    table = []
    for j in range(f.target.rank):
        row = []
        for i in range(f.source.rank):
            entry = f.entries[j][i]
            terms = []
            for rep, coeff in entry.sorted_terms():
                if coeff < 0:
                    raise NegativeCoefficient(
                        f"entry ({j},{i}) has negative coefficient {coeff} at {rep}")
                terms.append((coeff, rep))
            row.append(tuple(terms))
        table.append(tuple(row))
    return FCoefficients(f.source.rank, f.target.rank, tuple(table))


# ---------------------------------------------------------------------------
# dimension machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockDimensionData:
    """Exact dimension bookkeeping for one target block j."""
    j: int
    slots: Tuple[Tuple[int, int, int, int], ...]  # (i, t, s, k), 0-based
    n_slots: int                                  # N_j
    q: int                                        # q(j) = target block size
    # one row per target coset class, in order of first occurrence:
    # (class representative, s^j_{j'}, N_{jj'})
    classes: Tuple[Tuple[Coords, int, int], ...]
    unmatched: Tuple[Tuple[Coords, int], ...]     # slot cosets absent in target
    coset_ok: bool
    dim_ok: bool
    predim_ok: bool
    equality: bool


@dataclass(frozen=True)
class DimensionReport:
    blocks: Tuple[BlockDimensionData, ...]

    @property
    def coset_equations_ok(self) -> bool:
        return all(b.coset_ok for b in self.blocks)

    @property
    def dimension_formulas_ok(self) -> bool:
        return all(b.dim_ok for b in self.blocks)

    @property
    def predimension_ok(self) -> bool:
        return all(b.predim_ok for b in self.blocks)

    @property
    def equalities_hold(self) -> bool:
        return all(b.equality for b in self.blocks)


def dimension_report(f: KHomMatrix,
                     coeffs: Optional[FCoefficients] = None) -> DimensionReport:
    """Evaluate coset equations, dimension formulas, and the pre-dimension
    inequalities exactly; the pre-dimension flag is computed independently
    and must coincide with (coset_ok and dim_ok)."""
    coeffs = coeffs if coeffs is not None else decompose_khom(f)
    R = f.source.algebra
    S = f.target.algebra
    g = R.field.grading
    sub = R.field.support
    blocks = []
    for j in range(S.nblocks):
        delta = S.block_shifts(j)
        q = len(delta)
        # target coset classes in order of first occurrence
        class_order: List[Coords] = []
        class_size: Dict[Coords, int] = {}
        for d in delta:
            key = sub.reduce(g.neg(d))
            if key not in class_size:
                class_order.append(key)
                class_size[key] = 0
            class_size[key] += 1
        slots: List[Tuple[int, int, int, int]] = []
        class_count: Dict[Coords, int] = {key: 0 for key in class_order}
        unmatched: Dict[Coords, int] = {}
        lhs = GroupRingElem.zero(sub)
        for i in range(R.nblocks):
            gamma = R.block_shifts(i)
            for t, (a, alpha) in enumerate(coeffs.terms(j, i)):
                for s in range(a):
                    for k in range(len(gamma)):
                        slots.append((i, t, s, k))
                        key = sub.reduce(g.sub(alpha, gamma[k]))
                        lhs = lhs + GroupRingElem.monomial(sub, g.sub(alpha, gamma[k]))
                        if key in class_count:
                            class_count[key] += 1
                        else:
                            unmatched[key] = unmatched.get(key, 0) + 1
        rhs = GroupRingElem.zero(sub)
        for d in delta:
            rhs = rhs + GroupRingElem.monomial(sub, g.neg(d))
        coset_ok = not unmatched
        dim_ok = all(class_count[key] <= class_size[key] for key in class_order)
        predim_ok = (rhs - lhs).is_nonneg()
        equality = (rhs == lhs)
        blocks.append(BlockDimensionData(
            j=j,
            slots=tuple(slots),
            n_slots=len(slots),
            q=q,
            classes=tuple((key, class_size[key], class_count[key])
                          for key in class_order),
            unmatched=tuple(sorted(unmatched.items())),
            coset_ok=coset_ok,
            dim_ok=dim_ok,
            predim_ok=predim_ok,
            equality=equality,
        ))
    return DimensionReport(tuple(blocks))


# ---------------------------------------------------------------------------
# homomorphism specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlotGroup:
    """One (source block, term) group of slots inside a target block."""
    i: int            # source block
    t: int            # term index into the coset decomposition of a_ji
    alpha: Coords     # coset representative of the term
    copies: int       # a_jit
    base: int         # index of the group's first slot


@dataclass(frozen=True)
class BlockPlan:
    """Synthesis plan for one target block."""
    groups: Tuple[SlotGroup, ...]
    slot_shifts: Tuple[Coords, ...]          # shift of each slot, len N_j
    sigma: Tuple[int, ...]                   # slot/padding l -> target position
    eps: Tuple[Coords, ...]                  # support degrees, len q(j)
    n_slots: int


class GradedHomSpec:
    """Explicit block-structured graded *-homomorphism between matricial
    algebras, as produced by synthesize."""

    def __init__(self, source: MatricialAlgebra, target: MatricialAlgebra,
                 plans: Sequence[BlockPlan]):
        if len(plans) != target.nblocks:
            raise ValueError("need one plan per target block")
        self.source = source
        self.target = target
        self.plans = tuple(plans)
        self._map: Optional[StarAlgebraMap] = None

    def evaluate(self, x: MatricialElement) -> MatricialElement:
        if x.algebra != self.source:
            raise ValueError("element not in the spec's source algebra")
        field = self.source.field
        parts: Dict[Coords, Dict[int, GradedMatrix]] = {}
        for degree, bs in x.parts.items():
            out_blocks: Dict[int, GradedMatrix] = {}
            for j, plan in enumerate(self.plans):
                entries: Dict[Tuple[int, int], object] = {}
                for grp in plan.groups:
                    m = bs.get(grp.i)
                    if m is None:
                        continue
                    a = grp.copies
                    for (k, k2), c in m.entries.items():
                        for s in range(a):
                            l = grp.base + k * a + s
                            l2 = grp.base + k2 * a + s
                            entries[(plan.sigma[l], plan.sigma[l2])] = c
                if entries:
                    shifts = self.target.block_shifts(j)
                    out_blocks[j] = GradedMatrix(field, shifts, shifts,
                                                 degree, entries)
            if out_blocks:
                parts[degree] = out_blocks
        return MatricialElement(self.target, parts)

    # StarAlgebraMap-compatible alias
    apply = evaluate

    def as_map(self) -> StarAlgebraMap:
        if self._map is None:
            self._map = StarAlgebraMap(
                self.source, self.target,
                {key: self.evaluate(self.source.matrix_unit(*key))
                 for key in self.source.matrix_units()})
        return self._map

    def is_unital(self) -> bool:
        return all(plan.n_slots == self.target.block_size(j)
                   for j, plan in enumerate(self.plans))

    def __eq__(self, other) -> bool:
        if isinstance(other, GradedHomSpec):
            return (self.source == other.source and self.target == other.target
                    and self.plans == other.plans)
        return NotImplemented

    def __repr__(self) -> str:
        return f"GradedHomSpec({self.source!r} -> {self.target!r})"


def synthesize(f: KHomMatrix, source: Optional[MatricialAlgebra] = None,
               target: Optional[MatricialAlgebra] = None) -> GradedHomSpec:
    """Synthesize a graded *-homomorphism spec with K0 matrix equal to f."""
    R = source if source is not None else f.source.algebra
    S = target if target is not None else f.target.algebra
    if R != f.source.algebra or S != f.target.algebra:
        raise ValueError("f is not a K0 map between the given algebras")
    if not is_order_preserving(f):
        raise NotOrderPreserving("f has a negative coefficient")
    if not is_contractive(f):
        raise NotContractive("f does not contract the order-unit")
    coeffs = decompose_khom(f)
    g = R.field.grading
    sub = R.field.support
    plans = []
    for j in range(S.nblocks):
        delta = S.block_shifts(j)
        q = len(delta)
        groups: List[SlotGroup] = []
        slot_shifts: List[Coords] = []
        for i in range(R.nblocks):
            gamma = R.block_shifts(i)
            for t, (a, alpha) in enumerate(coeffs.terms(j, i)):
                groups.append(SlotGroup(i, t, alpha, a, len(slot_shifts)))
                for k in range(len(gamma)):
                    for s in range(a):
                        slot_shifts.append(g.sub(gamma[k], alpha))
        n_slots = len(slot_shifts)
        # target positions grouped by shift coset, each list ascending
        free: Dict[Coords, List[int]] = {}
        for pos in range(q - 1, -1, -1):
            free.setdefault(sub.reduce(delta[pos]), []).append(pos)
        sigma: List[int] = []
        for shift in slot_shifts:
            bucket = free.get(sub.reduce(shift))
            if not bucket:
                raise NotContractive(
                    f"no target position in block {j} for slot shift {shift}")
            sigma.append(bucket.pop())
        used = set(sigma)
        sigma.extend(pos for pos in range(q) if pos not in used)
        eps: List[Coords] = [g.zero()] * q
        for l, shift in enumerate(slot_shifts):
            e = g.sub(delta[sigma[l]], shift)
            if not sub.contains(e):
                raise AssertionError("slot/position coset mismatch")
            eps[l] = e
        plans.append(BlockPlan(tuple(groups), tuple(slot_shifts),
                               tuple(sigma), tuple(eps), n_slots))
    return GradedHomSpec(R, S, plans)


def evaluate_hom(spec: GradedHomSpec, x: MatricialElement) -> MatricialElement:
    return spec.evaluate(x)


def k0_of_hom(h) -> KHomMatrix:
    """K0 matrix of a homomorphism (GradedHomSpec or StarAlgebraMap).

    Column i is coset(gamma^i_1) * class(h(e^i_11)); the image must be a
    monomial projection, which every spec produced here satisfies.
    """
    src = K0Module(h.source)
    tgt = K0Module(h.target)
    columns = []
    for i in range(h.source.nblocks):
        image = h.apply(h.source.matrix_unit(i, 0, 0))
        cls = class_of_projection(image, tgt)
        columns.append(cls.act(h.source.block_shifts(i)[0]))
    return KHomMatrix.from_columns(src, tgt, columns)
