"""Graded Grothendieck groups of matricial algebras as ordered modules.

K0 of a matricial algebra with n blocks is the free Z[G/H]-module of rank n
(G the grading group, H the field support).  Coordinates are taken in the
module basis determined by the blocks' original shift vectors:

    [e^i_kk]  |->  coset(-shift^i_k) * gen_i,

so the class of the identity is (sum_k coset(-shift^i_k))_i and the matrix
of an algebra map in these coordinates has column i equal to
coset(shift^i_1) * class(image of e^i_11).  Adding a constant to a block's
shifts does not change the graded algebra, so the normalization that makes
the first shift of every block zero is pure bookkeeping; we record it but
never re-base coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .grading import Coords, GroupRingElem, Subgroup
from .gralg import MatricialAlgebra, MatricialElement


class K0Module:
    """K0 of a matricial algebra: free ordered Z[G/H]-module, rank = #blocks."""

    def __init__(self, algebra: MatricialAlgebra):
        self.algebra = algebra
        self.rank = algebra.nblocks
        self.coset_space = algebra.field.support
        # Normalization record: the per-block constant that would make the
        # first shift zero (a no-op on the algebra itself).
        self.normalization = tuple(algebra.block_shifts(i)[0]
                                   for i in range(self.rank))

    def zero(self) -> "K0Elem":
        return K0Elem(self, tuple(GroupRingElem.zero(self.coset_space)
                                  for _ in range(self.rank)))

    def generator(self, i: int) -> "K0Elem":
        coords = [GroupRingElem.zero(self.coset_space) for _ in range(self.rank)]
        coords[i] = GroupRingElem.one(self.coset_space)
        return K0Elem(self, tuple(coords))

    def __eq__(self, other) -> bool:
        return isinstance(other, K0Module) and self.algebra == other.algebra

    def __hash__(self) -> int:
        return hash(self.algebra)

    def __repr__(self) -> str:
        return f"K0Module(rank={self.rank})"


@dataclass(frozen=True)
class K0Elem:
    module: K0Module
    coords: Tuple[GroupRingElem, ...]

    def __post_init__(self):
        if len(self.coords) != self.module.rank:
            raise ValueError("coordinate count does not match module rank")

    def __add__(self, other: "K0Elem") -> "K0Elem":
        self._check(other)
        return K0Elem(self.module, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "K0Elem") -> "K0Elem":
        self._check(other)
        return K0Elem(self.module, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def act(self, gamma: Iterable[int]) -> "K0Elem":
        return K0Elem(self.module, tuple(a.act(gamma) for a in self.coords))

    def _check(self, other: "K0Elem") -> None:
        if self.module != other.module:
            raise ValueError("elements of different K0 modules")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def __str__(self) -> str:
        return "(" + "; ".join(str(c) for c in self.coords) + ")"


def k0_module(algebra: MatricialAlgebra) -> K0Module:
    return K0Module(algebra)


def unit_class(module_or_algebra) -> K0Elem:
    """The class [1_R]: coordinate i is sum_k coset(-shift^i_k)."""
    mod = module_or_algebra if isinstance(module_or_algebra, K0Module) \
        else K0Module(module_or_algebra)
    alg = mod.algebra
    g = alg.field.grading
    coords = []
    for i in range(mod.rank):
        total = GroupRingElem.zero(mod.coset_space)
        for s in alg.block_shifts(i):
            total = total + GroupRingElem.monomial(mod.coset_space, g.neg(s))
        coords.append(total)
    return K0Elem(mod, tuple(coords))


def class_of_projection(p: MatricialElement, module: Optional[K0Module] = None) -> K0Elem:
    """K0 class of a monomial degree-zero projection.

    Such a projection is necessarily diagonal with 0/1 entries; its class is
    the sum over diagonal support positions k in block i of
    coset(-shift^i_k) * gen_i.
    """
    mod = module if module is not None else K0Module(p.algebra)
    alg = p.algebra
    g = alg.field.grading
    zero = g.zero()
    if not p.is_zero():
        if p.homogeneous_degree() != zero:
            raise ValueError("projection must be homogeneous of degree 0")
    if p * p != p:
        raise ValueError("element is not idempotent")
    if p.star() != p:
        raise ValueError("element is not self-adjoint")
    if not p.is_monomial():
        raise ValueError("projection is not monomial")
    coords = [GroupRingElem.zero(mod.coset_space) for _ in range(mod.rank)]
    blocks = p.parts.get(zero, {})
    one = alg.field.base.one()
    for i, m in blocks.items():
        for (r, c), coeff in m.entries.items():
            if r != c or coeff != one:
                raise ValueError("monomial degree-0 projection must be a 0/1 diagonal")
            coords[i] = coords[i] + GroupRingElem.monomial(
                mod.coset_space, g.neg(alg.block_shifts(i)[r]))
    return K0Elem(mod, tuple(coords))


def is_positive(v: K0Elem) -> bool:
    return all(c.is_nonneg() for c in v.coords)


def leq(v: K0Elem, w: K0Elem) -> bool:
    return is_positive(w - v)


class KHomMatrix:
    """Matrix of a Z[G/H]-module map between K0 modules; entry (j,i) = a_ji."""

    def __init__(self, source: K0Module, target: K0Module,
                 entries: Sequence[Sequence[GroupRingElem]]):
        self.source = source
        self.target = target
        rows = [tuple(row) for row in entries]
        if len(rows) != target.rank or any(len(r) != source.rank for r in rows):
            raise ValueError("KHom matrix dimensions do not match block counts")
        for row in rows:
            for e in row:
                if e.subgroup != source.coset_space:
                    raise ValueError("entry over the wrong coset space")
        if source.coset_space != target.coset_space:
            raise ValueError("source and target must share the coset space")
        self.entries = tuple(rows)

    @classmethod
    def identity(cls, module: K0Module) -> "KHomMatrix":
        sub = module.coset_space
        n = module.rank
        return cls(module, module,
                   [[GroupRingElem.one(sub) if i == j else GroupRingElem.zero(sub)
                     for i in range(n)] for j in range(n)])

    @classmethod
    def from_columns(cls, source: K0Module, target: K0Module,
                     columns: Sequence[K0Elem]) -> "KHomMatrix":
        if len(columns) != source.rank:
            raise ValueError("need one column per source block")
        return cls(source, target,
                   [[columns[i].coords[j] for i in range(source.rank)]
                    for j in range(target.rank)])

    def apply(self, v: K0Elem) -> K0Elem:
        if v.module != self.source:
            raise ValueError("vector not in the source module")
        coords = []
        for j in range(self.target.rank):
            total = GroupRingElem.zero(self.target.coset_space)
            for i in range(self.source.rank):
                total = total + self.entries[j][i] * v.coords[i]
            coords.append(total)
        return K0Elem(self.target, tuple(coords))

    def compose(self, inner: "KHomMatrix") -> "KHomMatrix":
        """self after inner (matrix product)."""
        if inner.target != self.source:
            raise ValueError("KHom matrices not composable")
        sub = self.target.coset_space
        out = []
        for j in range(self.target.rank):
            row = []
            for i in range(inner.source.rank):
                total = GroupRingElem.zero(sub)
                for k in range(self.source.rank):
                    total = total + self.entries[j][k] * inner.entries[k][i]
                row.append(total)
            out.append(row)
        return KHomMatrix(inner.source, self.target, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, KHomMatrix) and self.source == other.source
                and self.target == other.target and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"KHomMatrix({self.source.rank} -> {self.target.rank})"

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(e) for e in row)
                               for row in self.entries) + "]"


def is_order_preserving(f: KHomMatrix) -> bool:
    return all(e.is_nonneg() for row in f.entries for e in row)


def is_contractive(f: KHomMatrix) -> bool:
    if not is_order_preserving(f):
        return False
    return leq(f.apply(unit_class(f.source)), unit_class(f.target))


def is_unit_preserving(f: KHomMatrix) -> bool:
    return (is_order_preserving(f)
            and f.apply(unit_class(f.source)) == unit_class(f.target))


# ---------------------------------------------------------------------------
# omega shift multisets (infinite matrix algebras over trivially graded K)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DescendingRay:
    """Shift values start, start+1, start+2, ... each with multiplicity count.

    The corresponding K0 classes x^{-d} run through descending powers, hence
    the name.
    """
    start: int
    count: int = 1


@dataclass(frozen=True)
class PointMassOmega:
    """A single shift value of infinite multiplicity."""
    degree: int


@dataclass(frozen=True)
class OmegaShiftMultiset:
    """Shift multiset of M_omega(K)(shifts) with at most countable tails."""
    finite_part: Tuple[Tuple[int, int], ...] = ()
    tails: Tuple[object, ...] = ()

    @classmethod
    def line(cls) -> "OmegaShiftMultiset":
        """Shifts (0, 1, 2, ...)."""
        return cls((), (DescendingRay(0, 1),))

    @classmethod
    def clock(cls) -> "OmegaShiftMultiset":
        """Shifts (0, 1, 1, 1, ...)."""
        return cls(((0, 1),), (PointMassOmega(1),))

    def multiplicity(self, d: int) -> Optional[int]:
        """Multiplicity of shift value d; None means infinite."""
        total = dict(self.finite_part).get(d, 0)
        for tail in self.tails:
            if isinstance(tail, PointMassOmega):
                if tail.degree == d:
                    return None
            elif isinstance(tail, DescendingRay):
                if d >= tail.start:
                    total += tail.count
            else:
                raise TypeError(f"unknown tail descriptor {tail!r}")
        return total

    def eventual_count(self) -> int:
        """Multiplicity for all large d (point masses excluded)."""
        return sum(t.count for t in self.tails if isinstance(t, DescendingRay))

    def support_window(self) -> Tuple[int, int]:
        """[lo, hi] outside of which multiplicity is 0 (below) / eventual (above)."""
        values = [d for d, _ in self.finite_part]
        values += [t.start for t in self.tails if isinstance(t, DescendingRay)]
        values += [t.degree for t in self.tails if isinstance(t, PointMassOmega)]
        if not values:
            return (0, 0)
        return (min(values), max(values))


def omega_interval_member(v: GroupRingElem, shifts: OmegaShiftMultiset) -> bool:
    """Is v in the generating interval of M_omega(K)(shifts)?

    The interval consists of the classes of finite monomial projections:
    nonnegative combinations sum a_d * x^{-d} with a_d at most the
    multiplicity of shift value d.
    """
    amb = v.subgroup.ambient
    if amb.free_rank != 1 or amb.torsion_moduli or v.subgroup.generators:
        raise ValueError("omega intervals require Z grading with trivial support")
    for rep, coeff in v.terms.items():
        if coeff < 0:
            return False
        d = -rep[0]
        mult = shifts.multiplicity(d)
        if mult is not None and coeff > mult:
            return False
    return True


def omega_iso_exists(a: OmegaShiftMultiset, b: OmegaShiftMultiset):
    """Decide whether a contractive-both-ways Z[x,x^-1]-module isomorphism
    of the rank-one K0 modules with generating intervals given by a and b
    exists.

    Any module automorphism of Z[x,x^-1] is multiplication by a unit; being
    order-preserving forces +x^k.  x^k maps the interval of a into that of b
    iff mult_a(d) <= mult_b(d-k) for all d, so we check both directions over
    a sufficient finite window plus the eventual tail counts.

    Returns (True, k) or (False, obstruction string).
    """
    lo_a, hi_a = a.support_window()
    lo_b, hi_b = b.support_window()
    span = (hi_a - lo_a) + (hi_b - lo_b) + 2

    def fits(x: OmegaShiftMultiset, y: OmegaShiftMultiset, k: int) -> bool:
        # multiplicity_x(d) <= multiplicity_y(d - k) for all d.  For large d
        # both sides equal their eventual ray counts, so compare those first.
        ex, ey = x.eventual_count(), y.eventual_count()
        if ex > ey:
            return False
        lo = min(x.support_window()[0], y.support_window()[0] + k) - 1
        hi = max(x.support_window()[1], y.support_window()[1] + k) + span
        for d in range(lo, hi + 1):
            mx = x.multiplicity(d)
            my = y.multiplicity(d - k)
            if my is None:
                continue
            if mx is None or mx > my:
                return False
        return True

    for k in range(-(span + abs(lo_a) + abs(hi_b)), span + abs(hi_a) + abs(lo_b) + 1):
        if fits(a, b, k) and fits(b, a, -k):
            return True, k
    return False, ("no power x^k maps the generating intervals into each other "
                   "in both directions")
