"""Graded *-fields with enough unitaries and graded matricial *-algebras.

The graded fields here are "monomial": every support component A_g is
one-dimensional, spanned by a unitary cocycle element u_g with
u_g u_h = u_{g+h} and (u_g)* = u_{-g}.  A homogeneous matrix entry is then
determined by a base-field coefficient; its degree is implied by the matrix
degree and the row/column shifts, so matrices store coefficients only and
the degree constraint is enforced structurally.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .grading import Coords, FGAbelianGroup, Subgroup, subgroup_member


# ---------------------------------------------------------------------------
# base *-fields
# ---------------------------------------------------------------------------

class BaseStarField:
    """Exact base field with involution: Q, Q(i), or F_p.

    Values: Fraction for Q, (Fraction, Fraction) pairs (re, im) for Q(i),
    ints in [0, p) for F_p.  The honesty flags record 2-properness and
    *-pythagoreanness per instance; they gate theorem-hypothesis checks and
    are never silently assumed.
    """

    def __init__(self, tag: str, p: Optional[int] = None):
        if tag not in ("Q", "Qi", "Fp"):
            raise ValueError(f"unknown base field tag {tag!r}")
        if tag == "Fp":
            if p is None or p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
                raise ValueError("Fp needs a prime p")
        self.tag = tag
        self.p = p
        if tag == "Q":
            self.is_two_proper, self.is_star_pythagorean = True, False
        elif tag == "Qi":
            # Norms are sums of two rational squares; not every rational
            # (e.g. 3) is such a norm, so not *-pythagorean.
            self.is_two_proper, self.is_star_pythagorean = True, False
        else:
            # 2-proper iff -1 is not a square, i.e. p = 3 (mod 4).
            self.is_two_proper = (p % 4 == 3)
            # For odd p every element of F_p is a sum of two squares,
            # including the non-squares, so only F_2 is *-pythagorean.
            self.is_star_pythagorean = (p == 2)

    # -- arithmetic ------------------------------------------------------
    def coerce(self, x):
        if self.tag == "Q":
            return Fraction(x)
        if self.tag == "Qi":
            if isinstance(x, tuple):
                return (Fraction(x[0]), Fraction(x[1]))
            return (Fraction(x), Fraction(0))
        return int(x) % self.p

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        if self.tag == "Q":
            return a + b
        if self.tag == "Qi":
            return (a[0] + b[0], a[1] + b[1])
        return (a + b) % self.p

    def neg(self, a):
        if self.tag == "Q":
            return -a
        if self.tag == "Qi":
            return (-a[0], -a[1])
        return (-a) % self.p

    def mul(self, a, b):
        if self.tag == "Q":
            return a * b
        if self.tag == "Qi":
            return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])
        return (a * b) % self.p

    def conj(self, a):
        if self.tag == "Qi":
            return (a[0], -a[1])
        return a

    def is_zero(self, a) -> bool:
        if self.tag == "Qi":
            return a == (0, 0)
        return a == self.zero()

    def pythagoras_oracle(self, x, y):
        """Return z with x x* + y y* = z z*, or raise when none exists."""
        if self.tag != "Fp":
            raise NotImplementedError(
                f"{self.tag} is not *-pythagorean; no oracle available")
        target = (x * x + y * y) % self.p
        for z in range(self.p):
            if (z * z) % self.p == target:
                return z
        raise ArithmeticError(
            f"{target} is not a square in F_{self.p}: no z with "
            f"x*x + y*y = z*z")

    # -- text form ---------------------------------------------------------
    def to_str(self, a) -> str:
        if self.tag == "Qi":
            return f"{a[0]}{'+' if a[1] >= 0 else ''}{a[1]}i"
        return str(a)

    def from_str(self, s: str):
        s = s.strip()
        if self.tag == "Qi":
            if s.endswith("i"):
                body = s[:-1]
                split = max(body.rfind("+", 1), body.rfind("-", 1))
                if split <= 0:
                    return (Fraction(0), Fraction(body or "1"))
                return (Fraction(body[:split]), Fraction(body[split:] or "1"))
            return (Fraction(s), Fraction(0))
        if self.tag == "Fp":
            return int(s) % self.p
        return Fraction(s)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BaseStarField)
                and self.tag == other.tag and self.p == other.p)

    def __hash__(self) -> int:
        return hash((self.tag, self.p))

    def __repr__(self) -> str:
        return f"BaseStarField({self.tag!r})" if self.p is None else f"BaseStarField({self.tag!r}, {self.p})"


RATIONALS = BaseStarField("Q")
GAUSSIAN_RATIONALS = BaseStarField("Qi")


def prime_field(p: int) -> BaseStarField:
    return BaseStarField("Fp", p)


# ---------------------------------------------------------------------------
# graded *-fields (monomial)
# ---------------------------------------------------------------------------

class GradedStarField:
    """Monomial graded *-field: base field, grading group G, support H <= G.

    Component A_g for g in H is spanned by the cocycle unitary u_g; all other
    components vanish.  Covers trivially graded K, K[x^n, x^-n] (G = Z,
    H = nZ) and group algebras K[G] (H = G).
    """

    def __init__(self, base: BaseStarField, grading: FGAbelianGroup, support: Subgroup):
        if support.ambient != grading:
            raise ValueError("support subgroup must live in the grading group")
        self.base = base
        self.grading = grading
        self.support = support

    def has_component(self, gamma: Iterable[int]) -> bool:
        return self.support.contains(gamma)

    @classmethod
    def trivially_graded(cls, base: BaseStarField,
                         grading: Optional[FGAbelianGroup] = None) -> "GradedStarField":
        g = grading if grading is not None else FGAbelianGroup(0, ())
        return cls(base, g, Subgroup.trivial(g))

    @classmethod
    def laurent(cls, base: BaseStarField, n: int = 1) -> "GradedStarField":
        g = FGAbelianGroup(1, ())
        return cls(base, g, Subgroup(g, [(n,)]))

    @classmethod
    def group_algebra(cls, base: BaseStarField, grading: FGAbelianGroup) -> "GradedStarField":
        return cls(base, grading, Subgroup.full(grading))

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedStarField) and self.base == other.base
                and self.grading == other.grading and self.support == other.support)

    def __hash__(self) -> int:
        return hash((self.base, self.grading, self.support))

    def __repr__(self) -> str:
        return f"GradedStarField({self.base!r}, dim={self.grading.dim})"


class HomogeneousScalar:
    """A nonzero homogeneous field element: coefficient times u_degree."""

    __slots__ = ("field", "coeff", "degree")

    def __init__(self, field: GradedStarField, coeff, degree: Iterable[int]):
        deg = field.grading.reduce(degree)
        if not field.has_component(deg):
            raise ValueError(f"degree {deg} outside the field support")
        if field.base.is_zero(coeff):
            raise ValueError("zero coefficient; represent zero structurally")
        self.field = field
        self.coeff = coeff
        self.degree = deg

    def __mul__(self, other: "HomogeneousScalar") -> "HomogeneousScalar":
        return HomogeneousScalar(self.field,
                                 self.field.base.mul(self.coeff, other.coeff),
                                 self.field.grading.add(self.degree, other.degree))

    def star(self) -> "HomogeneousScalar":
        return HomogeneousScalar(self.field, self.field.base.conj(self.coeff),
                                 self.field.grading.neg(self.degree))

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomogeneousScalar) and self.field == other.field
                and self.coeff == other.coeff and self.degree == other.degree)

    def __repr__(self) -> str:
        return f"HomogeneousScalar({self.field.base.to_str(self.coeff)}, {self.degree})"


# ---------------------------------------------------------------------------
# graded matrices
# ---------------------------------------------------------------------------

class GradedMatrix:
    """Homogeneous rectangular matrix over a monomial graded *-field.

    The entry at (i, j) represents coeff * u_d with implied degree
    d = degree + col_shift[j] - row_shift[i]; construction rejects entries
    whose implied degree is outside the field support.
    """

    __slots__ = ("field", "row_shifts", "col_shifts", "degree", "entries")

    def __init__(self, field: GradedStarField, row_shifts: Sequence[Coords],
                 col_shifts: Sequence[Coords], degree: Iterable[int],
                 entries: Dict[Tuple[int, int], object]):
        g = field.grading
        self.field = field
        self.row_shifts = tuple(g.reduce(s) for s in row_shifts)
        self.col_shifts = tuple(g.reduce(s) for s in col_shifts)
        self.degree = g.reduce(degree)
        clean: Dict[Tuple[int, int], object] = {}
        for (i, j), c in entries.items():
            if field.base.is_zero(c):
                continue
            if not (0 <= i < len(self.row_shifts) and 0 <= j < len(self.col_shifts)):
                raise IndexError(f"entry position {(i, j)} out of range")
            if not field.has_component(self.entry_degree(i, j)):
                raise ValueError(
                    f"entry at {(i, j)} has degree {self.entry_degree(i, j)} "
                    f"outside the field support")
            clean[(i, j)] = c
        self.entries = clean

    @property
    def nrows(self) -> int:
        return len(self.row_shifts)

    @property
    def ncols(self) -> int:
        return len(self.col_shifts)

    def entry_degree(self, i: int, j: int) -> Coords:
        g = self.field.grading
        return g.add(self.degree, g.sub(self.col_shifts[j], self.row_shifts[i]))

    def entry_scalar(self, i: int, j: int) -> Optional[HomogeneousScalar]:
        c = self.entries.get((i, j))
        if c is None:
            return None
        return HomogeneousScalar(self.field, c, self.entry_degree(i, j))

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, field: GradedStarField, row_shifts, col_shifts, degree) -> "GradedMatrix":
        return cls(field, row_shifts, col_shifts, degree, {})

    @classmethod
    def identity(cls, field: GradedStarField, shifts) -> "GradedMatrix":
        n = len(shifts)
        one = field.base.one()
        return cls(field, shifts, shifts, field.grading.zero(),
                   {(i, i): one for i in range(n)})

    # -- arithmetic -------------------------------------------------------
    def _same_shape(self, other: "GradedMatrix") -> None:
        if (self.field != other.field or self.row_shifts != other.row_shifts
                or self.col_shifts != other.col_shifts or self.degree != other.degree):
            raise ValueError("matrix shape/degree mismatch")

    def __add__(self, other: "GradedMatrix") -> "GradedMatrix":
        self._same_shape(other)
        base = self.field.base
        entries = dict(self.entries)
        for pos, c in other.entries.items():
            entries[pos] = base.add(entries.get(pos, base.zero()), c)
        return GradedMatrix(self.field, self.row_shifts, self.col_shifts,
                            self.degree, entries)

    def __neg__(self) -> "GradedMatrix":
        base = self.field.base
        return GradedMatrix(self.field, self.row_shifts, self.col_shifts, self.degree,
                            {pos: base.neg(c) for pos, c in self.entries.items()})

    def __sub__(self, other: "GradedMatrix") -> "GradedMatrix":
        return self + (-other)

    def __mul__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.field != other.field or self.col_shifts != other.row_shifts:
            raise ValueError("matrix product shift mismatch")
        base = self.field.base
        entries: Dict[Tuple[int, int], object] = {}
        by_row: Dict[int, List[Tuple[int, object]]] = {}
        for (k, j), c in other.entries.items():
            by_row.setdefault(k, []).append((j, c))
        for (i, k), c1 in self.entries.items():
            for j, c2 in by_row.get(k, ()):
                pos = (i, j)
                prod = base.mul(c1, c2)
                entries[pos] = base.add(entries.get(pos, base.zero()), prod)
        degree = self.field.grading.add(self.degree, other.degree)
        return GradedMatrix(self.field, self.row_shifts, other.col_shifts,
                            degree, entries)

    def star(self) -> "GradedMatrix":
        base = self.field.base
        return GradedMatrix(self.field, self.col_shifts, self.row_shifts,
                            self.field.grading.neg(self.degree),
                            {(j, i): base.conj(c) for (i, j), c in self.entries.items()})

    def scale(self, scalar: HomogeneousScalar) -> "GradedMatrix":
        """Left multiplication by a homogeneous scalar."""
        base = self.field.base
        degree = self.field.grading.add(scalar.degree, self.degree)
        return GradedMatrix(self.field, self.row_shifts, self.col_shifts, degree,
                            {pos: base.mul(scalar.coeff, c)
                             for pos, c in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def is_monomial(self) -> bool:
        rows = set()
        cols = set()
        for i, j in self.entries:
            if i in rows or j in cols:
                return False
            rows.add(i)
            cols.add(j)
        return True

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMatrix) and self.field == other.field
                and self.row_shifts == other.row_shifts
                and self.col_shifts == other.col_shifts
                and self.degree == other.degree and self.entries == other.entries)

    def __repr__(self) -> str:
        return (f"GradedMatrix({self.nrows}x{self.ncols}, deg={self.degree}, "
                f"{len(self.entries)} entries)")


def star_transpose(m: GradedMatrix) -> GradedMatrix:
    return m.star()


def tensor_embed(x: GradedMatrix, k: int, alpha: Iterable[int]) -> GradedMatrix:
    """x |-> x (tensor) 1_k with column twist alpha.

    Entry x_ij lands at positions (i*k + s, j*k + s) for s = 0..k-1; the
    target shift vector is ((g_1 - alpha)^k, ..., (g_n - alpha)^k).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if x.row_shifts != x.col_shifts:
        raise ValueError("tensor_embed expects a square matrix over one shift vector")
    g = x.field.grading
    a = g.reduce(alpha)
    shifts = tuple(g.sub(s, a) for s in x.row_shifts for _ in range(k))
    entries = {}
    for (i, j), c in x.entries.items():
        for s in range(k):
            entries[(i * k + s, j * k + s)] = c
    return GradedMatrix(x.field, shifts, shifts, x.degree, entries)


# ---------------------------------------------------------------------------
# matricial algebras and their elements
# ---------------------------------------------------------------------------

class MatricialAlgebra:
    """Finite direct sum of graded matrix blocks M_{p(i)}(A)(shifts^i)."""

    def __init__(self, field: GradedStarField, blocks: Sequence[Tuple[int, Sequence]]):
        self.field = field
        blks = []
        for size, shifts in blocks:
            if size < 1:
                raise ValueError("block sizes must be >= 1")
            shifts = tuple(field.grading.reduce(s if not isinstance(s, int) else (s,))
                           for s in shifts)
            if len(shifts) != size:
                raise ValueError("shift vector length must equal block size")
            blks.append((size, shifts))
        self.blocks = tuple(blks)

    @property
    def nblocks(self) -> int:
        return len(self.blocks)

    def block_size(self, i: int) -> int:
        return self.blocks[i][0]

    def block_shifts(self, i: int) -> Tuple[Coords, ...]:
        return self.blocks[i][1]

    def zero(self) -> "MatricialElement":
        return MatricialElement(self, {})

    def one(self) -> "MatricialElement":
        parts = {self.field.grading.zero(): {
            i: GradedMatrix.identity(self.field, self.block_shifts(i))
            for i in range(self.nblocks)}}
        return MatricialElement(self, parts)

    def matrix_unit(self, i: int, k: int, l: int) -> "MatricialElement":
        """The element e^i_{kl}, of degree shift_k - shift_l."""
        shifts = self.block_shifts(i)
        if not (0 <= k < len(shifts) and 0 <= l < len(shifts)):
            raise IndexError("matrix unit index out of range")
        g = self.field.grading
        degree = g.sub(shifts[k], shifts[l])
        m = GradedMatrix(self.field, shifts, shifts, degree,
                         {(k, l): self.field.base.one()})
        return MatricialElement(self, {degree: {i: m}})

    def matrix_units(self):
        """Iterate (i, k, l) over all matrix unit indices."""
        for i in range(self.nblocks):
            p = self.block_size(i)
            for k in range(p):
                for l in range(p):
                    yield (i, k, l)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatricialAlgebra) and self.field == other.field
                and self.blocks == other.blocks)

    def __hash__(self) -> int:
        return hash((self.field, self.blocks))

    def __repr__(self) -> str:
        return f"MatricialAlgebra({[s for s, _ in self.blocks]})"


def matrix_unit(algebra: MatricialAlgebra, i: int, k: int, l: int) -> "MatricialElement":
    return algebra.matrix_unit(i, k, l)


class MatricialElement:
    """Element of a matricial algebra: finite degree-indexed sum of blocks.

    parts maps a degree to a sparse {block index: GradedMatrix} dict; zero
    matrices and empty degrees are dropped on construction.
    """

    __slots__ = ("algebra", "parts")

    def __init__(self, algebra: MatricialAlgebra,
                 parts: Dict[Coords, Dict[int, GradedMatrix]]):
        self.algebra = algebra
        clean: Dict[Coords, Dict[int, GradedMatrix]] = {}
        for degree, blocks in parts.items():
            degree = algebra.field.grading.reduce(degree)
            keep = {}
            for i, m in blocks.items():
                if m.is_zero():
                    continue
                if (m.row_shifts != algebra.block_shifts(i)
                        or m.col_shifts != algebra.block_shifts(i)
                        or m.degree != degree):
                    raise ValueError("block matrix does not fit the algebra")
                keep[i] = m
            if keep:
                clean[degree] = keep
        self.parts = clean

    def block(self, degree, i: int) -> GradedMatrix:
        degree = self.algebra.field.grading.reduce(degree)
        blocks = self.parts.get(degree, {})
        if i in blocks:
            return blocks[i]
        return GradedMatrix.zero(self.algebra.field, self.algebra.block_shifts(i),
                                 self.algebra.block_shifts(i), degree)

    def degrees(self) -> List[Coords]:
        return sorted(self.parts)

    def is_zero(self) -> bool:
        return not self.parts

    def is_homogeneous(self) -> bool:
        return len(self.parts) <= 1

    def homogeneous_degree(self) -> Optional[Coords]:
        """Degree of a nonzero homogeneous element, else None."""
        if len(self.parts) == 1:
            return next(iter(self.parts))
        return None

    def _check(self, other: "MatricialElement") -> None:
        if self.algebra != other.algebra:
            raise ValueError("elements of different algebras")

    def __add__(self, other: "MatricialElement") -> "MatricialElement":
        self._check(other)
        parts: Dict[Coords, Dict[int, GradedMatrix]] = {
            d: dict(bs) for d, bs in self.parts.items()}
        for d, bs in other.parts.items():
            tgt = parts.setdefault(d, {})
            for i, m in bs.items():
                tgt[i] = tgt[i] + m if i in tgt else m
        return MatricialElement(self.algebra, parts)

    def __neg__(self) -> "MatricialElement":
        return MatricialElement(self.algebra, {
            d: {i: -m for i, m in bs.items()} for d, bs in self.parts.items()})

    def __sub__(self, other: "MatricialElement") -> "MatricialElement":
        return self + (-other)

    def __mul__(self, other: "MatricialElement") -> "MatricialElement":
        self._check(other)
        g = self.algebra.field.grading
        parts: Dict[Coords, Dict[int, GradedMatrix]] = {}
        for d1, bs1 in self.parts.items():
            for d2, bs2 in other.parts.items():
                d = g.add(d1, d2)
                tgt = parts.setdefault(d, {})
                for i, m1 in bs1.items():
                    if i in bs2:
                        prod = m1 * bs2[i]
                        tgt[i] = tgt[i] + prod if i in tgt else prod
        return MatricialElement(self.algebra, parts)

    def star(self) -> "MatricialElement":
        g = self.algebra.field.grading
        return MatricialElement(self.algebra, {
            g.neg(d): {i: m.star() for i, m in bs.items()}
            for d, bs in self.parts.items()})

    def scalar_mul(self, scalar: HomogeneousScalar) -> "MatricialElement":
        parts: Dict[Coords, Dict[int, GradedMatrix]] = {}
        for d, bs in self.parts.items():
            scaled = {i: m.scale(scalar) for i, m in bs.items()}
            parts[next(iter(scaled.values())).degree] = scaled
        return MatricialElement(self.algebra, parts)

    def int_mul(self, n: int) -> "MatricialElement":
        if n == 0:
            return self.algebra.zero()
        coeff = self.algebra.field.base.coerce(n)
        out = self.algebra.zero()
        base = self.algebra.field.base
        for d, bs in self.parts.items():
            part = {i: GradedMatrix(m.field, m.row_shifts, m.col_shifts, m.degree,
                                    {pos: base.mul(coeff, c)
                                     for pos, c in m.entries.items()})
                    for i, m in bs.items()}
            out = out + MatricialElement(self.algebra, {d: part})
        return out

    def is_monomial(self) -> bool:
        """At most one nonzero entry per row and column across all degrees."""
        for i in range(self.algebra.nblocks):
            rows, cols = set(), set()
            for d, bs in self.parts.items():
                m = bs.get(i)
                if m is None:
                    continue
                for r, c in m.entries:
                    if r in rows or c in cols:
                        return False
                    rows.add(r)
                    cols.add(c)
        return True

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatricialElement)
                and self.algebra == other.algebra and self.parts == other.parts)

    def __repr__(self) -> str:
        return f"MatricialElement({len(self.parts)} degrees)"


# ---------------------------------------------------------------------------
# structural isomorphisms of single blocks
# ---------------------------------------------------------------------------

class BlockIso:
    """A structural graded *-isomorphism of single matrix blocks."""

    def __init__(self, field: GradedStarField, source_shifts, target_shifts, apply_fn):
        self.field = field
        self.source_shifts = tuple(source_shifts)
        self.target_shifts = tuple(target_shifts)
        self._apply = apply_fn

    def apply(self, m: GradedMatrix) -> GradedMatrix:
        if m.row_shifts != self.source_shifts or m.col_shifts != self.source_shifts:
            raise ValueError("matrix does not match the iso's source shifts")
        return self._apply(m)

    def to_star_map(self) -> "StarAlgebraMap":
        src = MatricialAlgebra(self.field, [(len(self.source_shifts), self.source_shifts)])
        tgt = MatricialAlgebra(self.field, [(len(self.target_shifts), self.target_shifts)])
        images = {}
        for (i, k, l) in src.matrix_units():
            m = src.matrix_unit(i, k, l).block(
                src.field.grading.sub(self.source_shifts[k], self.source_shifts[l]), 0)
            out = self.apply(m)
            images[(i, k, l)] = MatricialElement(tgt, {out.degree: {0: out}})
        return StarAlgebraMap(src, tgt, images)


def permute_shift_iso(field: GradedStarField, shifts: Sequence, pi: Sequence[int],
                      delta: Iterable[int] = ()) -> BlockIso:
    """Conjugation by the permutation matrix P_pi, plus a global shift delta.

    pi is given in one-line notation on 0-based indices: target row a holds
    what source row pi[a] held, and target shift a is shifts[pi[a]] + delta.
    """
    g = field.grading
    shifts = tuple(g.reduce(s if not isinstance(s, int) else (s,)) for s in shifts)
    n = len(shifts)
    if sorted(pi) != list(range(n)):
        raise ValueError("pi is not a permutation of the block indices")
    d = g.reduce(delta) if delta != () else g.zero()
    target = tuple(g.add(shifts[pi[a]], d) for a in range(n))

    def apply_fn(m: GradedMatrix) -> GradedMatrix:
        entries = {}
        for a in range(n):
            for b in range(n):
                c = m.entries.get((pi[a], pi[b]))
                if c is not None:
                    entries[(a, b)] = c
        return GradedMatrix(field, target, target, m.degree, entries)

    return BlockIso(field, shifts, target, apply_fn)


def unitary_twist_iso(field: GradedStarField, shifts: Sequence,
                      deltas: Sequence) -> BlockIso:
    """Conjugation by diag(u_{d_1}, ..., u_{d_n}); target shifts g_i + d_i.

    Every d_i must lie in the field support so the cocycle unitary exists.
    Coefficients are untouched: the twist only rebases the degree bookkeeping.
    """
    g = field.grading
    shifts = tuple(g.reduce(s if not isinstance(s, int) else (s,)) for s in shifts)
    ds = tuple(g.reduce(d if not isinstance(d, int) else (d,)) for d in deltas)
    if len(ds) != len(shifts):
        raise ValueError("need one twist degree per row")
    for d in ds:
        if not field.has_component(d):
            raise ValueError(f"twist degree {d} outside the field support")
    target = tuple(g.add(s, d) for s, d in zip(shifts, ds))

    def apply_fn(m: GradedMatrix) -> GradedMatrix:
        return GradedMatrix(field, target, target, m.degree, dict(m.entries))

    return BlockIso(field, shifts, target, apply_fn)


# ---------------------------------------------------------------------------
# *-algebra maps determined on matrix units
# ---------------------------------------------------------------------------

class StarAlgebraMap:
    """Linear *-map between matricial algebras given on all matrix units."""

    def __init__(self, source: MatricialAlgebra, target: MatricialAlgebra,
                 images: Dict[Tuple[int, int, int], MatricialElement]):
        self.source = source
        self.target = target
        self.images = images
        for key in source.matrix_units():
            if key not in images:
                raise ValueError(f"missing image for matrix unit {key}")

    @classmethod
    def identity(cls, algebra: MatricialAlgebra) -> "StarAlgebraMap":
        return cls(algebra, algebra,
                   {key: algebra.matrix_unit(*key) for key in algebra.matrix_units()})

    def apply(self, x: MatricialElement) -> "MatricialElement":
        if x.algebra != self.source:
            raise ValueError("element not in the map's source algebra")
        out = self.target.zero()
        field = self.source.field
        for d, bs in x.parts.items():
            for i, m in bs.items():
                for (k, l), c in m.entries.items():
                    scalar = HomogeneousScalar(field, c, m.entry_degree(k, l))
                    out = out + self.images[(i, k, l)].scalar_mul(scalar)
        return out

    def compose(self, inner: "StarAlgebraMap") -> "StarAlgebraMap":
        """self after inner."""
        if inner.target != self.source:
            raise ValueError("maps not composable")
        return StarAlgebraMap(inner.source, self.target,
                              {key: self.apply(img) for key, img in inner.images.items()})

    def conjugate(self, u: MatricialElement) -> "StarAlgebraMap":
        """The map r |-> u * self(r) * u^*."""
        ustar = u.star()
        return StarAlgebraMap(self.source, self.target,
                              {key: u * img * ustar for key, img in self.images.items()})

    def image_of_one(self) -> MatricialElement:
        out = self.target.zero()
        for i in range(self.source.nblocks):
            for k in range(self.source.block_size(i)):
                out = out + self.images[(i, k, k)]
        return out

    def is_unital(self) -> bool:
        return self.image_of_one() == self.target.one()

    def __eq__(self, other) -> bool:
        return (isinstance(other, StarAlgebraMap) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def __repr__(self) -> str:
        return f"StarAlgebraMap({self.source!r} -> {self.target!r})"


def verify_graded_star_hom(h: StarAlgebraMap, check_unital: bool = False) -> List[str]:
    """Check h is a graded *-homomorphism; return a list of violations."""
    violations: List[str] = []
    src = h.source
    g = src.field.grading
    zero = src.field.grading.zero  # noqa: F841  (readability)
    units = list(src.matrix_units())
    for (i, k, l) in units:
        img = h.images[(i, k, l)]
        expected = g.sub(src.block_shifts(i)[k], src.block_shifts(i)[l])
        if not img.is_zero():
            d = img.homogeneous_degree()
            if d is None or d != expected:
                violations.append(
                    f"degree: image of e[{i}][{k}{l}] is not homogeneous of degree {expected}")
    for (i, k, l) in units:
        for (i2, m, n) in units:
            lhs = h.images[(i, k, l)] * h.images[(i2, m, n)]
            if i == i2 and l == m:
                rhs = h.images[(i, k, n)]
            else:
                rhs = h.target.zero()
            if lhs != rhs:
                violations.append(
                    f"multiplicativity: e[{i}][{k}{l}] * e[{i2}][{m}{n}]")
    for (i, k, l) in units:
        if h.images[(i, k, l)].star() != h.images[(i, l, k)]:
            violations.append(f"involution: e[{i}][{k}{l}]* != image of e[{i}][{l}{k}]")
    if check_unital and not h.is_unital():
        violations.append("unitality: image of 1 is not 1")
    return violations
