"""Exact arithmetic for finitely generated abelian grading groups.

A grading group is presented as Z^r + Z/d_1 + ... + Z/d_s; elements are
integer tuples of length r + s with each torsion coordinate reduced into
[0, d_i).  Subgroups carry a column Hermite basis over Z (torsion-aware),
which makes coset representatives canonical and membership exact.  On top
of that sit the group rings Z[G] and Z[G/H] with convolution product.
"""

from __future__ import annotations

import re
from fractions import Fraction  # noqa: F401  (re-exported convenience)
from typing import Dict, Iterable, List, Sequence, Tuple

Coords = Tuple[int, ...]


def _egcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, u, v) with u*a + v*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_u, u = u, old_u - q * u
        old_v, v = v, old_v - q * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


class FGAbelianGroup:
    """Finitely generated abelian group Z^free_rank + sum of Z/d_i."""

    def __init__(self, free_rank: int = 0, torsion_moduli: Sequence[int] = ()):
        if free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        if any(d < 2 for d in torsion_moduli):
            raise ValueError("torsion moduli must be >= 2")
        self.free_rank = free_rank
        self.torsion_moduli = tuple(torsion_moduli)
        self.dim = free_rank + len(self.torsion_moduli)

    def reduce(self, coords: Iterable[int]) -> Coords:
        c = tuple(coords)
        if len(c) != self.dim:
            raise ValueError(
                f"element of length {len(c)} does not fit group of dim {self.dim}")
        free = c[:self.free_rank]
        tors = tuple(x % d for x, d in zip(c[self.free_rank:], self.torsion_moduli))
        return free + tors

    def element(self, *coords) -> Coords:
        """Coerce ints / iterables into a reduced element tuple."""
        if len(coords) == 1 and not isinstance(coords[0], int):
            coords = tuple(coords[0])
        return self.reduce(coords)

    def zero(self) -> Coords:
        return (0,) * self.dim

    def add(self, a: Coords, b: Coords) -> Coords:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a: Coords) -> Coords:
        return self.reduce(-x for x in a)

    def sub(self, a: Coords, b: Coords) -> Coords:
        return self.reduce(x - y for x, y in zip(a, b))

    def scale(self, n: int, a: Coords) -> Coords:
        return self.reduce(n * x for x in a)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FGAbelianGroup)
                and self.free_rank == other.free_rank
                and self.torsion_moduli == other.torsion_moduli)

    def __hash__(self) -> int:
        return hash((self.free_rank, self.torsion_moduli))

    def __repr__(self) -> str:
        return f"FGAbelianGroup({self.free_rank}, {list(self.torsion_moduli)})"


def _column_hermite(columns: List[List[int]], dim: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """Column Hermite form of the integer lattice spanned by `columns`.

    Returns a list of (pivot_row, column) with pivot rows strictly
    increasing, positive pivots, and earlier... later columns' entries in
    pivot rows reduced into [0, pivot).  The result depends only on the
    lattice, so it is a canonical basis.
    """
    work = [list(c) for c in columns if any(c)]
    basis: List[Tuple[int, List[int]]] = []
    for row in range(dim):
        active = [c for c in work if c[row] != 0]
        rest = [c for c in work if c[row] == 0]
        if not active:
            work = rest
            continue
        col = active[0]
        for other in active[1:]:
            a, b = col[row], other[row]
            g, u, v = _egcd(a, b)
            merged = [u * x + v * y for x, y in zip(col, other)]
            cleared = [(-b // g) * x + (a // g) * y for x, y in zip(col, other)]
            col = merged
            if any(cleared):
                rest.append(cleared)
        if col[row] < 0:
            col = [-x for x in col]
        basis.append((row, col))
        work = rest
    # Reduce entries of earlier basis columns in later pivot rows so the
    # form is unique (Hermite condition).
    for idx, (row, col) in enumerate(basis):
        p = col[row]
        for jdx in range(idx):
            other = basis[jdx][1]
            q = other[row] // p
            if q:
                basis[jdx] = (basis[jdx][0],
                              [x - q * y for x, y in zip(other, col)])
    return [(row, tuple(col)) for row, col in basis]


class Subgroup:
    """Subgroup of an FGAbelianGroup given by generators (torsion-aware)."""

    def __init__(self, ambient: FGAbelianGroup, generators: Sequence[Iterable[int]]):
        self.ambient = ambient
        self.generators = tuple(ambient.reduce(g) for g in generators)
        cols = [list(g) for g in self.generators]
        for j, d in enumerate(ambient.torsion_moduli):
            rel = [0] * ambient.dim
            rel[ambient.free_rank + j] = d
            cols.append(rel)
        self.reduced_basis = tuple(_column_hermite(cols, ambient.dim))

    def reduce(self, coords: Iterable[int]) -> Coords:
        """Canonical coset representative of coords modulo this subgroup."""
        v = list(self.ambient.reduce(coords))
        for row, col in self.reduced_basis:
            q = v[row] // col[row]
            if q:
                v = [x - q * y for x, y in zip(v, col)]
        return tuple(v)

    def contains(self, coords: Iterable[int]) -> bool:
        return self.reduce(coords) == self.ambient.zero()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subgroup)
                and self.ambient == other.ambient
                and self.reduced_basis == other.reduced_basis)

    def __hash__(self) -> int:
        return hash((self.ambient, self.reduced_basis))

    def __repr__(self) -> str:
        return f"Subgroup({self.ambient!r}, {list(self.generators)})"

    @classmethod
    def trivial(cls, ambient: FGAbelianGroup) -> "Subgroup":
        return cls(ambient, [])

    @classmethod
    def full(cls, ambient: FGAbelianGroup) -> "Subgroup":
        gens = []
        for k in range(ambient.dim):
            e = [0] * ambient.dim
            e[k] = 1
            gens.append(e)
        return cls(ambient, gens)


def subgroup_member(gamma: Iterable[int], sub: Subgroup) -> bool:
    """True iff gamma is an integer combination of sub's generators."""
    return sub.contains(gamma)


class Coset:
    """A coset gamma + H with canonical representative."""

    __slots__ = ("subgroup", "rep")

    def __init__(self, subgroup: Subgroup, coords: Iterable[int]):
        self.subgroup = subgroup
        self.rep = subgroup.reduce(coords)

    def __add__(self, other: "Coset") -> "Coset":
        self._check(other)
        return Coset(self.subgroup, self.subgroup.ambient.add(self.rep, other.rep))

    def __neg__(self) -> "Coset":
        return Coset(self.subgroup, self.subgroup.ambient.neg(self.rep))

    def __sub__(self, other: "Coset") -> "Coset":
        return self + (-other)

    def _check(self, other: "Coset") -> None:
        if self.subgroup != other.subgroup:
            raise ValueError("cosets live in different quotient groups")

    def is_zero(self) -> bool:
        return self.rep == self.subgroup.ambient.zero()

    def __eq__(self, other) -> bool:
        return (isinstance(other, Coset) and self.subgroup == other.subgroup
                and self.rep == other.rep)

    def __hash__(self) -> int:
        return hash((self.subgroup, self.rep))

    def __repr__(self) -> str:
        return f"Coset{self.rep}"


def coset_reduce(gamma: Iterable[int], sub: Subgroup) -> Coset:
    return Coset(sub, gamma)


def _format_rep(rep: Coords) -> str:
    if len(rep) == 0:
        return "0"
    if len(rep) == 1:
        return str(rep[0])
    return "(" + ",".join(str(x) for x in rep) + ")"


_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*(?P<coeff>\d+)\s*
        (?:\*\s*\[\s*(?P<rep>[^\]]*)\s*\])?\s*""",
    re.VERBOSE,
)


class GroupRingElem:
    """Element of Z[G/H]: finite integer combination of cosets.

    Use a trivial subgroup H = 0 for the plain group ring Z[G].  Terms are
    keyed by canonical representatives; zero coefficients are never stored.
    """

    __slots__ = ("subgroup", "terms")

    def __init__(self, subgroup: Subgroup, terms: Dict[Coords, int] | None = None):
        self.subgroup = subgroup
        clean: Dict[Coords, int] = {}
        for rep, coeff in (terms or {}).items():
            if coeff == 0:
                continue
            key = subgroup.reduce(rep)
            clean[key] = clean.get(key, 0) + coeff
            if clean[key] == 0:
                del clean[key]
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, subgroup: Subgroup) -> "GroupRingElem":
        return cls(subgroup, {})

    @classmethod
    def one(cls, subgroup: Subgroup) -> "GroupRingElem":
        return cls(subgroup, {subgroup.ambient.zero(): 1})

    @classmethod
    def monomial(cls, subgroup: Subgroup, gamma: Iterable[int], coeff: int = 1) -> "GroupRingElem":
        return cls(subgroup, {tuple(gamma): coeff})

    # -- ring structure -----------------------------------------------
    def _check(self, other: "GroupRingElem") -> None:
        if self.subgroup != other.subgroup:
            raise ValueError("group ring elements over different coset spaces")

    def __add__(self, other: "GroupRingElem") -> "GroupRingElem":
        self._check(other)
        terms = dict(self.terms)
        for rep, c in other.terms.items():
            terms[rep] = terms.get(rep, 0) + c
        return GroupRingElem(self.subgroup, terms)

    def __neg__(self) -> "GroupRingElem":
        return GroupRingElem(self.subgroup, {r: -c for r, c in self.terms.items()})

    def __sub__(self, other: "GroupRingElem") -> "GroupRingElem":
        return self + (-other)

    def __mul__(self, other) -> "GroupRingElem":
        if isinstance(other, int):
            return GroupRingElem(self.subgroup,
                                 {r: c * other for r, c in self.terms.items()})
        self._check(other)
        add = self.subgroup.ambient.add
        terms: Dict[Coords, int] = {}
        for r1, c1 in self.terms.items():
            for r2, c2 in other.terms.items():
                key = self.subgroup.reduce(add(r1, r2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return GroupRingElem(self.subgroup, terms)

    __rmul__ = __mul__

    def act(self, gamma: Iterable[int]) -> "GroupRingElem":
        """Multiply by the coset of gamma (the Z[G]-module action)."""
        g = self.subgroup.ambient.reduce(gamma)
        add = self.subgroup.ambient.add
        return GroupRingElem(self.subgroup,
                             {add(r, g): c for r, c in self.terms.items()})

    # -- queries --------------------------------------------------------
    def coefficient(self, gamma: Iterable[int]) -> int:
        return self.terms.get(self.subgroup.reduce(gamma), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_nonneg(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    def total(self) -> int:
        """Sum of all coefficients (augmentation)."""
        return sum(self.terms.values())

    def sorted_terms(self) -> List[Tuple[Coords, int]]:
        return sorted(self.terms.items())

    def __eq__(self, other) -> bool:
        return (isinstance(other, GroupRingElem)
                and self.subgroup == other.subgroup
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.subgroup, tuple(self.sorted_terms())))

    # -- text form -------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for rep, coeff in self.sorted_terms():
            body = f"{abs(coeff)}*[{_format_rep(rep)}]"
            if not parts:
                parts.append(body if coeff > 0 else "-" + body)
            else:
                parts.append(("+ " if coeff > 0 else "- ") + body)
        return " ".join(parts)

    __repr__ = __str__

    @classmethod
    def parse(cls, subgroup: Subgroup, text: str) -> "GroupRingElem":
        """Parse the sum-of-terms grammar, e.g. "2*[0] + 1*[(1,2)]"."""
        text = text.strip()
        if text in ("", "0"):
            return cls.zero(subgroup)
        terms: Dict[Coords, int] = {}
        pos = 0
        first = True
        while pos < len(text):
            m = _TERM_RE.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse group ring element at: {text[pos:]!r}")
            sign = -1 if m.group("sign") == "-" else 1
            if m.group("sign") is None and not first:
                raise ValueError(f"missing +/- between terms in {text!r}")
            coeff = sign * int(m.group("coeff"))
            rep_text = m.group("rep")
            if rep_text is None:
                rep = subgroup.ambient.zero()
            else:
                rep_text = rep_text.strip().strip("()")
                if rep_text == "":
                    rep = subgroup.ambient.zero()
                else:
                    rep = tuple(int(x) for x in rep_text.split(","))
                if subgroup.ambient.dim == 0:
                    if any(rep):
                        raise ValueError("nonzero representative in trivial group")
                    rep = ()
            key = subgroup.reduce(rep)
            terms[key] = terms.get(key, 0) + coeff
            pos = m.end()
            first = False
        return cls(subgroup, terms)


def ring_mul(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    return a * b


def act(gamma: Iterable[int], a: GroupRingElem) -> GroupRingElem:
    return a.act(gamma)
