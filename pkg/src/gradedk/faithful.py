"""Unitary intertwiners between graded *-homomorphisms with equal K0 data.

Two monomial degree-zero projections with the same K0 class are *-equivalent
via a monomial partial isometry: both are 0/1 diagonals, and within every
block the diagonal supports decompose into shift-coset classes of equal
sizes, so matching the positions coset by coset (ascending) gives x with
x x* = g and x* x = h whose entries are cocycle unitaries.  Summing the
translates phi(e^i_k1) x_i psi(e^i_1k) of the corner intertwiners produces
x with x x* = phi(1), x* x = psi(1) and x psi(a) = phi(a) x; adding the
analogous partial isometry between the complements 1 - phi(1) and
1 - psi(1) completes x to a degree-zero unitary u with phi = Ad(u) o psi.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .grading import Coords
from .gralg import GradedMatrix, MatricialAlgebra, MatricialElement
from .k0gr import class_of_projection
from .fullsynth import k0_of_hom


class FaithfulnessError(Exception):
    pass


class ClassMismatch(FaithfulnessError):
    """The two projections have different K0 classes."""


class KHomMismatch(FaithfulnessError):
    """The two homomorphisms induce different K0 matrices."""


class ComplementClassMismatch(FaithfulnessError):
    """1 - phi(1) and 1 - psi(1) have different K0 classes."""


class NonMonomial(FaithfulnessError):
    """Input is not monomial; the general case needs a pythagoras oracle."""


def _diagonal_support(p: MatricialElement) -> Dict[int, List[int]]:
    """Diagonal support positions per block of a monomial degree-0 projection."""
    alg = p.algebra
    g = alg.field.grading
    if not p.is_monomial():
        raise NonMonomial("projection is not monomial")
    try:
        class_of_projection(p)  # validates projection/degree/diagonal shape
    except ValueError as exc:
        raise FaithfulnessError(str(exc)) from exc
    support: Dict[int, List[int]] = {}
    for i, m in p.parts.get(g.zero(), {}).items():
        support[i] = sorted(r for (r, _c) in m.entries)
    return support


def projection_star_equivalence(g: MatricialElement,
                                h: MatricialElement) -> MatricialElement:
    """A monomial partial isometry x with x x* = g and x* x = h.

    Requires g, h monomial degree-0 projections in the same algebra with
    equal K0 classes.  Within each block, positions are matched by equal
    shift coset in ascending order; entry (r, c) carries the cocycle
    unitary of degree shift_c - shift_r.
    """
    alg = g.algebra
    if h.algebra != alg:
        raise FaithfulnessError("projections live in different algebras")
    supp_g = _diagonal_support(g)
    supp_h = _diagonal_support(h)
    if class_of_projection(g) != class_of_projection(h):
        raise ClassMismatch("projections have different K0 classes")
    grading = alg.field.grading
    sub = alg.field.support
    zero = grading.zero()
    one = alg.field.base.one()
    blocks: Dict[int, GradedMatrix] = {}
    for i in set(supp_g) | set(supp_h):
        shifts = alg.block_shifts(i)
        by_coset_g: Dict[Coords, List[int]] = {}
        for r in supp_g.get(i, []):
            by_coset_g.setdefault(sub.reduce(shifts[r]), []).append(r)
        by_coset_h: Dict[Coords, List[int]] = {}
        for c in supp_h.get(i, []):
            by_coset_h.setdefault(sub.reduce(shifts[c]), []).append(c)
        entries = {}
        for key, rows in by_coset_g.items():
            cols = by_coset_h.get(key, [])
            if len(rows) != len(cols):
                raise AssertionError(
                    "equal K0 classes must have matching coset counts")
            for r, c in zip(rows, cols):
                entries[(r, c)] = one
        if set(by_coset_h) - set(by_coset_g):
            raise AssertionError(
                "equal K0 classes must have matching coset counts")
        if entries:
            blocks[i] = GradedMatrix(alg.field, shifts, shifts, zero, entries)
    return MatricialElement(alg, {zero: blocks} if blocks else {})


def build_intertwiner(phi, psi) -> MatricialElement:
    """x with x x* = phi(1), x* x = psi(1), and x psi(a) = phi(a) x.

    phi and psi are graded *-homomorphisms (StarAlgebraMap or GradedHomSpec)
    with the same source and target and equal K0 matrices.
    """
    if phi.source != psi.source or phi.target != psi.target:
        raise FaithfulnessError("homomorphisms must share source and target")
    if k0_of_hom(phi) != k0_of_hom(psi):
        raise KHomMismatch("homomorphisms induce different K0 matrices")
    R = phi.source
    target = phi.target
    x = target.zero()
    for i in range(R.nblocks):
        gi = phi.apply(R.matrix_unit(i, 0, 0))
        hi = psi.apply(R.matrix_unit(i, 0, 0))
        xi = projection_star_equivalence(gi, hi)
        for k in range(R.block_size(i)):
            x = x + phi.apply(R.matrix_unit(i, k, 0)) * xi \
                * psi.apply(R.matrix_unit(i, 0, k))
    return x


def unitary_completion(phi, psi) -> MatricialElement:
    """A degree-zero unitary u with phi(a) = u psi(a) u* for all a.

    Completes the partial intertwiner with a partial isometry between the
    complements 1 - phi(1) and 1 - psi(1), which must have equal K0 classes.
    """
    x = build_intertwiner(phi, psi)
    target = phi.target
    p = target.one() - phi.apply(phi.source.one())
    q = target.one() - psi.apply(psi.source.one())
    if class_of_projection(p) != class_of_projection(q):
        raise ComplementClassMismatch(
            "complements of the images of 1 have different K0 classes")
    y = projection_star_equivalence(p, q)
    return x + y


def verify_conjugation(phi, psi, u: MatricialElement) -> List[str]:
    """Check that u is a degree-zero unitary with phi = Ad(u) o psi.

    Returns a list of violation descriptions; empty means verified.
    """
    violations: List[str] = []
    target = phi.target
    g = target.field.grading
    if not u.is_zero() and (not u.is_homogeneous()
                            or u.homogeneous_degree() != g.zero()):
        violations.append("u is not homogeneous of degree 0")
    one = target.one()
    if u * u.star() != one or u.star() * u != one:
        violations.append("u is not unitary")
    ustar = u.star()
    for key in phi.source.matrix_units():
        e = phi.source.matrix_unit(*key)
        if phi.apply(e) != u * psi.apply(e) * ustar:
            violations.append(f"phi(e{key}) != u psi(e{key}) u*")
    return violations
