import random
from fractions import Fraction

import pytest

from gradedk.grading import FGAbelianGroup, GroupRingElem
from gradedk.gralg import (GradedStarField, GradedMatrix, MatricialAlgebra,
                           MatricialElement, RATIONALS)
from gradedk.k0gr import KHomMatrix, k0_module, class_of_projection
from gradedk.fullsynth import synthesize, k0_of_hom
from gradedk.faithful import (FaithfulnessError, ClassMismatch, KHomMismatch,
                              ComplementClassMismatch, NonMonomial,
                              projection_star_equivalence, build_intertwiner,
                              unitary_completion, verify_conjugation)

from helpers import random_field, random_contractive_pair

TRIV = GradedStarField.trivially_graded(RATIONALS)
LAURENT = GradedStarField.laurent(RATIONALS)


def test_pse_equal_projections():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    g = alg.matrix_unit(0, 0, 0)
    x = projection_star_equivalence(g, g)
    assert x == g
    assert x * x.star() == g and x.star() * x == g


def test_pse_matrix_units_untwisted():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    g = alg.matrix_unit(0, 0, 0)
    h = alg.matrix_unit(0, 1, 1)
    x = projection_star_equivalence(g, h)
    assert x == alg.matrix_unit(0, 0, 1)


def test_pse_matrix_units_shifted_laurent():
    # e11 vs e22 in M_2(K[x,x^-1])(0,1): the realizer is the degree-0
    # partial isometry at position (1,2), carrying the degree-1 unitary
    alg = MatricialAlgebra(LAURENT, [(2, [(0,), (1,)])])
    g = alg.matrix_unit(0, 0, 0)
    h = alg.matrix_unit(0, 1, 1)
    x = projection_star_equivalence(g, h)
    m = x.parts[(0,)][0]
    assert m.entries == {(0, 1): Fraction(1)}
    assert x * x.star() == g and x.star() * x == h
    assert x.homogeneous_degree() == (0,)


def test_pse_class_mismatch():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    g = alg.matrix_unit(0, 0, 0)
    h = alg.matrix_unit(0, 0, 0) + alg.matrix_unit(0, 1, 1)
    with pytest.raises(ClassMismatch):
        projection_star_equivalence(g, h)


def test_pse_rejects_nonmonomial():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    half = Fraction(1, 2)
    m = GradedMatrix(TRIV, [(), ()], [(), ()], (), {
        (0, 0): half, (0, 1): half, (1, 0): half, (1, 1): half})
    p = MatricialElement(alg, {(): {0: m}})
    assert p * p == p and p.star() == p
    with pytest.raises(NonMonomial):
        projection_star_equivalence(p, p)


def test_pse_randomized_projections():
    rng = random.Random(59)
    for _ in range(40):
        field = random_field(rng)
        alg = MatricialAlgebra(field, [(4, [tuple(rng.randint(-2, 2)
                                                  for _ in range(field.grading.dim))
                                            for _ in range(4)])])
        # two random diagonal projections with the same class: pick a coset
        # pattern and two different position choices realizing it
        shifts = alg.block_shifts(0)
        sub = field.support
        by_coset = {}
        for r, s in enumerate(shifts):
            by_coset.setdefault(sub.reduce(s), []).append(r)
        gpos, hpos = [], []
        for positions in by_coset.values():
            n = rng.randint(0, len(positions))
            gpos += rng.sample(positions, n)
            hpos += rng.sample(positions, n)
        g = alg.zero()
        for r in gpos:
            g = g + alg.matrix_unit(0, r, r)
        h = alg.zero()
        for c in hpos:
            h = h + alg.matrix_unit(0, c, c)
        assert class_of_projection(g) == class_of_projection(h)
        x = projection_star_equivalence(g, h)
        assert x * x.star() == g
        assert x.star() * x == h


def _random_target_unitary(rng, alg):
    """A random degree-0 monomial unitary: per block, a permutation moving
    positions only within their shift-coset class."""
    field = alg.field
    sub = field.support
    zero = field.grading.zero()
    one = field.base.one()
    blocks = {}
    for i in range(alg.nblocks):
        shifts = alg.block_shifts(i)
        perm = list(range(len(shifts)))
        by_coset = {}
        for r, s in enumerate(shifts):
            by_coset.setdefault(sub.reduce(s), []).append(r)
        for positions in by_coset.values():
            shuffled = positions[:]
            rng.shuffle(shuffled)
            for a, b in zip(positions, shuffled):
                perm[a] = b
        entries = {(r, perm[r]): one for r in range(len(shifts))}
        blocks[i] = GradedMatrix(field, shifts, shifts, zero, entries)
    return MatricialElement(alg, {zero: blocks})


def test_intertwiner_between_conjugate_homs():
    rng = random.Random(61)
    for _ in range(30):
        field = random_field(rng)
        R, S, f = random_contractive_pair(rng, field)
        phi = synthesize(f).as_map()
        v = _random_target_unitary(rng, S)
        assert v * v.star() == S.one()
        psi = phi.conjugate(v)
        assert k0_of_hom(psi) == f
        u = unitary_completion(phi, psi)
        assert verify_conjugation(phi, psi, u) == []
        x = build_intertwiner(phi, psi)
        assert x * x.star() == phi.apply(R.one())
        assert x.star() * x == psi.apply(R.one())


def test_intertwiner_identity_homs():
    alg = MatricialAlgebra(LAURENT, [(2, [(0,), (1,)]), (1, [(2,)])])
    from gradedk.gralg import StarAlgebraMap
    ident = StarAlgebraMap.identity(alg)
    u = unitary_completion(ident, ident)
    assert u == alg.one()
    assert verify_conjugation(ident, ident, u) == []


def test_khom_mismatch_detected():
    R = MatricialAlgebra(TRIV, [(1, [()])])
    S = MatricialAlgebra(TRIV, [(3, [(), (), ()])])
    sub = TRIV.support
    f1 = KHomMatrix(k0_module(R), k0_module(S),
                    [[GroupRingElem(sub, {(): 1})]])
    f2 = KHomMatrix(k0_module(R), k0_module(S),
                    [[GroupRingElem(sub, {(): 2})]])
    phi = synthesize(f1)
    psi = synthesize(f2)
    with pytest.raises(KHomMismatch):
        build_intertwiner(phi, psi)


def test_verify_conjugation_flags_wrong_unitary():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    from gradedk.gralg import StarAlgebraMap
    ident = StarAlgebraMap.identity(alg)
    not_unitary = alg.matrix_unit(0, 0, 0)
    assert any("unitary" in v for v in
               verify_conjugation(ident, ident, not_unitary))


def test_error_hierarchy():
    for err in (ClassMismatch, KHomMismatch, ComplementClassMismatch,
                NonMonomial):
        assert issubclass(err, FaithfulnessError)
