import random

import pytest

from gradedk.grading import FGAbelianGroup, Subgroup, GroupRingElem
from gradedk.gralg import GradedStarField, MatricialAlgebra, RATIONALS
from gradedk.k0gr import (K0Module, K0Elem, KHomMatrix, OmegaShiftMultiset,
                          DescendingRay, PointMassOmega, k0_module, unit_class,
                          class_of_projection, is_positive, leq,
                          is_order_preserving, is_contractive,
                          is_unit_preserving, omega_interval_member,
                          omega_iso_exists)

Z = FGAbelianGroup(1)
Z3 = FGAbelianGroup(0, [3])

LAURENT = GradedStarField.laurent(RATIONALS)
LAURENT3 = GradedStarField.laurent(RATIONALS, 3)
TRIV_Z3 = GradedStarField.trivially_graded(RATIONALS, Z3)
TRIV = GradedStarField.trivially_graded(RATIONALS)


def _elem(sub, terms):
    return GroupRingElem(sub, terms)


def test_unit_class_trivial_grading():
    alg = MatricialAlgebra(TRIV, [(3, [(), (), ()])])
    u = unit_class(alg)
    assert u.coords[0] == _elem(alg.field.support, {(): 3})


def test_unit_class_laurent3_two_shifts():
    # M_2(A)(0,1) over K[x^3, x^-3]: [1] = [0-coset] + [(-1)-coset]
    alg = MatricialAlgebra(LAURENT3, [(2, [(0,), (1,)])])
    u = unit_class(alg)
    sub = alg.field.support
    expected = _elem(sub, {sub.reduce((0,)): 1, sub.reduce((-1,)): 1})
    assert u.coords[0] == expected
    assert sub.reduce((-1,)) != sub.reduce((0,))


def test_unit_class_group_z3_two_blocks():
    # M_5(A)(0,0,1,1,2) + M_4(A)(0,0,2,2) over K trivially graded with ambient group Z/3
    alg = MatricialAlgebra(TRIV_Z3,
                           [(5, [(0,), (0,), (1,), (1,), (2,)]),
                            (4, [(0,), (0,), (2,), (2,)])])
    u = unit_class(alg)
    sub = alg.field.support
    assert u.coords[0] == _elem(sub, {(0,): 2, (2,): 2, (1,): 1})
    assert u.coords[1] == _elem(sub, {(0,): 2, (1,): 2})


def test_class_of_projection_shifted_corner():
    alg = MatricialAlgebra(LAURENT, [(2, [(0,), (1,)])])
    e22 = alg.matrix_unit(0, 1, 1)
    cls = class_of_projection(e22)
    assert cls.coords[0] == _elem(alg.field.support, {(-1,): 1})


def test_class_of_projection_sum_is_unit_class():
    rng = random.Random(41)
    for _ in range(20):
        blocks = []
        for _ in range(rng.randint(1, 3)):
            n = rng.randint(1, 4)
            blocks.append((n, [(rng.randint(-2, 2),) for _ in range(n)]))
        alg = MatricialAlgebra(LAURENT, blocks)
        total = class_of_projection(alg.zero())
        for i, (n, _) in enumerate(blocks):
            for k in range(n):
                total = total + class_of_projection(alg.matrix_unit(i, k, k))
        assert total == unit_class(alg)


def test_class_of_projection_rejects_nonprojection():
    alg = MatricialAlgebra(TRIV, [(2, [(), ()])])
    with pytest.raises(ValueError):
        class_of_projection(alg.matrix_unit(0, 0, 1))


def test_class_of_projection_star_transpose_invariant():
    # monomial projections are diagonal, hence fixed by star-transpose
    alg = MatricialAlgebra(LAURENT, [(3, [(0,), (1,), (2,)])])
    p = alg.matrix_unit(0, 0, 0) + alg.matrix_unit(0, 2, 2)
    assert class_of_projection(p.star()) == class_of_projection(p)


def test_positivity_and_leq():
    alg = MatricialAlgebra(LAURENT, [(1, [(0,)]), (2, [(0,), (1,)])])
    mod = k0_module(alg)
    sub = alg.field.support
    v = K0Elem(mod, (_elem(sub, {(0,): 1}), _elem(sub, {(1,): 2})))
    w = K0Elem(mod, (_elem(sub, {(0,): 1, (2,): 1}), _elem(sub, {(1,): 2})))
    assert is_positive(v)
    assert leq(v, w) and not leq(w, v)
    neg = K0Elem(mod, (_elem(sub, {(0,): -1}), _elem(sub, {})))
    assert not is_positive(neg)


def test_khom_identity_and_compose():
    alg = MatricialAlgebra(TRIV_Z3, [(2, [(0,), (1,)]), (1, [(2,)])])
    mod = k0_module(alg)
    ident = KHomMatrix.identity(mod)
    assert ident.apply(unit_class(mod)) == unit_class(mod)
    assert ident.compose(ident) == ident
    assert is_unit_preserving(ident) and is_contractive(ident)


def test_khom_worked_example_map_is_unit_preserving():
    # R = M_2(A)(0,1) + M_1(A)(1), S = M_5(A)(0,0,1,1,2) + M_4(A)(0,0,2,2)
    # over K trivially graded with ambient group Z/3; f = [[2, x^2], [x, x + x^2]].
    R = MatricialAlgebra(TRIV_Z3, [(2, [(0,), (1,)]), (1, [(1,)])])
    S = MatricialAlgebra(TRIV_Z3,
                         [(5, [(0,), (0,), (1,), (1,), (2,)]),
                          (4, [(0,), (0,), (2,), (2,)])])
    mR, mS = k0_module(R), k0_module(S)
    sub = TRIV_Z3.support
    f = KHomMatrix(mR, mS, [
        [_elem(sub, {(0,): 2}), _elem(sub, {(2,): 1})],
        [_elem(sub, {(1,): 1}), _elem(sub, {(1,): 1, (2,): 1})],
    ])
    assert is_order_preserving(f)
    assert is_contractive(f)
    assert is_unit_preserving(f)
    assert f.apply(unit_class(mR)) == unit_class(mS)


def test_khom_strictly_contractive_map():
    R = MatricialAlgebra(TRIV, [(1, [()])])
    S = MatricialAlgebra(TRIV, [(3, [()] * 3)])
    f = KHomMatrix(k0_module(R), k0_module(S),
                   [[_elem(TRIV.support, {(): 2})]])
    assert is_contractive(f) and not is_unit_preserving(f)
    g = KHomMatrix(k0_module(R), k0_module(S),
                   [[_elem(TRIV.support, {(): 4})]])
    assert is_order_preserving(g) and not is_contractive(g)


def test_khom_apply_compose_random_consistency():
    rng = random.Random(43)
    sub = TRIV_Z3.support
    def rand_alg():
        blocks = []
        for _ in range(2):
            n = rng.randint(1, 3)
            blocks.append((n, [(rng.randint(0, 2),) for _ in range(n)]))
        return MatricialAlgebra(TRIV_Z3, blocks)

    algs = [rand_alg() for _ in range(3)]

    def rand_mat(src, tgt):
        return KHomMatrix(src, tgt, [[
            _elem(sub, {(rng.randint(0, 2),): rng.randint(0, 2)})
            for _ in range(src.rank)] for _ in range(tgt.rank)])

    def rand_vec(mod):
        return K0Elem(mod, tuple(
            _elem(sub, {(rng.randint(0, 2),): rng.randint(-2, 2)})
            for _ in range(mod.rank)))

    for _ in range(30):
        m0, m1, m2 = (k0_module(a) for a in algs)
        f = rand_mat(m0, m1)
        g = rand_mat(m1, m2)
        v = rand_vec(m0)
        assert g.compose(f).apply(v) == g.apply(f.apply(v))
        w = rand_vec(m0)
        assert f.apply(v + w) == f.apply(v) + f.apply(w)
        gamma = (rng.randint(-2, 2),)
        assert f.apply(v.act(gamma)) == f.apply(v).act(gamma)


def test_omega_multiplicity_line_clock():
    line = OmegaShiftMultiset.line()
    clock = OmegaShiftMultiset.clock()
    assert [line.multiplicity(d) for d in (-1, 0, 1, 5)] == [0, 1, 1, 1]
    assert clock.multiplicity(0) == 1
    assert clock.multiplicity(1) is None
    assert clock.multiplicity(2) == 0
    assert line.eventual_count() == 1 and clock.eventual_count() == 0


def test_omega_interval_member_line():
    sub = Subgroup.trivial(Z)
    line = OmegaShiftMultiset.line()
    assert omega_interval_member(_elem(sub, {(0,): 1, (-1,): 1, (-2,): 1}), line)
    assert not omega_interval_member(_elem(sub, {(0,): 2}), line)
    assert not omega_interval_member(_elem(sub, {(1,): 1}), line)
    assert omega_interval_member(_elem(sub, {}), line)


def test_omega_interval_member_clock():
    sub = Subgroup.trivial(Z)
    clock = OmegaShiftMultiset.clock()
    assert omega_interval_member(_elem(sub, {(0,): 1, (-1,): 5}), clock)
    assert not omega_interval_member(_elem(sub, {(0,): 2, (-1,): 1}), clock)
    assert not omega_interval_member(_elem(sub, {(0,): 1, (-1,): -1}), clock)


def test_omega_iso_line_vs_clock_fails():
    ok, reason = omega_iso_exists(OmegaShiftMultiset.line(),
                                  OmegaShiftMultiset.clock())
    assert not ok
    assert isinstance(reason, str) and reason


def test_omega_iso_shifted_line():
    shifted = OmegaShiftMultiset((), (DescendingRay(4, 1),))
    ok, k = omega_iso_exists(OmegaShiftMultiset.line(), shifted)
    assert ok and k == -4
    ok2, k2 = omega_iso_exists(shifted, OmegaShiftMultiset.line())
    assert ok2 and k2 == 4


def test_omega_iso_identity_cases():
    for shifts in (OmegaShiftMultiset.line(), OmegaShiftMultiset.clock(),
                   OmegaShiftMultiset(((0, 2), (3, 1)), (DescendingRay(5, 2),))):
        ok, k = omega_iso_exists(shifts, shifts)
        assert ok and k == 0


def test_omega_iso_different_ray_counts_fail():
    one = OmegaShiftMultiset((), (DescendingRay(0, 1),))
    two = OmegaShiftMultiset((), (DescendingRay(0, 2),))
    ok, _ = omega_iso_exists(one, two)
    assert not ok


def test_omega_iso_finite_bump_obstruction():
    # same tail but an extra finite shift that no translate can absorb
    plain = OmegaShiftMultiset((), (DescendingRay(0, 1),))
    bumped = OmegaShiftMultiset(((0, 1),), (DescendingRay(0, 1),))
    ok, _ = omega_iso_exists(plain, bumped)
    assert not ok
