"""Shared random-instance generators for the test suite."""

import random

from gradedk.grading import FGAbelianGroup, GroupRingElem, Subgroup
from gradedk.gralg import GradedStarField, MatricialAlgebra, RATIONALS
from gradedk.k0gr import K0Module, KHomMatrix, k0_module, unit_class


def random_field(rng: random.Random) -> GradedStarField:
    """A random monomial graded field over the rationals."""
    choice = rng.randrange(4)
    if choice == 0:
        return GradedStarField.trivially_graded(RATIONALS)
    if choice == 1:
        return GradedStarField.laurent(RATIONALS, rng.choice([1, 2, 3]))
    if choice == 2:
        return GradedStarField.group_algebra(RATIONALS, FGAbelianGroup(0, [3]))
    amb = FGAbelianGroup(2)
    support = rng.choice([
        Subgroup.trivial(amb),
        Subgroup(amb, [(1, 0)]),
        Subgroup(amb, [(2, 0), (0, 3)]),
        Subgroup.full(amb),
    ])
    return GradedStarField(RATIONALS, amb, support)


def random_algebra(rng: random.Random, field: GradedStarField,
                   max_blocks: int = 3, max_size: int = 4) -> MatricialAlgebra:
    blocks = []
    for _ in range(rng.randint(1, max_blocks)):
        n = rng.randint(1, max_size)
        shifts = [tuple(rng.randint(-2, 2) for _ in range(field.grading.dim))
                  for _ in range(n)]
        blocks.append((n, shifts))
    return MatricialAlgebra(field, blocks)


def random_support_element(rng: random.Random, field: GradedStarField):
    """A random element of the support subgroup."""
    g = field.grading
    total = g.zero()
    for gen in field.support.generators:
        total = g.add(total, g.scale(rng.randint(-1, 1), gen))
    return total


def random_contractive_pair(rng: random.Random, field: GradedStarField,
                            max_blocks: int = 3, max_size: int = 4):
    """A random source algebra R and a contractive K0 matrix f out of it.

    The target algebra is built around f(unit) so that contractivity holds
    by construction: each target block gets one shift -rep per unit of
    f(unit)'s coefficient at that coset (perturbed within the coset), plus
    optional zero-padding positions.
    """
    g = field.grading
    sub = field.support
    R = random_algebra(rng, field, max_blocks, max_size)
    mR = k0_module(R)
    target_rank = rng.randint(1, max_blocks)
    rows = []
    for _ in range(target_rank):
        row = []
        for _ in range(R.nblocks):
            terms = {}
            for _ in range(rng.randint(0, 2)):
                rep = sub.reduce(tuple(rng.randint(-2, 2)
                                       for _ in range(g.dim)))
                terms[rep] = terms.get(rep, 0) + rng.randint(0, 2)
            row.append(GroupRingElem(sub, terms))
        rows.append(row)
    # provisional target: one position per unit of the pushed-forward class
    unit_coords = unit_class(mR).coords
    blocks = []
    for row in rows:
        total = GroupRingElem.zero(sub)
        for e, u in zip(row, unit_coords):
            total = total + e * u
        shifts = []
        for rep, coeff in total.sorted_terms():
            for _ in range(coeff):
                shifts.append(g.add(g.neg(rep), random_support_element(rng, field)))
        for _ in range(rng.randint(0, 2)):  # zero padding
            shifts.append(tuple(rng.randint(-2, 2) for _ in range(g.dim)))
        if not shifts:
            shifts.append(g.zero())
        blocks.append((len(shifts), shifts))
    S = MatricialAlgebra(field, blocks)
    f = KHomMatrix(mR, K0Module(S), rows)
    return R, S, f
