"""Chains of matricial algebras, colimit K0, and bounded Elliott intertwining.

A chain is a lazily generated ascending sequence R_0 -> R_1 -> ... of
matricial algebras with graded *-connecting maps.  Colimit K0 elements are
pairs (stage, value); equality and vanishing are decided by bounded
pushforward search.  elliott_intertwine runs the back-and-forth
construction: at each round it factors the stage-wise K0 data of a colimit
isomorphism through a later stage (fullness), then corrects the synthesized
map by a degree-zero unitary (faithfulness) so that the triangle with the
connecting map commutes exactly, producing a transcript whose relations are
verified by evaluation on matrix units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .grading import GroupRingElem, Subgroup, FGAbelianGroup
from .gralg import (GradedStarField, MatricialAlgebra, StarAlgebraMap,
                    RATIONALS, verify_graded_star_hom)
from .k0gr import (K0Elem, K0Module, KHomMatrix, is_contractive,
                   is_order_preserving, k0_module, unit_class)
from .fullsynth import (GradedHomSpec, NotContractive, NotOrderPreserving,
                        k0_of_hom, synthesize)
from .faithful import unitary_completion


class UltraError(Exception):
    pass


class BudgetExhausted(UltraError):
    """A bounded stage search was inconclusive; never a refutation."""


class KHomInconsistent(UltraError):
    """Stage-wise K0 data does not commute with the connecting maps."""


@dataclass(frozen=True)
class StageBudget:
    max_stage: int = 64

    def __post_init__(self):
        if self.max_stage < 1:
            raise ValueError("budget must be positive")


def _as_budget(budget) -> StageBudget:
    if isinstance(budget, StageBudget):
        return budget
    return StageBudget(int(budget))


class Chain:
    """Ascending chain of matricial algebras with graded *-connecting maps.

    stage_fn(n) returns the n-th algebra; connecting_fn(n) returns the
    connecting homomorphism R_n -> R_{n+1} (a GradedHomSpec or
    StarAlgebraMap), given the two algebras.  Stages are cached; connecting
    maps are validated on first construction.
    """

    def __init__(self, stage_fn: Callable[[int], MatricialAlgebra],
                 connecting_fn: Callable[[int, MatricialAlgebra,
                                          MatricialAlgebra], object],
                 length: Optional[int] = None):
        self._stage_fn = stage_fn
        self._connecting_fn = connecting_fn
        self.length = length
        self._stages: Dict[int, MatricialAlgebra] = {}
        self._maps: Dict[int, StarAlgebraMap] = {}
        self._k0: Dict[int, KHomMatrix] = {}

    def stage(self, n: int) -> MatricialAlgebra:
        if n < 0 or (self.length is not None and n >= self.length):
            raise IndexError(f"stage {n} out of range")
        if n not in self._stages:
            self._stages[n] = self._stage_fn(n)
        return self._stages[n]

    def connecting(self, n: int) -> StarAlgebraMap:
        if n not in self._maps:
            src, tgt = self.stage(n), self.stage(n + 1)
            h = self._connecting_fn(n, src, tgt)
            if isinstance(h, GradedHomSpec):
                h = h.as_map()
            if h.source != src or h.target != tgt:
                raise ValueError(f"connecting map {n} has wrong endpoints")
            violations = verify_graded_star_hom(h)
            if violations:
                raise ValueError(
                    f"connecting map {n} is not a graded *-homomorphism: "
                    + "; ".join(violations))
            self._maps[n] = h
        return self._maps[n]

    def connecting_k0(self, n: int) -> KHomMatrix:
        if n not in self._k0:
            self._k0[n] = k0_of_hom(self.connecting(n))
        return self._k0[n]

    def hom(self, n: int, m: int) -> StarAlgebraMap:
        """Composite connecting map R_n -> R_m."""
        if m < n:
            raise ValueError("m must be >= n")
        h = StarAlgebraMap.identity(self.stage(n))
        for s in range(n, m):
            h = self.connecting(s).compose(h)
        return h

    def k0(self, n: int, m: int) -> KHomMatrix:
        """Composite K0 matrix of hom(n, m)."""
        if m < n:
            raise ValueError("m must be >= n")
        f = KHomMatrix.identity(k0_module(self.stage(n)))
        for s in range(n, m):
            f = self.connecting_k0(s).compose(f)
        return f


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_TRIV_Z = GradedStarField.trivially_graded(RATIONALS, FGAbelianGroup(1))


def _unit_khom(src: MatricialAlgebra, tgt: MatricialAlgebra) -> KHomMatrix:
    sub = src.field.support
    one = GroupRingElem.one(sub)
    return KHomMatrix(k0_module(src), k0_module(tgt), [[one]])


def constant_chain(algebra: MatricialAlgebra) -> Chain:
    return Chain(lambda n: algebra,
                 lambda n, src, tgt: StarAlgebraMap.identity(algebra))


def line_truncation_chain() -> Chain:
    """M_{n+1}(K)(0,1,...,n) with upper-left corner embeddings."""
    def stage(n):
        return MatricialAlgebra(_TRIV_Z, [(n + 1, [(k,) for k in range(n + 1)])])

    return Chain(stage, lambda n, src, tgt: synthesize(_unit_khom(src, tgt)))


def clock_truncation_chain() -> Chain:
    """M_{n+1}(K)(0,1,1,...,1) with upper-left corner embeddings."""
    def stage(n):
        return MatricialAlgebra(
            _TRIV_Z, [(n + 1, [(0,)] + [(1,)] * n)])

    return Chain(stage, lambda n, src, tgt: synthesize(_unit_khom(src, tgt)))


def reversed_line_truncation_chain() -> Chain:
    """M_{n+1}(K)(n,...,1,0): the line chain with permuted shifts."""
    def stage(n):
        return MatricialAlgebra(
            _TRIV_Z, [(n + 1, [(n - k,) for k in range(n + 1)])])

    return Chain(stage, lambda n, src, tgt: synthesize(_unit_khom(src, tgt)))


def corner_doubling_chain() -> Chain:
    """M_{2^n}(K) over trivially graded K with doubling embeddings."""
    field = GradedStarField.trivially_graded(RATIONALS)

    def stage(n):
        return MatricialAlgebra(field, [(2 ** n, [()] * (2 ** n))])

    def connecting(n, src, tgt):
        sub = field.support
        two = GroupRingElem(sub, {(): 2})
        return synthesize(KHomMatrix(k0_module(src), k0_module(tgt), [[two]]))

    return Chain(stage, connecting)


CHAIN_PRESETS = {
    "line-truncation": line_truncation_chain,
    "clock-truncation": clock_truncation_chain,
    "reversed-line-truncation": reversed_line_truncation_chain,
    "corner-doubling": corner_doubling_chain,
}


# ---------------------------------------------------------------------------
# colimit K0
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ColimitK0Elem:
    chain: Chain
    stage: int
    value: K0Elem


def push_forward(e: ColimitK0Elem, m: int) -> K0Elem:
    if m < e.stage:
        raise ValueError("cannot push a colimit element backwards")
    return e.chain.k0(e.stage, m).apply(e.value)


def stage_search_zero(chain: Chain, stage: int, values: Sequence[K0Elem],
                      budget=StageBudget()) -> int:
    """Smallest m in [stage, budget] at which all values push to zero."""
    budget = _as_budget(budget)
    for m in range(stage, budget.max_stage + 1):
        f = chain.k0(stage, m)
        if all(f.apply(v).is_zero() for v in values):
            return m
    raise BudgetExhausted(
        f"no stage <= {budget.max_stage} kills all listed elements")


def factor_through_stage(chain: Chain, stage: int, f: KHomMatrix,
                         budget=StageBudget()) -> Tuple[int, GradedHomSpec]:
    """Factor a K0 map into the colimit through a concrete stage.

    f maps K0 of some matricial algebra R into K0 of chain stage `stage`;
    the result is the smallest m >= stage at which the pushforward of f is
    contractive, together with a synthesized R -> R_m realizing it.
    """
    budget = _as_budget(budget)
    if not is_order_preserving(f):
        raise NotOrderPreserving("f has a negative coefficient")
    for m in range(stage, budget.max_stage + 1):
        g = chain.k0(stage, m).compose(f)
        if is_contractive(g):
            return m, synthesize(g)
    raise BudgetExhausted(
        f"pushforward of f not contractive at any stage <= {budget.max_stage}")


# ---------------------------------------------------------------------------
# Elliott intertwining
# ---------------------------------------------------------------------------

class ChainMapData:
    """Stage-wise K0 data for a map between chain colimits.

    assign(n) returns (m, KHomMatrix from K0 of source stage n to K0 of
    target stage m).  Compatibility with the connecting maps is checked on
    the stages actually used.
    """

    def __init__(self, source: Chain, target: Chain,
                 assign: Callable[[int], Tuple[int, KHomMatrix]]):
        self.source = source
        self.target = target
        self._assign = assign

    def at_stage(self, n: int) -> Tuple[int, KHomMatrix]:
        m, f = self._assign(n)
        if (f.source != k0_module(self.source.stage(n))
                or f.target != k0_module(self.target.stage(m))):
            raise KHomInconsistent(
                f"stage data at {n} has wrong K0 endpoints")
        return m, f

    def check_square(self, n1: int, n2: int) -> None:
        """Verify target-push o f_{n1} == f_{n2} o source-push."""
        if n2 < n1:
            raise ValueError("n2 must be >= n1")
        m1, f1 = self.at_stage(n1)
        m2, f2 = self.at_stage(n2)
        if m2 < m1:
            raise KHomInconsistent(
                f"target stages decrease between {n1} and {n2}")
        left = self.target.k0(m1, m2).compose(f1)
        right = f2.compose(self.source.k0(n1, n2))
        if left != right:
            raise KHomInconsistent(
                f"stage data does not commute with connecting maps "
                f"between stages {n1} and {n2}")


def unit_khom_data(source: Chain, target: Chain,
                   stage_map: Callable[[int], int] = lambda n: n) -> ChainMapData:
    """The stage-wise identity-coefficient data n -> (stage_map(n), [[1]])."""
    def assign(n):
        m = stage_map(n)
        return m, _unit_khom(source.stage(n), target.stage(m))

    return ChainMapData(source, target, assign)


@dataclass(frozen=True)
class Transcript:
    """A depth-k Elliott intertwining transcript.

    n_stages = (n(1), ..., n(k+1)), m_stages = (m(1), ..., m(k));
    rhos[i] : R_{n(i+1-1)} -> S_{m(i+1-1)} and sigmas[i] : S_{m(i)} ->
    R_{n(i+1)} (0-based lists), satisfying:
      (1)_i  sigma_i o rho_i = phi_{n(i) n(i+1)}
      (2)_i  rho_{i+1} o sigma_i = psi_{m(i) m(i+1)}
      (3)_i  K0(rho_i) equals the pushed forward data
      (4)_i  K0(sigma_i) equals the pushed backward data
    """
    chainR: Chain
    chainS: Chain
    n_stages: Tuple[int, ...]
    m_stages: Tuple[int, ...]
    rhos: Tuple[StarAlgebraMap, ...]
    sigmas: Tuple[StarAlgebraMap, ...]


def verify_transcript(t: Transcript,
                      fwd: Optional[ChainMapData] = None,
                      bwd: Optional[ChainMapData] = None) -> List[str]:
    violations: List[str] = []
    k = len(t.rhos)
    for i in range(k):
        lhs = t.sigmas[i].compose(t.rhos[i])
        rhs = t.chainR.hom(t.n_stages[i], t.n_stages[i + 1])
        if lhs != rhs:
            violations.append(f"(1)_{i + 1}: sigma o rho != phi connecting")
    for i in range(k - 1):
        lhs = t.rhos[i + 1].compose(t.sigmas[i])
        rhs = t.chainS.hom(t.m_stages[i], t.m_stages[i + 1])
        if lhs != rhs:
            violations.append(f"(2)_{i + 1}: rho o sigma != psi connecting")
    if fwd is not None:
        for i in range(k):
            m0, f0 = fwd.at_stage(t.n_stages[i])
            expected = t.chainS.k0(m0, t.m_stages[i]).compose(f0)
            if k0_of_hom(t.rhos[i]) != expected:
                violations.append(f"(3)_{i + 1}: K0(rho) != pushed data")
    if bwd is not None:
        for i in range(k):
            n0, g0 = bwd.at_stage(t.m_stages[i])
            expected = t.chainR.k0(n0, t.n_stages[i + 1]).compose(g0)
            if k0_of_hom(t.sigmas[i]) != expected:
                violations.append(f"(4)_{i + 1}: K0(sigma) != pushed data")
    return violations


def elliott_intertwine(chainR: Chain, chainS: Chain,
                       fwd: ChainMapData, bwd: ChainMapData,
                       rounds: int = 3, budget=StageBudget(),
                       start: int = 0) -> Transcript:
    """Run the bounded back-and-forth intertwining construction."""
    budget = _as_budget(budget)
    if fwd.source is not chainR or fwd.target is not chainS:
        raise ValueError("fwd data must map chainR to chainS")
    if bwd.source is not chainS or bwd.target is not chainR:
        raise ValueError("bwd data must map chainS to chainR")

    n_stages = [start]
    m_stages: List[int] = []
    rhos: List[StarAlgebraMap] = []
    sigmas: List[StarAlgebraMap] = []

    for i in range(rounds):
        n_i = n_stages[i]
        # forward step: rho_i realizing the pushed fwd data
        m_lo, f_i = fwd.at_stage(n_i)
        if i > 0:
            fwd.check_square(n_stages[i - 1], n_i)
        m_floor = max(m_lo, (m_stages[i - 1] + 1) if i > 0 else m_lo)
        rho_i = None
        mismatch = False
        for m in range(m_floor, budget.max_stage + 1):
            g = chainS.k0(m_lo, m).compose(f_i)
            if not is_order_preserving(g):
                raise KHomInconsistent("forward data is not order-preserving")
            if not is_contractive(g):
                continue
            cand = synthesize(g).as_map()
            if i > 0:
                # correct so that (2)_{i-1}: rho_i o sigma_{i-1} = psi
                theta = cand.compose(sigmas[i - 1])
                psi_conn = chainS.hom(m_stages[i - 1], m)
                if k0_of_hom(theta) != k0_of_hom(psi_conn):
                    # colimit equality may only surface at a later stage
                    mismatch = True
                    continue
                u = unitary_completion(psi_conn, theta)
                cand = cand.conjugate(u)
            rho_i = cand
            m_i = m
            break
        if rho_i is None:
            if mismatch:
                raise KHomInconsistent(
                    "forward/backward data never compose to the connecting "
                    f"K0 map within budget {budget.max_stage}")
            raise BudgetExhausted(
                f"no stage <= {budget.max_stage} makes the forward data "
                f"contractive at round {i + 1}")
        m_stages.append(m_i)
        rhos.append(rho_i)

        # backward step: sigma_i with sigma_i o rho_i = phi exactly
        n_lo, g_i = bwd.at_stage(m_i)
        n_floor = max(n_lo, n_i + 1)
        sigma_i = None
        mismatch = False
        for n in range(n_floor, budget.max_stage + 1):
            h = chainR.k0(n_lo, n).compose(g_i)
            if not is_order_preserving(h):
                raise KHomInconsistent("backward data is not order-preserving")
            if not is_contractive(h):
                continue
            cand = synthesize(h).as_map()
            theta = cand.compose(rho_i)
            phi_conn = chainR.hom(n_i, n)
            if k0_of_hom(theta) != k0_of_hom(phi_conn):
                mismatch = True
                continue
            u = unitary_completion(phi_conn, theta)
            sigma_i = cand.conjugate(u)
            n_next = n
            break
        if sigma_i is None:
            if mismatch:
                raise KHomInconsistent(
                    "backward data never inverts the forward data on K0 "
                    f"within budget {budget.max_stage}")
            raise BudgetExhausted(
                f"no stage <= {budget.max_stage} makes the backward data "
                f"contractive at round {i + 1}")
        n_stages.append(n_next)
        sigmas.append(sigma_i)

    return Transcript(chainR, chainS, tuple(n_stages), tuple(m_stages),
                      tuple(rhos), tuple(sigmas))
