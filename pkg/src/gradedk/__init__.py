"""Exact graded K-theory of matricial *-algebras and Leavitt path algebras."""

from .grading import (FGAbelianGroup, Subgroup, Coset, GroupRingElem,
                      subgroup_member, coset_reduce, ring_mul, act)
from .gralg import (BaseStarField, GradedStarField, HomogeneousScalar,
                    GradedMatrix, MatricialAlgebra, MatricialElement,
                    StarAlgebraMap, RATIONALS, GAUSSIAN_RATIONALS,
                    prime_field, matrix_unit, star_transpose, tensor_embed,
                    permute_shift_iso, unitary_twist_iso,
                    verify_graded_star_hom)
from .k0gr import (K0Module, K0Elem, KHomMatrix, OmegaShiftMultiset,
                   DescendingRay, PointMassOmega, k0_module, unit_class,
                   class_of_projection, is_positive, leq, is_contractive,
                   is_unit_preserving, omega_interval_member, omega_iso_exists)
from .fullsynth import (FCoefficients, DimensionReport, GradedHomSpec,
                        decompose_khom, dimension_report, synthesize,
                        evaluate_hom, k0_of_hom, NegativeCoefficient,
                        NotOrderPreserving, NotContractive)
from .faithful import (FaithfulnessError, ClassMismatch, KHomMismatch,
                       ComplementClassMismatch, NonMonomial,
                       projection_star_equivalence, build_intertwiner,
                       unitary_completion, verify_conjugation)
from .ultra import (Chain, StageBudget, BudgetExhausted, KHomInconsistent,
                    ColimitK0Elem, push_forward, stage_search_zero,
                    factor_through_stage, ChainMapData, unit_khom_data,
                    Transcript, verify_transcript, elliott_intertwine,
                    constant_chain, line_truncation_chain,
                    clock_truncation_chain, reversed_line_truncation_chain,
                    corner_doubling_chain, CHAIN_PRESETS)
from .lpa import (Graph, NotInClass, GraphClassReport, classify_graph,
                  StructureData, structure_decomposition, Monomial,
                  monomial_product, reduce_monomial, lpa_one, LpaElement,
                  LpaInvariant, lpa_invariant, decide_graded_iso)

__version__ = "0.1.0"
