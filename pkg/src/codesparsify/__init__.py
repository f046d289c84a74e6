"""Sparsifiers for linear codes over finite Abelian groups, and the CSPs,
Cayley graphs and hedge-graphs that reduce to them."""

from .applications import (CayleySpec, Hedge, HedgeGraph, SplittingSpec, UnsupportedCaseError,
                           cayley_eigenvalue, cayley_laplacian, cayley_spectrum, cayley_to_code,
                           hedge_to_code, sparsify_cayley, sparsify_hedge, sparsify_splitting,
                           splitting_to_csp)
from .codes import (CodeStats, Codeword, EnumerationCapError, GeneratingMatrix, code_stats, contract,
                    count_distinct_codewords, encode, enumerate_codewords, support, weighted_weight)
from .csp import (AND, OR, AffineRepresentation, ClassificationError, Constraint, CspInstance,
                  PolynomialRep, Predicate, Projection, affine_sparsify, and_projection_general,
                  and_projection_symmetric, classify_arity3, evaluate_csp, nontrivial_sparsify,
                  periodicity, sparsify_symmetric_csp)
from .groups import GroupElement, GroupSpec, order_of
from .lattice import (NotClosedError, affine_rep_from_closed_zeros, hermite_normal_form,
                      is_closed_zero_set, membership_system)
from .oracle import (VerificationReport, counting_bound_census, verify_code_sparsifier,
                     verify_csp_sparsifier)
from .spanning import (build_max_spanning_subset, code_decomposition, construct_spanning_subsets)
from .sparsifier import (DEFAULT_CONFIG, ReplicaCapError, SparsifierResult, SparsifyConfig,
                         code_sparsify, final_code_sparsify, sparsify)

__version__ = "0.1.0"
