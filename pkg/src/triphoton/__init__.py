"""Symbolic-numeric engine for triple-photon-generation entanglement.

Three bosonic modes evolve under the cubic interaction H = a1+ a2+ a3+ + h.c.
via an exact nested-commutator expansion truncated at a configurable order;
quadrature statistics on coherent seeds feed the van Loock-Furusawa
inseparability criterion S with its bipartition thresholds.
"""

__version__ = "0.1.0"

from .algebra import (
    DegreeCapError,
    ExactComplex,
    Monomial,
    OperatorPolynomial,
    annihilator,
    creator,
    normal_order_product,
    poly_adjoint,
    poly_commutator,
    poly_multiply,
)
from .criteria import (
    GENUINE_TRIPARTITE,
    NO_VIOLATION,
    PARTIALLY_SEPARABLE,
    CombinationWeights,
    CriterionReport,
    GainReport,
    compute_S,
    fluorescence_closed_form,
    gain_and_variances,
    optimize_beta,
    scan_thetas,
    thresholds,
)
from .evolution import (
    EvolutionParams,
    EvolvedMode,
    evolve_mode,
    hamiltonian_kernel,
    omega,
    truncation_diagnostic,
)
from .oracles import (
    ClassicalField,
    FockMoments,
    SPDCOracleParams,
    classical_meanfield,
    fock_oracle_expectations,
    spdc_exact_S,
)
from .states import (
    ModeMomentCache,
    QuadratureSpec,
    SeedState,
    coherent_expectation,
    mean_variance,
    moment_cache,
    quadrature_poly,
    sym_covariance,
)

__all__ = [
    "__version__",
    "DegreeCapError", "ExactComplex", "Monomial", "OperatorPolynomial",
    "annihilator", "creator", "normal_order_product", "poly_adjoint",
    "poly_commutator", "poly_multiply",
    "GENUINE_TRIPARTITE", "NO_VIOLATION", "PARTIALLY_SEPARABLE",
    "CombinationWeights", "CriterionReport", "GainReport", "compute_S",
    "fluorescence_closed_form", "gain_and_variances", "optimize_beta",
    "scan_thetas", "thresholds",
    "EvolutionParams", "EvolvedMode", "evolve_mode", "hamiltonian_kernel",
    "omega", "truncation_diagnostic",
    "ClassicalField", "FockMoments", "SPDCOracleParams",
    "classical_meanfield", "fock_oracle_expectations", "spdc_exact_S",
    "ModeMomentCache", "QuadratureSpec", "SeedState", "coherent_expectation",
    "mean_variance", "moment_cache", "quadrature_poly", "sym_covariance",
]
