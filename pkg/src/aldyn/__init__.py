"""aldyn: exact-arithmetic engine for algebraic dynamics.

Polynomial algebras over Q(i)[theta] with the pointwise and Moyal star
products, derivation-generated flows, Poisson structures, reduction of
dynamics along distributions, finite-level quantum systems with commutant
and block reductions, and a derivation-based differential calculus on
matrix algebras.
"""

from .derivations import (
    FlowResult,
    NonTruncatingFlow,
    PolyDerivation,
    apply,
    commutator_der,
    flow_action_angle,
    flow_action_angle_series,
    flow_linear,
    flow_map,
    flow_nilpotent,
    flow_series_truncated,
    nilpotency_order,
)
from .diffcalc import (
    DerivationBasis,
    KForm,
    contract,
    exactness_obstruction,
    exterior_d,
    gell_mann_basis,
    lie_derivative,
    wedge,
)
from .matrices import Mat, full_matrix_basis, pauli
from .moyal import (
    StarAlgebraContext,
    StarDerivation,
    SymplecticPairing,
    inner_star_derivation,
    s_space_basis,
    s_space_check,
    star,
    star_commutator,
    wigner_ambiguity_check,
)
from .parsing import ParseError, parse_poly
from .poisson import (
    LieAlgebra3d,
    PoissonTensor,
    bracket,
    casimir_check,
    conserved_check,
    find_hamiltonian,
    find_poisson_tensor,
    hamiltonian_field,
    jacobi_check,
    lie_poisson,
)
from .poly import (
    GeneratorMismatch,
    GeneratorSet,
    Poly,
    partial_derivative,
    poly_add,
    poly_mul,
    theta_limit,
)
from .quantum import (
    InnerDerivation,
    MatrixSubspace,
    biderivation_solver,
    block_split,
    commutant,
    commutator,
    evolve,
    heisenberg_derivative,
    invariance_check,
)
from .reduction import (
    ConnectionP,
    Distribution,
    PolyMap,
    connection_apply,
    f_related_reduce,
    find_connection,
    invariance_of_subalgebra,
    invariant_subalgebra,
    normalizer_check,
    split_dynamics,
)
from .scalars import GaussRational, Scalar

__version__ = "0.1.0"

__all__ = [
    "ConnectionP",
    "DerivationBasis",
    "Distribution",
    "FlowResult",
    "GaussRational",
    "GeneratorMismatch",
    "GeneratorSet",
    "InnerDerivation",
    "KForm",
    "LieAlgebra3d",
    "Mat",
    "MatrixSubspace",
    "NonTruncatingFlow",
    "ParseError",
    "Poly",
    "PolyDerivation",
    "PolyMap",
    "PoissonTensor",
    "Scalar",
    "StarAlgebraContext",
    "StarDerivation",
    "SymplecticPairing",
    "apply",
    "biderivation_solver",
    "block_split",
    "bracket",
    "casimir_check",
    "commutant",
    "commutator",
    "commutator_der",
    "connection_apply",
    "conserved_check",
    "contract",
    "evolve",
    "exactness_obstruction",
    "exterior_d",
    "f_related_reduce",
    "find_connection",
    "find_hamiltonian",
    "find_poisson_tensor",
    "flow_action_angle",
    "flow_action_angle_series",
    "flow_linear",
    "flow_map",
    "flow_nilpotent",
    "flow_series_truncated",
    "full_matrix_basis",
    "gell_mann_basis",
    "hamiltonian_field",
    "heisenberg_derivative",
    "inner_star_derivation",
    "invariance_check",
    "invariance_of_subalgebra",
    "invariant_subalgebra",
    "jacobi_check",
    "lie_derivative",
    "lie_poisson",
    "nilpotency_order",
    "normalizer_check",
    "parse_poly",
    "partial_derivative",
    "pauli",
    "poly_add",
    "poly_mul",
    "s_space_basis",
    "s_space_check",
    "split_dynamics",
    "star",
    "star_commutator",
    "theta_limit",
    "wedge",
    "wigner_ambiguity_check",
]
