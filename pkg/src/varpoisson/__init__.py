"""Exact computer algebra for variational Poisson structures."""

from .diffpoly import (
    DiffPoly,
    LocalFunctional,
    antiderivative,
    evolutionary_apply,
    format_poly,
    functional_equal,
    homotopy_integrate,
    partial_derivative,
    total_derivative,
    u,
    variational_derivative,
)
from .matop import MatDiffOp, d_operator, format_op_entry, frechet
from .polyvec import (
    LambdaPoly,
    PolyVector,
    box_product,
    bracket_k_functional,
    bracket_op_functional,
    bracket_vf_functional,
    bracket_vf_op,
    format_lambda_poly,
    from_operator,
    lambda_bracket,
    schouten,
    to_operator,
    triple_bracket,
)
from .hamcoh import (
    AlphaMap,
    CohomologyReport,
    a_space_member,
    alpha_map,
    casimir_basis,
    cohomology_dimensions,
    delta_K,
    gram_on_kernel,
    inner_product,
    is_compatible,
    is_essential,
    is_hamiltonian,
    sigma_space,
)
from .superlie import (
    GrassmannElem,
    HtildeElem,
    SuperDerivation,
    full_prolongation,
    grassmann_mul,
    htilde_bracket,
    htilde_dims,
    iso_check_translation_case,
    phi_S_embed,
    poisson_bracket_S,
    so_basis,
    vA_map_bijective,
)
from .magri import (
    HierarchyState,
    build_hierarchy,
    evolution_equation,
    involution_check,
    lenard_step,
)
from .cli import (
    ParseError,
    emit_report,
    parse_expr,
    parse_op_entry,
    parse_operator,
    print_expr,
)

__all__ = [
    "DiffPoly",
    "LocalFunctional",
    "antiderivative",
    "evolutionary_apply",
    "format_poly",
    "functional_equal",
    "homotopy_integrate",
    "partial_derivative",
    "total_derivative",
    "u",
    "variational_derivative",
    "MatDiffOp",
    "d_operator",
    "format_op_entry",
    "frechet",
    "LambdaPoly",
    "PolyVector",
    "box_product",
    "bracket_k_functional",
    "bracket_op_functional",
    "bracket_vf_functional",
    "bracket_vf_op",
    "format_lambda_poly",
    "from_operator",
    "lambda_bracket",
    "schouten",
    "to_operator",
    "triple_bracket",
    "AlphaMap",
    "CohomologyReport",
    "a_space_member",
    "alpha_map",
    "casimir_basis",
    "cohomology_dimensions",
    "delta_K",
    "gram_on_kernel",
    "inner_product",
    "is_compatible",
    "is_essential",
    "is_hamiltonian",
    "sigma_space",
    "GrassmannElem",
    "HtildeElem",
    "SuperDerivation",
    "full_prolongation",
    "grassmann_mul",
    "htilde_bracket",
    "htilde_dims",
    "iso_check_translation_case",
    "phi_S_embed",
    "poisson_bracket_S",
    "so_basis",
    "vA_map_bijective",
    "HierarchyState",
    "build_hierarchy",
    "evolution_equation",
    "involution_check",
    "lenard_step",
    "ParseError",
    "emit_report",
    "parse_expr",
    "parse_op_entry",
    "parse_operator",
    "print_expr",
]
