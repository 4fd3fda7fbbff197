"""Toeplitz matrices over imprimitivity bimodules of finite-dimensional C*-algebras."""

from .adjointable import (
    AdjointableMap,
    adjoint,
    alpha_shift,
    alpha_shift_inverse,
    creation_left,
    creation_right,
    extract_symbol,
    identity_map,
    linearity_residual,
    map_norm,
    multiplier_H,
    multiplier_J,
    random_right_linear_map,
    unit_decomposition,
    zero_map,
)
from .algebra import (
    AlgebraElement,
    CStarAlgebra,
    element_arithmetic,
    faithful_trace,
    operator_norm,
    positivity_check,
)
from .bimodule import (
    Bimodule,
    ModuleElement,
    ValidationReport,
    algebra_as_bimodule,
    bimodule_isomorphism,
    dual_bimodule,
    evaluate_inner,
    module_norm,
    tensor_product,
    validate_bimodule,
)
from .crossed_product import (
    CrossSection,
    convergence_report,
    convolve,
    involute,
    lambda_rep,
    section_distance,
    synthesize_section,
    truncation_safe,
)
from .errors import (
    AxiomViolationError,
    BimoduleError,
    FullnessError,
    InvalidModuleError,
    NotAdjointableError,
    NotCreationOperatorError,
    NotToeplitzError,
    OutOfRangeError,
    StructuralError,
)
from .fileio import (
    Model,
    load_model,
    load_operator,
    load_section,
    save_model,
    save_operator,
    save_section,
)
from .l2 import (
    OperatorMatrix,
    ToeplitzResult,
    WindowedL2Element,
    apply_matrix,
    embed,
    is_toeplitz,
    l2_inner,
    l2_norm,
    project,
    sigma_seminorm,
)
from .ladder import TensorLadder, build_ladder, contract, involution
from .models import BUILTIN_MODELS, ModelSpec, build_bimodule, builtin_models

__version__ = "0.1.0"
