"""Least angle regression with marginality-constrained variable selection."""

__version__ = "0.1.0"

from .design import (
    DesignMatrix,
    SecondOrderFeatures,
    TermDescriptor,
    add_factor,
    expand_second_order,
    main_effects_only,
)
from .estimators import Lars, ModifiedLars
from .exceptions import (
    ConstantColumnError,
    HlarsError,
    RankDeficientError,
    TermNeverEnteredError,
    UnknownTermError,
)
from .hierarchy import (
    DependencyStructure,
    FactorGroup,
    expand_active,
    factor_design_columns,
    marginality_dependencies,
)
from .lars import (
    LarsPath,
    PathStep,
    active_set,
    coefficients_along_path,
    current_correlations,
    gamma_step,
    lars_fit,
    modified_lars_fit,
)
from .linalg import StandardizationRecord, crossprod, least_squares, standardize
from .simulate import (
    SelectionHistogram,
    SimConfig,
    correlation_ratio_check,
    gen_model1,
    replicate_study,
    selection_steps,
)

__all__ = [
    "ConstantColumnError", "DependencyStructure", "DesignMatrix", "FactorGroup", "HlarsError",
    "Lars", "LarsPath", "ModifiedLars", "PathStep", "RankDeficientError", "SecondOrderFeatures",
    "SelectionHistogram", "SimConfig", "StandardizationRecord", "TermDescriptor",
    "TermNeverEnteredError", "UnknownTermError", "active_set", "add_factor",
    "coefficients_along_path", "correlation_ratio_check", "crossprod", "current_correlations",
    "expand_active", "expand_second_order", "factor_design_columns", "gamma_step",
    "gen_model1", "lars_fit", "least_squares", "main_effects_only", "marginality_dependencies",
    "modified_lars_fit", "replicate_study", "selection_steps", "standardize",
]
