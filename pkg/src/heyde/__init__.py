"""Characterization machinery on groups R x Z(2) x G (G finite Abelian,
odd order): atomic signed measures, the two-Gaussian distribution class,
the conditional-symmetry functional equation, the constructive
decomposition of equation instances, and the rigidity decision."""

__version__ = "0.1.0"

from .ambient import (
    AmbientGroup,
    XAutomorphism,
    XPoint,
    YAutomorphism,
    YPoint,
    annihilator_of_real_line,
    pair,
    real_z2_group,
)
from .finite_abelian import (
    DualCharacter,
    FiniteAbelianGroup,
    GroupAutomorphism,
    GroupElement,
    char_table,
    eval_character,
    identity_automorphism,
    is_subgroup,
    kernel_of_I_plus,
    negation_automorphism,
    order_of,
    restriction_is_minus_identity,
    scalar_automorphism,
)
from .measures import (
    AtomicSignedMeasure,
    DistributionVerdict,
    char_fn,
    convolve,
    density_profile,
    dirac,
    is_distribution,
    max_modulus_check,
    measures_close,
    sample,
    sample_arrays,
    support_in_annihilator,
    two_term_bound,
)
from .structure import (
    Decomposition,
    DecompositionError,
    GeneratedInstance,
    InfeasibleSpec,
    InstanceSpec,
    RigidityResult,
    check_cross_constraints,
    cross_constraint_residuals,
    decompose,
    derive_partner_params,
    factor_exchange,
    generate_instance,
    lambda_tau_criterion,
    rigidity_decision,
    tau_from_coefficients,
)
from .symmetry import (
    DeltaRelation,
    McReport,
    ResidualReport,
    SGrid,
    char_sup_distance,
    default_s_scale,
    delta_relation,
    equation_residual,
    equation_residual_report,
    finite_exact_check,
    mc_symmetry_test,
    ratio_probe_scale,
)
from .theta import (
    PiMeasure,
    ThetaParams,
    ThetaShapeError,
    is_in_theta,
    lambda_signed,
    measure_to_theta,
    rho_extremal,
    theta_to_measure,
    theta_verdict,
)

__all__ = [
    "__version__",
    "AmbientGroup",
    "XAutomorphism",
    "XPoint",
    "YAutomorphism",
    "YPoint",
    "annihilator_of_real_line",
    "pair",
    "real_z2_group",
    "DualCharacter",
    "FiniteAbelianGroup",
    "GroupAutomorphism",
    "GroupElement",
    "char_table",
    "eval_character",
    "identity_automorphism",
    "is_subgroup",
    "kernel_of_I_plus",
    "negation_automorphism",
    "order_of",
    "restriction_is_minus_identity",
    "scalar_automorphism",
    "AtomicSignedMeasure",
    "DistributionVerdict",
    "char_fn",
    "convolve",
    "density_profile",
    "dirac",
    "is_distribution",
    "max_modulus_check",
    "measures_close",
    "sample",
    "sample_arrays",
    "support_in_annihilator",
    "two_term_bound",
    "Decomposition",
    "DecompositionError",
    "GeneratedInstance",
    "InfeasibleSpec",
    "InstanceSpec",
    "RigidityResult",
    "check_cross_constraints",
    "cross_constraint_residuals",
    "decompose",
    "derive_partner_params",
    "factor_exchange",
    "generate_instance",
    "lambda_tau_criterion",
    "rigidity_decision",
    "tau_from_coefficients",
    "DeltaRelation",
    "McReport",
    "ResidualReport",
    "SGrid",
    "char_sup_distance",
    "default_s_scale",
    "delta_relation",
    "equation_residual",
    "equation_residual_report",
    "finite_exact_check",
    "mc_symmetry_test",
    "ratio_probe_scale",
    "PiMeasure",
    "ThetaParams",
    "ThetaShapeError",
    "is_in_theta",
    "lambda_signed",
    "measure_to_theta",
    "rho_extremal",
    "theta_to_measure",
    "theta_verdict",
]
