"""Numerical modular theory on matrix algebras.

The package realizes the standard form of a faithful state on the n x n
matrices, the modular flow and its quarter-shift calculus, weighted
Dirichlet forms built from flow-twisted derivations, detailed-balance
Lindblad generators, and the Markovian semigroups the forms generate --
together with verification suites that check the structural identities
numerically.

Quick start::

    import numpy as np
    from mdf import build_standard_form, dirichlet_operator, semigroup_operator

    sf = build_standard_form(np.diag([0.75, 0.25]))
    H = dirichlet_operator(sf, np.array([[0.0, 1.0], [1.0, 0.0]]))
    T = semigroup_operator(H, t=1.0)
"""

__version__ = "0.1.0"

from .errors import (
    BalanceViolated,
    DimMismatch,
    EngineDisagreement,
    MdfError,
    NoConvergence,
    NotAdmissible,
    NotAState,
    NotFaithful,
    NotJReal,
    NotSelfAdjoint,
    Overflow,
    QuadratureNotConverged,
    SchemaError,
)
from .kernels import (
    AdmissibilityCertificate,
    BoundaryCombination,
    CauchyKernel,
    CosineModulatedF0,
    F0Kernel,
    KernelFunction,
    TabulatedKernel,
    check_admissible,
    kernel_from_descriptor,
)
from .standard_form import (
    DensityMatrix,
    StandardForm,
    SuperOperator,
    build_standard_form,
    gibbs_state,
    jordan_decompose,
    left_act,
    project_order_interval,
    right_j_act,
    symmetric_embed,
    symmetric_unembed,
    tracial_state,
)
from .modular import (
    D_MINUS_QUARTER,
    D_PLUS_QUARTER,
    S_MAP,
    T_MAP,
    apply_I0,
    boundary_combination_smear,
    modular_map,
    sigma,
    smear,
    smear_quadrature,
    superop_flow_factors,
    superop_modular_map,
    superop_sigma,
    superop_smear,
    superop_smear_quadrature,
)
from .dirichlet import (
    DirichletReport,
    DirichletSpec,
    coupling_quadratic,
    crosscheck_engines,
    derivation_at,
    dirichlet_operator,
    ensure_admissible,
    form_eval,
    split_self_adjoint,
    verify_boundary_shift,
    verify_dirichlet,
)
from .lindblad import (
    BalanceReport,
    LindbladSpec,
    SelfAdjointnessReport,
    TracialReport,
    build_Q,
    check_balance_condition,
    couplings_of,
    criterion_matches_adjoint_gap,
    decompose_H,
    decomposition_residual,
    general_f_embedding_residual,
    general_f_generator,
    induced_adjoint_shifted,
    induced_operator,
    induced_operator_shifted,
    kms_symmetry_residual,
    lindblad_apply,
    lindblad_superop,
    selfadjoint_component_decomposition,
    selfadjointness_residual,
    spec_from_couplings,
    tracial_symmetric_generator,
    verify_tracial_case,
    y_reconstruction_residual,
)
from .semigroup import (
    MarkovianityReport,
    SemigroupProbe,
    evolve,
    markovianity_report,
    nonmarkovian_control,
    semigroup_operator,
    spectral_gap,
)

__all__ = [
    "__version__",
    # errors
    "MdfError",
    "NotAState",
    "NotFaithful",
    "DimMismatch",
    "NotJReal",
    "NoConvergence",
    "Overflow",
    "QuadratureNotConverged",
    "EngineDisagreement",
    "BalanceViolated",
    "NotAdmissible",
    "NotSelfAdjoint",
    "SchemaError",
    # kernels
    "KernelFunction",
    "F0Kernel",
    "CauchyKernel",
    "CosineModulatedF0",
    "BoundaryCombination",
    "TabulatedKernel",
    "AdmissibilityCertificate",
    "check_admissible",
    "kernel_from_descriptor",
    # standard form
    "DensityMatrix",
    "StandardForm",
    "SuperOperator",
    "build_standard_form",
    "tracial_state",
    "gibbs_state",
    "left_act",
    "right_j_act",
    "jordan_decompose",
    "project_order_interval",
    "symmetric_embed",
    "symmetric_unembed",
    # modular calculus
    "sigma",
    "modular_map",
    "apply_I0",
    "smear",
    "smear_quadrature",
    "boundary_combination_smear",
    "superop_flow_factors",
    "superop_sigma",
    "superop_smear",
    "superop_smear_quadrature",
    "superop_modular_map",
    "D_PLUS_QUARTER",
    "D_MINUS_QUARTER",
    "T_MAP",
    "S_MAP",
    # dirichlet forms
    "DirichletSpec",
    "DirichletReport",
    "dirichlet_operator",
    "form_eval",
    "derivation_at",
    "coupling_quadratic",
    "split_self_adjoint",
    "crosscheck_engines",
    "verify_boundary_shift",
    "verify_dirichlet",
    "ensure_admissible",
    # lindblad
    "LindbladSpec",
    "BalanceReport",
    "SelfAdjointnessReport",
    "TracialReport",
    "lindblad_superop",
    "lindblad_apply",
    "induced_operator",
    "induced_operator_shifted",
    "induced_adjoint_shifted",
    "build_Q",
    "couplings_of",
    "spec_from_couplings",
    "check_balance_condition",
    "selfadjointness_residual",
    "criterion_matches_adjoint_gap",
    "decompose_H",
    "decomposition_residual",
    "selfadjoint_component_decomposition",
    "y_reconstruction_residual",
    "kms_symmetry_residual",
    "general_f_generator",
    "general_f_embedding_residual",
    "tracial_symmetric_generator",
    "verify_tracial_case",
    # semigroup
    "SemigroupProbe",
    "MarkovianityReport",
    "semigroup_operator",
    "evolve",
    "spectral_gap",
    "markovianity_report",
    "nonmarkovian_control",
]
