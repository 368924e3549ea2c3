"""Finite-dimensional toolkit for operators whose polar parts generate

the same algebra: polar decomposition a = U|a|, partial-isometry and
endomorphism checks for U, towers of coefficient algebras, banded
(graded) elements with a coefficient-only norm estimate, and an exact
normal-ordering calculus for words over {a, a*} under aa* = q a*a + h.
"""

from .algebra import (
    FunctionCertificate,
    MatrixAlgebra,
    algebras_equal,
    bicommutant,
    commutant,
    contains,
    generate,
    is_commutative,
    is_function_of,
    is_function_of_family,
    is_ideal_in,
    joint_eigenbasis,
    linear_span,
    spectral_algebra,
)
from .errors import (
    BandwidthOverflow,
    CommutantViolation,
    ConfigError,
    DimensionOverflow,
    DimensionTooSmall,
    HypothesisViolated,
    InvalidSpec,
    ModelMismatch,
    ModelNotGraded,
    NotHermitian,
    NotSubalgebra,
    ParseError,
    PolarkitError,
    RelationViolated,
    SupportViolation,
    UnsupportedPhi,
    ZeroElement,
)
from .graded import (
    GradedElement,
    GradedModel,
    NormEstimate,
    PropertyStarReport,
    SumNormReport,
    TransportReport,
    check_property_star,
    extract_N,
    gauge_average_N0,
    graded_adjoint,
    graded_mul,
    norm_estimate,
    random_element,
    realize,
    regrade,
    sum_norm_inequalities,
    transport_compare,
)
from .isometry import (
    CommutingProjectionReport,
    ConditionCheck,
    MorphismReport,
    PartialIsometryReport,
    PowerIsometryReport,
    commuting_projection_properties,
    final_projection,
    initial_projection,
    is_partial_isometry,
    morphism_check,
    nilpotent_index,
    partial_isometry_report,
    power_isometry_check,
    power_projections,
)
from .linalg import (
    DEFAULT_TOL,
    PolarDecomposition,
    dagger,
    hermitian_sqrt,
    operator_norm,
    polar_decompose,
    rough_norm,
)
from .models import (
    KINDS,
    ModelSpec,
    ModelValidation,
    build,
    custom,
    hamiltonian,
    jordan_block,
    normal,
    phi_for,
    q_lambda,
    q_oscillator,
    validate_model,
    weighted_shift,
)
from .relation import (
    CoefficientAlgebraReport,
    RelationCertificate,
    Theorem22Report,
    build_calB,
    coefficient_algebra,
    graded_model_for,
    nonunital_seed,
    theorem22_report,
    verify_I1,
)
from .report import SuiteConfig, config_from_json, report_to_json, report_to_text, run_suite
from .serialize import (
    dumps_canonical,
    matrix_from_json,
    matrix_to_json,
    model_spec_from_json,
    model_spec_to_json,
    normal_form_from_json,
    normal_form_to_json,
    read_matrix,
    write_matrix,
)
from .tower import (
    EndoPair,
    HypothesesReport,
    TheoremReport,
    TowerReport,
    build_tower,
    delta_apply,
    endo_pair,
    hypotheses_check,
    verify_tower_theorems,
)
from .words import (
    NF_ONE,
    NormalForm,
    PhiMap,
    b_graded_decompose,
    deg,
    evaluate,
    evaluate_terms,
    interior_projection,
    nf_mul,
    normal_order,
    parse_word,
)

__version__ = "0.1.0"
