"""Numerically verified contact geometry on coordinate charts.

The package computes the structure fields of an exact contact form --
the Reeb field, Hamiltonian fields, the induced bracket -- directly from
the defining linear systems at sampled points, verifies the classical
identities relating them, builds the symplectic cone with its lifted
dynamics, bundles a library of closed-form model systems with independently
derived expected facts, and carries an exact-arithmetic toolkit for a family
of toric contact structures indexed by two coprime integers.

Layers, bottom up:

- :mod:`contactkit.expressions` -- immutable symbolic scalars with exact
  derivatives and vectorized evaluation.
- :mod:`contactkit.charts` -- coordinate charts with seeded sampling, vector
  fields, and differential forms up to degree 3 (exterior and Lie calculus).
- :mod:`contactkit.contact` -- contact systems and every pointwise solver
  and identity check built on them.
- :mod:`contactkit.cone` -- the symplectic cone, Liouville scaling, and
  lifts of infinitesimal contact transformations.
- :mod:`contactkit.models` -- closed-form model families bundled with their
  expected facts.
- :mod:`contactkit.ypq` -- exact lattice data of the two-parameter toric
  family, from weight vectors to quotient invariants.
- :mod:`contactkit.cli` -- the ``contactkit`` command (``verify``,
  ``bracket``, ``ypq``).
"""

from .charts import (
    Chart,
    ChartMismatchError,
    DifferentialForm,
    FormDegreeError,
    SamplingError,
    VectorField,
    basis_field,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    one_form,
    seeded_rng,
    two_form,
    vector_field,
    wedge,
    zero_form,
)
from .cone import (
    ConeSystem,
    ContactTransformationError,
    build_cone,
    closure_check,
    commuting_lift_check,
    cone_hamiltonian,
    homogeneity_check,
    lift,
    lift_checks,
    nondegeneracy_check,
    reeb_rate,
    scale_covariance_check,
)
from .contact import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    TOLERANCES,
    CheckResult,
    ClassificationRecord,
    ConformalFactorError,
    ContactConditionError,
    ContactSystem,
    CoordinateMap,
    GeometricError,
    InverseMismatchError,
    SingularSystemError,
    classify_system,
    conformal_bracket_law,
    conjugacy_transport,
    hamiltonian_contract_checks,
    hamiltonian_field,
    independence_rank,
    involution_table,
    is_contact_form,
    is_first_integral,
    is_good,
    isotropy_defect,
    jacobi_bracket,
    reeb_defining_check,
    reeb_field,
    resolve_tolerance,
    verify_flow_identity,
)
from .expressions import (
    EvalDomainError,
    ExprError,
    ExprSyntaxError,
    ScalarExpr,
    UnknownCoordinateError,
    const,
    coord,
    cos,
    exp,
    parse,
    random_polynomial,
    sin,
    sqrt,
)
from .models import (
    ExpectedFact,
    ModelDescriptor,
    basic_example,
    build_model,
    cosphere_torus,
    darboux,
    default_model_keys,
    heisenberg,
    sphere_weighted,
)
from .ypq import (
    InvalidToricParameterError,
    LevelSetSample,
    YpqParams,
    YpqReport,
    circle_pairing_check,
    circle_weights,
    classify,
    coprime_pairs,
    enumerate_structures,
    hirzebruch_data,
    homogeneous_coordinate_check,
    is_free,
    moment_circle,
    moment_t4,
    quotient_kahler_data,
    quotient_reeb_weights,
    reeb_positivity,
    reeb_weights,
    reparametrize_torus,
    sample_level_set,
    sasaki_cone_membership,
    totient,
    vertex_minimum,
    ypq_report,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # expressions
    "ScalarExpr",
    "parse",
    "const",
    "coord",
    "sin",
    "cos",
    "exp",
    "sqrt",
    "random_polynomial",
    "ExprError",
    "ExprSyntaxError",
    "UnknownCoordinateError",
    "EvalDomainError",
    # charts
    "Chart",
    "VectorField",
    "DifferentialForm",
    "zero_form",
    "one_form",
    "two_form",
    "vector_field",
    "basis_field",
    "exterior_derivative",
    "wedge",
    "interior_product",
    "lie_bracket",
    "lie_derivative",
    "seeded_rng",
    "FormDegreeError",
    "ChartMismatchError",
    "SamplingError",
    # contact
    "ContactSystem",
    "CheckResult",
    "ClassificationRecord",
    "CoordinateMap",
    "TOLERANCES",
    "DEFAULT_SEED",
    "DEFAULT_SAMPLES",
    "resolve_tolerance",
    "is_contact_form",
    "reeb_field",
    "hamiltonian_field",
    "jacobi_bracket",
    "is_good",
    "is_first_integral",
    "verify_flow_identity",
    "isotropy_defect",
    "involution_table",
    "independence_rank",
    "classify_system",
    "conformal_bracket_law",
    "conjugacy_transport",
    "reeb_defining_check",
    "hamiltonian_contract_checks",
    "GeometricError",
    "ContactConditionError",
    "SingularSystemError",
    "ConformalFactorError",
    "InverseMismatchError",
    # cone
    "ConeSystem",
    "build_cone",
    "closure_check",
    "nondegeneracy_check",
    "homogeneity_check",
    "scale_covariance_check",
    "reeb_rate",
    "lift",
    "lift_checks",
    "cone_hamiltonian",
    "commuting_lift_check",
    "ContactTransformationError",
    # models
    "ExpectedFact",
    "ModelDescriptor",
    "build_model",
    "default_model_keys",
    "darboux",
    "heisenberg",
    "cosphere_torus",
    "basic_example",
    "sphere_weighted",
    # ypq
    "YpqParams",
    "YpqReport",
    "LevelSetSample",
    "InvalidToricParameterError",
    "circle_weights",
    "reeb_weights",
    "quotient_reeb_weights",
    "moment_t4",
    "moment_circle",
    "is_free",
    "sample_level_set",
    "vertex_minimum",
    "reeb_positivity",
    "circle_pairing_check",
    "sasaki_cone_membership",
    "reparametrize_torus",
    "homogeneous_coordinate_check",
    "hirzebruch_data",
    "quotient_kahler_data",
    "classify",
    "totient",
    "coprime_pairs",
    "ypq_report",
    "enumerate_structures",
]
