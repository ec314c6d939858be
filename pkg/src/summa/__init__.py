"""summa: a desk-scale computational summability engine.

Evaluates matrix transforms of sequences with certified truncation error,
decides regularity condition lists, computes ideal limits, cluster points
and cores, and exercises the row-selection equivalence and the uniform
limsup identity with brute-force and adversarial oracles.  Exact rational
arithmetic throughout; interval enclosures for irrational inputs.
"""

__version__ = "0.1.0"

from .errors import (
    ArityMismatch,
    BudgetExceeded,
    CrossValidationError,
    DimensionMismatch,
    DivergentGroupNorm,
    HorizonTooSmall,
    InvalidTailModel,
    NotInDomain,
    PreconditionError,
    SchemaError,
    SummaError,
    UnknownLabel,
)
from .ideals import (
    ClusterReport,
    HorizonParams,
    IdealLimit,
    IdealSpec,
    Trilean,
    Verdict,
    cluster_points,
    core,
    ideal_contains,
    ideal_lim,
    ideal_liminf,
    ideal_limsup,
)
from .model import (
    MatrixFamily,
    OperatorEntry,
    OperatorMatrix,
    VectorSequence,
    entry_norm,
)
from .regularity import (
    ConditionReport,
    TargetOperator,
    check_core_inclusion,
    check_maps_to_zero,
    check_regular_family,
    check_regular_singleton,
    check_uniform_core_inclusion,
)
from .selection import (
    EnumParams,
    SelectionSeq,
    adversarial_limsup_selection,
    enumerate_selections,
    select_matrix,
    test_theorem_equivalence,
    uniform_limit,
    verify_uniform_limsup_identity,
)
from .sets import SetDescriptor, progression, tails
from .sigma import SigmaMap, check_almost_regular, compose_sigma, sigma_limit, sigma_matrix
from .transform import group_norm, in_domain, matrix_norm, row_apply, transform
from .document import parse_spec_document, serialize_document
