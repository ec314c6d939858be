"""Exception hierarchy for the summability engine."""


class SummaError(Exception):
    """Base class for engine errors."""


class SchemaError(SummaError):
    """Malformed or inconsistent job document."""


class DimensionMismatch(SchemaError):
    """Objects with incompatible vector dimensions."""


class UnknownLabel(SchemaError):
    """Reference to an undeclared label."""


class InvalidTailModel(SchemaError):
    """Structurally invalid tail declaration (ratio >= 1, entry outside band, ...)."""


class NotInDomain(SummaError):
    """A transform row has no certified convergent evaluation."""


class HorizonTooSmall(SummaError):
    """The evaluation horizon cannot certify any verdict."""


class ArityMismatch(SummaError):
    """Selection arity differs from the family size."""


class BudgetExceeded(SummaError):
    """Enumeration request exceeds the configured budget."""


class PreconditionError(SummaError):
    """A checker precondition fails (missing dual base, unbounded matrix, ...)."""


class DivergentGroupNorm(SummaError):
    """A group norm's certified lower bound crossed the supplied threshold."""


class CrossValidationError(SummaError):
    """Two redundant evaluation routes disagreed; indicates an engine bug."""
