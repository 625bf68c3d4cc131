"""Exception hierarchy shared across the package."""


class SgsynthError(Exception):
    """Base class for all package errors."""


class ParseError(SgsynthError):
    """Malformed input file (bad JSON, missing fields, wrong field types)."""


class ValidationError(SgsynthError):
    """Well-formed input that violates a semantic constraint."""


class ShapeError(ValidationError):
    """Tensor rank or dimensions disagree with the declared signature."""


class MissingEntry(ValidationError):
    """A morphism has no tensor in the valuation."""


class UnknownMorphism(ValidationError):
    pass


class UnknownObject(ValidationError):
    pass


class GraphInvariantError(ValidationError):
    """A string graph violates a structural invariant."""


class NotAnInput(ValidationError):
    pass


class NotAnOutput(ValidationError):
    pass


class TypeMismatch(ValidationError):
    pass


class DuplicateVertex(ValidationError):
    pass


class InvalidEdge(ValidationError):
    pass


class BoundaryMismatch(ValidationError):
    """Rule boundary bijection violates arity, direction or typing."""


class InvalidMatching(SgsynthError):
    """A matching handed to the rewriter fails the matching condition."""


class DimMismatch(ValidationError):
    pass


class DimensionOverflow(SgsynthError):
    """Contraction index space exceeds the configured cap."""


class NormalizationError(SgsynthError):
    """Normalization exceeded its step budget (suspected non-termination)."""
