"""Exception types shared across the package."""


class GraphCurvError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(GraphCurvError):
    """The input document is structurally malformed."""


class InvariantError(GraphCurvError):
    """The input violates a graph invariant (symmetry, positivity, connectivity)."""


class UnknownVertex(GraphCurvError, KeyError):
    """A vertex id is not present in the graph."""


class DomainError(GraphCurvError, ValueError):
    """A numeric argument lies outside its admissible domain."""


class NumericalFailure(GraphCurvError):
    """A numerical routine failed to produce a usable result."""


class NoFiniteCurvature(NumericalFailure):
    """No feasible curvature bound was found after bracket expansion."""


class PerronFailure(NumericalFailure):
    """The computed ground state is not strictly positive on a connected graph."""


class TooLarge(GraphCurvError):
    """The graph exceeds the size limit of an exhaustive algorithm."""
