"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph construction or an operation on an unsuitable graph."""


class CycleError(GraphError):
    """A directed cycle was found where an acyclic graph is required."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle + [self.cycle[0]]))


class UnknownVertexError(GraphError):
    """An operation referenced a vertex that is not in the graph."""

    def __init__(self, name):
        self.vertex = name
        super().__init__(f"unknown vertex: {name!r}")


class QueryError(ValueError):
    """An interventional query is malformed for the given graph."""


class NotFixableError(ValueError):
    """A vertex was fixed (or replayed) when it is not fixable."""


class EvaluationError(ValueError):
    """Numeric evaluation of an expression failed (zero denominator, missing binding)."""


class ExpressionParseError(ValueError):
    """A serialized expression could not be parsed."""
