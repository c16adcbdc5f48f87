"""Exception hierarchy shared by every module.

The CLI maps :class:`ResourceLimitError` to exit code 3 and every other
:class:`VertexConeError` caused by bad input to exit code 2.
"""


class VertexConeError(Exception):
    """Base class for all library errors."""


class InvalidInputError(VertexConeError, ValueError):
    pass


class NotInvertibleError(VertexConeError, ArithmeticError):
    pass


class ResourceLimitError(VertexConeError):
    """A configured budget (points, nodes, cells, time) was exhausted.

    ``estimate`` carries whatever the caller knows about the size of the
    work that did not fit, e.g. a configuration count lower bound.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NotInSimplexError(VertexConeError, ValueError):
    pass


class SingularBasisError(VertexConeError, ValueError):
    pass


class PreconditionViolatedError(VertexConeError, ValueError):
    pass


class InsufficientWeightError(VertexConeError, ValueError):
    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NoDecompositionError(VertexConeError, ValueError):
    pass


class NoCertificateError(VertexConeError):
    pass
