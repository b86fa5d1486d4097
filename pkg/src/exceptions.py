__all__ = [
    "SelfadjointException",
    "InvalidInputError",
    "DomainError",
    "ResolutionError",
    "ConstructionViolationError",
    "BoundaryConvergenceError",
    "CutEvaluationError",
    "ParameterError",
    "DegenerateInputError",
    "AssemblyError",
    "ConfigInvalidError",
]


class SelfadjointException(Exception):
    """Base exception for the selfadjoint package"""

    pass


class InvalidInputError(SelfadjointException):
    """Samples are not finite, or shapes do not match their grids"""

    pass


class DomainError(SelfadjointException):
    """An argument lies outside the domain of an operation
    (a window containing 0, a node at μ = 0, a translation
    leaving the grid, ...)"""

    pass


class ResolutionError(SelfadjointException):
    """A grid is too coarse or too short for the requested evaluation"""

    def __init__(self, message: str, needed: int | None = None):
        super().__init__(message)
        self.needed = needed


class ConstructionViolationError(SelfadjointException):
    """A constructed object fails a condition that holds exactly by construction"""

    pass


class BoundaryConvergenceError(SelfadjointException):
    """Boundary values did not converge along the η ladder"""

    def __init__(self, message: str, ratios=None):
        super().__init__(message)
        self.ratios = ratios


class CutEvaluationError(SelfadjointException):
    """An analytic function was evaluated on one of its branch cuts"""

    pass


class ParameterError(SelfadjointException):
    """Parameters violate a hypothesis of a construction"""

    pass


class DegenerateInputError(SelfadjointException):
    """Input is degenerate (zero vector, zero coefficient, ...)"""

    pass


class AssemblyError(SelfadjointException):
    """A discretized operator failed its Hermiticity check"""

    pass


class ConfigInvalidError(SelfadjointException):
    """Run configuration or parameter file is not valid"""

    pass
