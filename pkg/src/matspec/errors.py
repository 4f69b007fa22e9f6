"""Exception hierarchy shared by every matspec module."""


class MatspecError(Exception):
    """Base class; the CLI maps it to exit status 1."""


class InvalidInputError(MatspecError, ValueError):
    """Malformed user input (potential files, grids, parameters). Exit status 2."""


class UnsupportedDerivativeError(MatspecError):
    pass


class EvaluationError(MatspecError):
    """NaN/Inf produced while sampling a potential."""


class DivergenceError(MatspecError):
    pass


class StiffnessError(MatspecError):
    def __init__(self, x, message=None):
        self.x = float(x)
        super().__init__(message or f"step size underflow at x={self.x:.17g}")


class BranchPointError(MatspecError, ValueError):
    pass


class ContractError(MatspecError, ValueError):
    pass


class DomainError(MatspecError, ValueError):
    pass


class SingularDensityError(MatspecError):
    """B(lambda) numerically singular; typically an embedded resonance."""


class ResolventError(MatspecError):
    pass


class GradingError(MatspecError):
    pass


class TrackingError(MatspecError):
    """Continuous-logarithm tracking could not resolve the winding of det S."""


class CoverageError(MatspecError, ValueError):
    pass


class FitDivergenceError(MatspecError):
    pass
