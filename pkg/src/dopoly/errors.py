"""Exception types raised across the package."""


class DopolyError(Exception):
    """Base class for all library errors."""


class SingularMatrix(DopolyError):
    pass


class PivotBreakdown(DopolyError):
    def __init__(self, index):
        super().__init__(f"zero pivot at index {index}")
        self.index = index


class RankDeficient(DopolyError):
    def __init__(self, message="matrix does not have full column rank", degree=None):
        super().__init__(message)
        self.degree = degree


class DimensionMismatch(DopolyError):
    pass


class ShapeMismatch(DopolyError):
    pass


class NotNonincreasing(DopolyError):
    pass


class InsufficientNodes(DopolyError):
    pass


class ZeroPolynomial(DopolyError):
    pass


class DegreeOutOfRange(DopolyError):
    pass


class ExistenceFailure(DopolyError):
    def __init__(self, degree):
        super().__init__(f"moment matrix M_{degree} is singular; no orthogonal basis exists")
        self.degree = degree


class NotPositive(DopolyError):
    pass


class CoincidentCoordinate(DopolyError):
    pass


class ExhaustedAttempts(DopolyError):
    def __init__(self, count):
        super().__init__(f"no admissible point configuration found in {count} attempts")
        self.count = count


class MalformedInput(DopolyError):
    """A JSON input file does not match the expected layout."""
