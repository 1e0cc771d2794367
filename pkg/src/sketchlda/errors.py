"""Exception hierarchy shared by the library and the CLI."""


class SketchLdaError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(SketchLdaError, ValueError):
    """Inputs violate a documented precondition."""

    exit_code = 2


class LoadError(ValidationError):
    """A data file could not be parsed into a dataset."""


class BoundInvalidError(ValidationError):
    """Step size lies outside the range where a convergence bound holds."""


class NumericalError(SketchLdaError, ArithmeticError):
    """A numerical routine failed (non-convergence, singularity, ...)."""

    exit_code = 3


class SingularCovarianceError(NumericalError):
    def __init__(self, eigenvalue, threshold):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        super().__init__(
            f"pooled covariance is numerically singular: smallest eigenvalue "
            f"{eigenvalue:.6g} <= threshold {threshold:.6g}"
        )


class DegenerateDirectionError(NumericalError):
    """Direction is zero or orthogonal to the centroid difference."""


class RkRunError(NumericalError):
    """A Kaczmarz run aborted; carries the last checkpoint reached."""

    def __init__(self, message, last_checkpoint=None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint
