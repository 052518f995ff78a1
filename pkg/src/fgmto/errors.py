"""Exception hierarchy shared by all subpackages."""


class FgmtoError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FgmtoError, ValueError):
    """An argument lies outside its admissible range."""


class InvertedElement(FgmtoError):
    """A deformation with det(F) <= 0 reached a constitutive evaluation."""


class StepUnderflow(FgmtoError):
    """The adaptive Newton driver shrank the pseudo-time step below dt_min."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class SingularTangent(FgmtoError):
    """The tangent stiffness could not be factorized."""


class NotConverged(FgmtoError):
    """Sensitivities were requested on an equilibrium that did not converge."""


class ShapeMismatch(FgmtoError, ValueError):
    """Two fields that must share a resolution do not."""


class SingularSystem(FgmtoError):
    """The periodic homogenization system is rank deficient."""


class NonPhysical(FgmtoError):
    """A projected effective modulus is not positive."""


class IllConditioned(FgmtoError):
    """The GP correlation matrix could not be factorized at any allowed nugget."""


class IoError(FgmtoError, OSError):
    """An artifact could not be written or read."""
