"""Exception types shared across the package."""


class VPatchError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidShape(VPatchError):
    """Boundary data does not describe a valid simple patch."""


class OutsideUnitDisc(VPatchError):
    """Patch (or an advected node) leaves the closed unit disc."""


class InvalidResolution(VPatchError):
    """Node count below the supported minimum or not even."""


class SingularArgument(VPatchError):
    """Kernel evaluated at a point of its singular set."""


class InvalidArgument(VPatchError):
    """Scalar argument outside its documented range."""


class SolverFailure(VPatchError):
    """Linear system too ill-conditioned to trust."""


class OutOfDomain(VPatchError):
    """Evaluation point outside the patch (or too close to its boundary)."""


class NoConvergence(VPatchError):
    """Newton iteration did not reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BlowupDetected(VPatchError):
    """Contour-dynamics node left the unit disc during a run."""


class ReparamFailure(VPatchError):
    """Boundary nodes clustered beyond the allowed spacing ratio."""


class ParseError(VPatchError):
    """Malformed patch file; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
