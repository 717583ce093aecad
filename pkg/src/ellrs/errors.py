"""Exception hierarchy shared by all modules."""


class EllRSError(Exception):
    """Base class for every error raised by the package."""


class NonConvergent(EllRSError):
    """A series did not meet its tail bound within the allowed number of terms."""


class InvalidModulus(EllRSError, ValueError):
    """The modular parameter does not lie in the upper half plane."""


class PoleAtLatticePoint(EllRSError):
    """A logarithmic derivative was requested at a zero of sigma."""


class DerivativeMismatch(EllRSError):
    """Analytic and finite-difference derivatives disagree."""


class SingularConfiguration(EllRSError):
    """The phase point is too close to a collision or a sigma zero."""


class SpectralPole(EllRSError):
    """A spectral parameter sits on (or too close to) a pole."""


class IllConditioned(EllRSError):
    """A matrix inversion exceeded the condition-number threshold."""


class DegenerateTuple(EllRSError):
    """The Vandermonde right-hand side vanishes for the given tuple."""


class ParseError(EllRSError, ValueError):
    """A configuration document could not be parsed."""


class ValidationError(EllRSError, ValueError):
    """A configuration value is outside its allowed range."""


class UnknownSubcommand(EllRSError):
    """The command-line front end received an unknown subcommand or check."""
