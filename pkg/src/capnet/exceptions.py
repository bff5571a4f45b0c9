"""Exception hierarchy shared across subpackages."""


class CapnetError(Exception):
    """Base class for all library errors."""


class DisconnectedError(CapnetError):
    """Terminals are not joined by positive-admittance edges."""


class EnumerationTooLarge(CapnetError):
    pass


class InadmissibleError(CapnetError):
    """The landscape violates a structural assumption (branching saddle,
    degenerate saddle without profiles, overlapping bridges, ...)."""


class ProfileError(CapnetError, ValueError):
    pass


class OracleError(CapnetError):
    """Finite-difference capacity solve failed."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NetworkFormatError(CapnetError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
