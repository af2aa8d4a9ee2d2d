"""Exception types shared across the package."""


class QPLError(Exception):
    """Base class for all errors raised by qpl."""


class UnsupportedModelError(QPLError, ValueError):
    pass


class DomainError(QPLError, ValueError):
    """An argument lies outside the domain of a map (log branch, g-natural, ...)."""


class SingularityError(QPLError, ValueError):
    """A scalar function hit a pole on the spectrum of an operator."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class DegeneratePointError(QPLError, ValueError):
    """A pointwise linear solve was singular."""

    def __init__(self, message, kernel_dim=0):
        super().__init__(message)
        self.kernel_dim = kernel_dim


class FusionError(QPLError, ValueError):
    pass


class ConvergenceError(QPLError, RuntimeError):
    pass


class WordParseError(QPLError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class InvarianceError(QPLError, ValueError):
    pass
