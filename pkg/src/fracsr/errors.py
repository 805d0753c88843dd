"""Exception hierarchy shared by every fracsr module."""


class FracSRError(Exception):
    """Base class for all errors raised by fracsr."""


class DomainError(FracSRError, ValueError):
    """A numeric argument lies outside the domain an operation accepts."""


class ConfigurationError(FracSRError, ValueError):
    """Invalid or inconsistent configuration (empty grids, empty mask banks...)."""


class DimensionError(FracSRError, ValueError):
    """Array shapes do not satisfy an operation's contract."""


class DivergenceError(FracSRError, ArithmeticError):
    """The reconstruction iteration produced a non-finite energy or gradient."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"reconstruction diverged at iteration {iteration}")


class ImageIOError(FracSRError, OSError):
    """An image file could not be read or written."""

    def __init__(self, path, reason):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")
