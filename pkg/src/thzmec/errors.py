"""Exception types shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InfeasibleError(RuntimeError):
    """A demand cannot be met under the given resources.

    ``constraint`` names the violated threshold and ``deficit`` carries how far
    the best achievable value falls short of it (same units as the threshold).
    """

    def __init__(self, message, constraint=None, deficit=None):
        super().__init__(message)
        self.constraint = constraint
        self.deficit = deficit


class NonConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap; ``trace`` holds its history."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class ConfigError(ValueError):
    """A scenario file or override is malformed; ``field`` names the key."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
