"""Error types shared across the package."""


class PreconditionError(ValueError):
    """A run request violates a documented precondition (bad loop, step size,
    adiabaticity ratio, ...).  The CLI maps these to exit code 2."""


class ConfigError(PreconditionError):
    """Malformed or inconsistent experiment configuration; carries the key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
