"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: domain errors exit 1, numeric
errors exit 2 and I/O errors exit 3.
"""


class CoupledError(Exception):
    """Base class for all package errors."""


class DomainError(CoupledError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateSampleError(DomainError):
    """A sample coincides with the location, so its log-distance is undefined."""

    def __init__(self, index, value, mu):
        self.index = index
        self.value = value
        self.mu = mu
        super().__init__(
            f"sample at index {index} equals the location mu={mu!r} "
            f"(value={value!r}); log|x - mu| is undefined"
        )


class NumericError(CoupledError, ArithmeticError):
    """A numerical procedure (quadrature, root finding) failed to converge."""

    def __init__(self, message, **diagnostics):
        self.diagnostics = diagnostics
        if diagnostics:
            detail = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({detail})"
        super().__init__(message)


class ArtifactIOError(CoupledError, OSError):
    """Reading or writing an artifact file failed."""

    def __init__(self, path, reason):
        self.path = str(path)
        super().__init__(f"{path}: {reason}")
