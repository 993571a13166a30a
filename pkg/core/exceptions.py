"""
MagLat - Custom Exceptions
==========================
Structured error handling for the toolkit.
"""


class MagLatError(Exception):
    """Base exception for all MagLat errors."""

    exit_code = 1

    def __init__(self, message: str, details: str | None = None):
        """
        Initialize the exception.

        Args:
            message: Human-readable error message.
            details: Optional technical details for debugging.
        """
        self.message = message
        self.details = details
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} ({self.details})"
        return self.message


class ConfigError(MagLatError):
    """Raised when a run configuration is malformed or violates the schema."""

    exit_code = 2

    def __init__(self, path: str, reason: str):
        """
        Initialize the exception.

        Args:
            path: Dotted path of the offending field ("" for the document).
            reason: Why the value was rejected.
        """
        self.path = path
        super().__init__(
            message=f"Invalid configuration: {reason}",
            details=f"Field: {path or '<root>'}"
        )


class FieldError(MagLatError):
    """Raised for invalid magnetic fields or gauge/field mismatches."""

    exit_code = 2

    def __init__(self, kind: str, reason: str):
        """
        Initialize the exception.

        Args:
            kind: Field kind (or kind/gauge pair) being processed.
            reason: Why it was rejected.
        """
        self.kind = kind
        super().__init__(
            message=f"Field rejected: {reason}",
            details=f"Kind: {kind}"
        )


class DomainError(MagLatError):
    """Raised when an operation is not defined on the given lattice domain."""

    exit_code = 2

    def __init__(self, domain: str, reason: str):
        """
        Initialize the exception.

        Args:
            domain: Description of the lattice domain.
            reason: Why the operation is not available.
        """
        self.domain = domain
        super().__init__(
            message=f"Domain error: {reason}",
            details=f"Domain: {domain}"
        )


class NumericalError(MagLatError):
    """Raised when a computation does not converge or breaks an invariant."""

    exit_code = 3

    def __init__(self, operation: str, reason: str):
        """
        Initialize the exception.

        Args:
            operation: The operation that failed.
            reason: Diagnostic description.
        """
        self.operation = operation
        super().__init__(
            message=f"Numerical failure during {operation}",
            details=reason
        )


class GapError(NumericalError):
    """Raised when an energy or interval is not inside a bulk gap."""

    def __init__(self, energy_range: tuple[float, float], reason: str = ""):
        """
        Initialize the exception.

        Args:
            energy_range: The rejected interval (a point is (mu, mu)).
            reason: Optional extra diagnosis.
        """
        self.energy_range = energy_range
        self.operation = "gap check"
        MagLatError.__init__(
            self,
            message=f"not a bulk gap: {reason}" if reason else "not a bulk gap",
            details=f"Energies: [{energy_range[0]:.6g}, {energy_range[1]:.6g}]"
        )


class OutputError(MagLatError):
    """Raised when result files cannot be written."""

    exit_code = 1

    def __init__(self, path: str, reason: str):
        """
        Initialize the exception.

        Args:
            path: Target path.
            reason: Underlying I/O error.
        """
        self.path = path
        super().__init__(
            message=f"Cannot write results: {reason}",
            details=f"Path: {path}"
        )
