"""Exception and warning classes raised by jcpath."""


class JCPathError(Exception):
    """Base class for all jcpath errors."""


class TruncationError(JCPathError, ValueError):
    """A state does not fit in the truncated Fock space."""

    def __init__(self, message, required_n_max=None):
        super().__init__(message)
        self.required_n_max = required_n_max


class DomainError(JCPathError, ValueError):
    """An argument lies outside its mathematical domain."""


class ShapeMismatchError(JCPathError, ValueError):
    """Operands live on incompatible spaces."""


class IntervalError(JCPathError, ValueError):
    """A time interval runs backwards."""


class RegimeError(JCPathError, ValueError):
    """Dispersive-regime conditions are violated."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ZeroProbabilityError(JCPathError, ValueError):
    """A measurement outcome has (numerically) zero probability."""


class ConfigError(JCPathError, ValueError):
    """A scenario configuration is malformed."""

    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.field = field
        self.line = line


class RWAWarning(UserWarning):
    """Coupling or detuning is not small compared to omega_a + omega_k."""


class TruncationWarning(UserWarning):
    """Population reached the truncated edge of the Fock space."""
