"""
Error types raised by the toolkit.

Everything derives from KvnError so callers (and the CLI) can catch one
base class. Each subclass also derives from the matching builtin so plain
``except ValueError`` keeps working.
"""


class KvnError(Exception):
    """Base class for toolkit errors."""


class AlgebraError(KvnError, ValueError):
    """Generator index out of range or mismatched algebras."""


class NilpotencyError(KvnError, ArithmeticError):
    """A truncated exponential series did not terminate."""


class MetricError(KvnError, ValueError):
    """Singular, non-conjugate-symmetric, infeasible or underdetermined metric."""


class ConjugationError(KvnError, ValueError):
    """A conjugation rule violates one of its defining constraints."""

    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


class ExpressionError(KvnError, ValueError):
    """Bad Hamiltonian expression text."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class IntegrationError(KvnError, ArithmeticError):
    """Non-finite state met while integrating."""


class CanonicalError(KvnError, ValueError):
    """Invalid canonical transformation."""


class ConfigError(KvnError, ValueError):
    """Bad run configuration."""


class SpectrumError(KvnError, ArithmeticError):
    """A Liouvillian that should be self-adjoint has complex eigenvalues."""
