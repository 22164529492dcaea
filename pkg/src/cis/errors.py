"""Exception types shared across the package.

Everything derives from CisError so callers can catch the package's own
failures without swallowing stdlib exceptions.  The CLI maps these onto
process exit codes (see cis.cli).
"""


class CisError(Exception):
    """Base class for all package-specific errors."""


class MultiplicityViolation(CisError, ValueError):
    """A word does not use every letter exactly m times."""


class AlphabetViolation(CisError, ValueError):
    """A word contains a letter outside the alphabet 1..n."""


class SpaceTooLarge(CisError, RuntimeError):
    """An enumeration or search space exceeds the configured cap."""


class NoConvergence(CisError, RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class InternalInconsistency(CisError, RuntimeError):
    """An exactness self-check failed; indicates a bug, not bad input."""


class DomainError(CisError, ValueError):
    """An argument is outside the mathematical domain of the operation."""
