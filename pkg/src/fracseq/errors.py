"""Exception types shared across the package.

Invalid arguments raise plain ``ValueError`` (or the ``DomainError``
subclass when a gamma-function domain restriction is violated), so
callers can catch ``ValueError`` uniformly.  ``SourceError`` and
``CostGuardError`` are operational failures, not argument errors.
"""


class DomainError(ValueError):
    """An order or argument falls outside the gamma-function domain."""


class SourceError(RuntimeError):
    """A matrix source could not produce a requested row."""


class CostGuardError(RuntimeError):
    """An exhaustive enumeration was refused because it would be too large."""
