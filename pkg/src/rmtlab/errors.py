"""Shared exception types.

All errors raised on purpose by this package derive from RmtError so the
command line layer can map them onto exit codes: configuration problems
exit with 2, numerical failures with 3.
"""

from __future__ import annotations


class RmtError(Exception):
    """Base class for package errors."""


class ConfigurationError(RmtError):
    """Invalid parameters, malformed config, or violated preconditions."""


class NumericalError(RmtError):
    """A computed quantity failed a hard internal consistency check."""


class AccuracyError(NumericalError):
    """Quadrature or iteration did not self-converge within its budget.

    Carries a ``diagnostics`` dict (node counts, residuals, settings) that
    the CLI serializes as JSON for post-mortems.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularityError(NumericalError):
    """An evaluation point collided with a pole or branch point."""


class ConditioningError(NumericalError):
    """A matrix required by the computation is singular or the event
    being conditioned on has vanishing probability."""


class StiffnessError(NumericalError):
    """Adaptive SDE stepping exhausted its retry budget."""
