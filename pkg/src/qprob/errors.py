"""Exception hierarchy.

Everything raised on purpose by this package derives from QprobError, so
front ends can map failures to exit codes / HTTP statuses in one place.
"""

from __future__ import annotations


class QprobError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(QprobError):
    """Operands live on Hilbert spaces of different dimension."""


class ValidationError(QprobError):
    """A domain object failed its construction invariants."""


class NotPositiveError(ValidationError):
    """An operator has an eigenvalue below the positivity tolerance."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"operator is not positive: minimum eigenvalue {min_eigenvalue:.6e}"
        )


class UnknownLabelError(ValidationError):
    """A referenced outcome or preparation label does not exist."""


class LabelCollisionError(ValidationError):
    """A new label clashes with an existing one."""


class DegenerateProcedureError(ValidationError):
    """All outcome operators of a procedure are (numerically) zero."""


class NotStandardError(ValidationError):
    """The outcome operators do not sum to a multiple of the identity."""


class IncompatibleStateError(QprobError):
    """Tr(X rho) is too small: no recordable outcome is possible for this state."""


class IncompatibleEnsembleError(IncompatibleStateError):
    """The ensemble average state cannot trigger any recorded outcome."""


class OutcomeImpossibleError(IncompatibleStateError):
    """The observed outcome has zero probability under the ensemble average."""


class FrameViolationError(QprobError):
    """A frame-function evaluator returned a negative or non-finite value."""


class InternalConsistencyError(QprobError):
    """A quantity violated a bound that valid inputs cannot violate (likely a bug)."""
