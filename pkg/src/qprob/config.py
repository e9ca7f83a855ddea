"""Numerical tolerances shared by the whole package.

Operators are stored as complex double matrices, so algebraic identities
(hermiticity, positivity, unit trace, ...) can only be enforced up to
round-off.  The slack for each check lives here so that every module uses
the same numbers and so that callers (CLI / service) can override them for
a single computation.
"""

from __future__ import annotations

import contextlib
import dataclasses


@dataclasses.dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12        # max-abs deviation from conjugate symmetry
    positivity: float = 1e-10       # most negative eigenvalue still accepted as zero
    trace: float = 1e-12            # unit-trace slack for density operators
    unitarity: float = 1e-12        # max-abs deviation of U U^dag from the identity
    state_norm: float = 1e-12       # Euclidean-norm slack for state vectors
    identity_scale: float = 1e-10   # max-abs deviation of a sum from K * identity
    denominator: float = 1e-12      # smallest usable normalization trace
    unit_sum: float = 1e-12         # slack for probability vectors summing to one
    probability_slack: float = 1e-9  # how far outside [0, 1] before a hard error
    trace_imag: float = 1e-9        # largest tolerated Im Tr(AB) for Hermitian A, B

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


_current = Tolerances()


def tolerances() -> Tolerances:
    """Tolerances currently in effect."""
    return _current


def set_tolerances(tol: Tolerances) -> None:
    global _current
    _current = tol


@contextlib.contextmanager
def _apply(tol: Tolerances):
    global _current
    previous = _current
    _current = tol
    try:
        yield tol
    finally:
        _current = previous


def overrides(**fields: float):
    """Context manager temporarily replacing selected tolerance fields.

    Unknown field names raise TypeError here, before anything is changed.
    """
    return _apply(dataclasses.replace(_current, **fields))
