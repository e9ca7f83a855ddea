"""Measurement procedures and standard POVMs.

A measurement procedure is a labeled set of positive outcome operators; the
operators are NOT required to be effects or to sum to the identity.  The sum
X of all outcome operators characterizes the procedure.  When X happens to be
proportional to the identity the procedure normalizes to a standard POVM.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .config import tolerances
from .errors import (
    DegenerateProcedureError,
    DimensionMismatchError,
    LabelCollisionError,
    NotStandardError,
    UnknownLabelError,
    ValidationError,
)
from .operators import (
    HermitianOperator,
    PositiveOperator,
    check_positive,
    positive_power,
    random_positive,
)

__all__ = [
    "MeasurementProcedure",
    "StandardPOVM",
    "procedure_sum",
    "merge_outcomes",
    "restrict",
    "is_standard",
    "to_povm",
    "random_povm",
]


def _validated_outcomes(
    outcomes: Iterable[tuple[str, HermitianOperator]],
) -> tuple[tuple[str, PositiveOperator], ...]:
    entries: list[tuple[str, PositiveOperator]] = []
    seen: set[str] = set()
    for label, operator in outcomes:
        if not isinstance(label, str) or not label:
            raise ValidationError("outcome labels must be non-empty strings")
        if label in seen:
            raise LabelCollisionError(f"duplicate outcome label {label!r}")
        seen.add(label)
        entries.append((label, check_positive(operator)))
    if not entries:
        raise ValidationError("a measurement procedure needs at least one outcome")
    dim = entries[0][1].dim
    for label, operator in entries:
        if operator.dim != dim:
            raise DimensionMismatchError(
                f"outcome {label!r} has dimension {operator.dim}, expected {dim}"
            )
    return tuple(entries)


class MeasurementProcedure:
    """Labeled set of positive outcome operators defining what can be recorded.

    Outcome order is preserved as given; labels (not positions) are the
    stable identity of outcomes.  Zero operators are permitted (probability
    zero events), but a procedure whose operator sum has numerically zero
    trace is rejected: it could never record anything.
    """

    __slots__ = ("_outcomes", "_sum")

    def __init__(self, outcomes: Iterable[tuple[str, HermitianOperator]]) -> None:
        entries = _validated_outcomes(outcomes)
        total = check_positive(
            HermitianOperator(sum(op.matrix for _, op in entries))
        )
        if total.trace() <= tolerances().trace:
            raise DegenerateProcedureError(
                "all outcome operators are numerically zero; "
                "the procedure can never record an outcome"
            )
        self._outcomes = entries
        self._sum = total

    @property
    def outcomes(self) -> tuple[tuple[str, PositiveOperator], ...]:
        return self._outcomes

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self._outcomes)

    @property
    def dim(self) -> int:
        return self._outcomes[0][1].dim

    def __len__(self) -> int:
        return len(self._outcomes)

    def operator(self, label: str) -> PositiveOperator:
        for key, op in self._outcomes:
            if key == label:
                return op
        raise UnknownLabelError(f"no outcome labeled {label!r}")

    def __repr__(self) -> str:
        return f"MeasurementProcedure(dim={self.dim}, labels={list(self.labels)})"


class StandardPOVM:
    """A complete measurement: effects summing to the identity."""

    __slots__ = ("_effects",)

    def __init__(self, effects: Iterable[tuple[str, HermitianOperator]]) -> None:
        entries = _validated_outcomes(effects)
        dim = entries[0][1].dim
        tol = tolerances()
        for label, effect in entries:
            if effect.max_eigenvalue > 1.0 + tol.positivity:
                raise ValidationError(
                    f"effect {label!r} has eigenvalue {effect.max_eigenvalue!r} > 1"
                )
        total = sum(op.matrix for _, op in entries)
        gap = float(np.max(np.abs(total - np.eye(dim))))
        if gap > tol.identity_scale:
            raise ValidationError(
                f"effects do not sum to the identity: max-abs gap {gap:.3e}"
            )
        self._effects = entries

    @property
    def effects(self) -> tuple[tuple[str, PositiveOperator], ...]:
        return self._effects

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self._effects)

    @property
    def dim(self) -> int:
        return self._effects[0][1].dim

    def __len__(self) -> int:
        return len(self._effects)

    def effect(self, label: str) -> PositiveOperator:
        for key, op in self._effects:
            if key == label:
                return op
        raise UnknownLabelError(f"no effect labeled {label!r}")

    def as_procedure(self) -> MeasurementProcedure:
        """View the POVM as a measurement procedure (X = identity)."""
        return MeasurementProcedure(self._effects)

    def __repr__(self) -> str:
        return f"StandardPOVM(dim={self.dim}, labels={list(self.labels)})"


def procedure_sum(procedure: MeasurementProcedure) -> PositiveOperator:
    """X, the elementwise sum of all outcome operators."""
    return procedure._sum


def merge_outcomes(
    procedure: MeasurementProcedure,
    labels: Iterable[str],
    new_label: str,
) -> MeasurementProcedure:
    """Record several outcomes as one: their operators add.

    The merged outcome takes the position of the first merged label;
    X is unchanged up to re-associated additions.
    """
    merged = set(labels)
    if not merged:
        raise ValidationError("no labels given to merge")
    existing = set(procedure.labels)
    unknown = merged - existing
    if unknown:
        raise UnknownLabelError(f"cannot merge unknown labels {sorted(unknown)}")
    remaining = existing - merged
    if new_label in remaining:
        raise LabelCollisionError(f"label {new_label!r} already names a kept outcome")

    combined = sum(op.matrix for label, op in procedure.outcomes if label in merged)
    new_outcomes: list[tuple[str, PositiveOperator]] = []
    inserted = False
    for label, op in procedure.outcomes:
        if label in merged:
            if not inserted:
                new_outcomes.append((new_label, check_positive(HermitianOperator(combined))))
                inserted = True
        else:
            new_outcomes.append((label, op))
    return MeasurementProcedure(new_outcomes)


def restrict(
    procedure: MeasurementProcedure,
    recorded: Iterable[str],
) -> MeasurementProcedure:
    """Keep only the recorded outcomes (post-selection); X shrinks accordingly."""
    keep = set(recorded)
    if not keep:
        raise ValidationError("the recorded set must not be empty")
    unknown = keep - set(procedure.labels)
    if unknown:
        raise UnknownLabelError(f"cannot record unknown labels {sorted(unknown)}")
    kept = [(label, op) for label, op in procedure.outcomes if label in keep]
    return MeasurementProcedure(kept)


def is_standard(procedure: MeasurementProcedure) -> float | None:
    """K such that X = K * identity, or None when X is not proportional to it."""
    x = procedure_sum(procedure)
    k = x.trace() / procedure.dim
    gap = float(np.max(np.abs(x.matrix - k * np.eye(procedure.dim))))
    if gap <= tolerances().identity_scale:
        return float(k)
    return None


def to_povm(procedure: MeasurementProcedure) -> StandardPOVM:
    """Normalize a procedure with X = K * identity into a standard POVM."""
    k = is_standard(procedure)
    if k is None:
        raise NotStandardError(
            "outcome operators do not sum to a multiple of the identity; "
            "such a procedure has no POVM form -- evaluate it with the "
            "general probability law instead"
        )
    return StandardPOVM(
        (label, PositiveOperator(op.matrix / k)) for label, op in procedure.outcomes
    )


def random_povm(dim: int, n_outcomes: int, seed=None) -> StandardPOVM:
    """Seeded random complete POVM.

    Draws positive operators A_i and conjugates by S^{-1/2} with S = sum A_i,
    which makes the results sum to the identity.
    """
    if n_outcomes < 1:
        raise ValidationError("a POVM needs at least one effect")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    parts = [random_positive(dim, rng) for _ in range(n_outcomes)]
    total = PositiveOperator(sum(p.matrix for p in parts))
    whiten = positive_power(total, -0.5).matrix
    effects = []
    for i, part in enumerate(parts):
        effects.append((f"m{i}", PositiveOperator(whiten @ part.matrix @ whiten)))
    return StandardPOVM(effects)
