"""Outcome prediction, Bayesian posteriors and retrodiction.

The central quantity is the ratio Tr(M rho) / Tr(X rho): the probability of
recording outcome m when the procedure's operator sum is X.  Because it is a
ratio, uniform rescaling of all outcome operators cancels, and when X is
proportional to the identity it reduces to the Born rule Tr(E rho).

The same ratio read backwards gives retrodiction: conditioning on an observed
outcome M, the probability that preparation s_k produced it is
p_k Tr(M rho_k) / Tr(M rho_avg), which can equivalently be computed by
swapping the roles of states and outcome operators (prediction-retrodiction
duality).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import tolerances
from .errors import (
    DimensionMismatchError,
    IncompatibleEnsembleError,
    IncompatibleStateError,
    InternalConsistencyError,
    OutcomeImpossibleError,
    UnknownLabelError,
    ValidationError,
)
from .measurement import MeasurementProcedure, StandardPOVM, is_standard, procedure_sum
from .operators import DensityOperator, PositiveOperator, trace_product

__all__ = [
    "PreparationEnsemble",
    "ProbabilityReport",
    "PosteriorReport",
    "RetrodictiveState",
    "average_state",
    "general_probability",
    "general_distribution",
    "posterior",
    "bayes_consistency",
    "retrodict",
    "retrodictive_state",
    "retrodict_via_duality",
    "born_noncontextuality_check",
]


class PreparationEnsemble:
    """Labeled preparations with prior probabilities: {(s_k, p_k, rho_k)}.

    Zero-prior entries are retained (they simply get posterior zero), so
    label sets stay stable across reports.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, float, DensityOperator]]) -> None:
        rows: list[tuple[str, float, DensityOperator]] = []
        seen: set[str] = set()
        for label, prior, state in entries:
            if not isinstance(label, str) or not label:
                raise ValidationError("preparation labels must be non-empty strings")
            if label in seen:
                raise ValidationError(f"duplicate preparation label {label!r}")
            seen.add(label)
            prior = float(prior)
            if not np.isfinite(prior) or prior < 0:
                raise ValidationError(f"prior for {label!r} must be non-negative, got {prior}")
            if not isinstance(state, DensityOperator):
                state = DensityOperator(state.matrix if hasattr(state, "matrix") else state)
            rows.append((label, prior, state))
        if not rows:
            raise ValidationError("an ensemble needs at least one preparation")
        dim = rows[0][2].dim
        for label, _, state in rows:
            if state.dim != dim:
                raise DimensionMismatchError(
                    f"preparation {label!r} has dimension {state.dim}, expected {dim}"
                )
        total = sum(prior for _, prior, _ in rows)
        if abs(total - 1.0) > tolerances().unit_sum:
            raise ValidationError(f"priors must sum to 1, got {total!r}")
        self._entries = tuple(rows)

    @property
    def entries(self) -> tuple[tuple[str, float, DensityOperator], ...]:
        return self._entries

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _, _ in self._entries)

    @property
    def dim(self) -> int:
        return self._entries[0][2].dim

    def __len__(self) -> int:
        return len(self._entries)

    def prior(self, label: str) -> float:
        for key, prior, _ in self._entries:
            if key == label:
                return prior
        raise UnknownLabelError(f"no preparation labeled {label!r}")

    def state(self, label: str) -> DensityOperator:
        for key, _, state in self._entries:
            if key == label:
                return state
        raise UnknownLabelError(f"no preparation labeled {label!r}")

    def __repr__(self) -> str:
        return f"PreparationEnsemble(dim={self.dim}, labels={list(self.labels)})"


def _checked_probability(raw: float, what: str) -> float:
    """Clamp to [0, 1] after asserting the raw value is numerically sane."""
    slack = tolerances().probability_slack
    if raw < -slack or raw > 1.0 + slack:
        raise InternalConsistencyError(f"{what} = {raw!r} lies far outside [0, 1]")
    return min(max(raw, 0.0), 1.0)


def _checked_unit_sum(values: Iterable[float], what: str) -> None:
    total = float(sum(values))
    if abs(total - 1.0) > tolerances().unit_sum:
        raise InternalConsistencyError(f"{what} sum to {total!r}, expected 1")


@dataclass(frozen=True)
class ProbabilityReport:
    """Outcome distribution of a procedure on a state.

    ``denominator`` is Tr(X rho); ``standard`` records whether X was found
    proportional to the identity, with ``identity_scale`` the factor K.
    """

    probabilities: dict[str, float]
    denominator: float
    standard: bool
    identity_scale: float | None = None

    def __post_init__(self) -> None:
        _checked_unit_sum(self.probabilities.values(), "outcome probabilities")


@dataclass(frozen=True)
class PosteriorReport:
    """Posterior preparation probabilities and their likelihood ratios."""

    posteriors: dict[str, float]
    likelihoods: dict[str, float]

    def __post_init__(self) -> None:
        _checked_unit_sum(self.posteriors.values(), "posterior probabilities")
        if any(value < 0 for value in self.likelihoods.values()):
            raise InternalConsistencyError("likelihoods must be non-negative")


class RetrodictiveState(DensityOperator):
    """Unit-trace state assigned backward in time from an observed outcome."""

    __slots__ = ()


def average_state(ensemble: PreparationEnsemble) -> DensityOperator:
    """Prior-weighted mixture sum_k p_k rho_k."""
    mixed = sum(prior * state.matrix for _, prior, state in ensemble.entries)
    return DensityOperator(mixed)


def _denominator(x_sum: PositiveOperator, rho: DensityOperator, error: type) -> float:
    value = trace_product(x_sum, rho)
    if value <= tolerances().denominator:
        raise error(
            "no recordable outcome is possible for this state: "
            f"Tr(X rho) = {value:.3e}"
        )
    return value


def general_probability(
    procedure: MeasurementProcedure,
    rho: DensityOperator,
    outcome: str,
) -> float:
    """Probability Tr(M rho) / Tr(X rho) of recording ``outcome``."""
    operator = procedure.operator(outcome)
    if rho.dim != procedure.dim:
        raise DimensionMismatchError(
            f"state dimension {rho.dim} vs procedure dimension {procedure.dim}"
        )
    den = _denominator(procedure_sum(procedure), rho, IncompatibleStateError)
    return _checked_probability(
        trace_product(operator, rho) / den, f"p({outcome!r})"
    )


def general_distribution(
    procedure: MeasurementProcedure,
    rho: DensityOperator,
) -> ProbabilityReport:
    """Full outcome distribution of a procedure on a state."""
    if rho.dim != procedure.dim:
        raise DimensionMismatchError(
            f"state dimension {rho.dim} vs procedure dimension {procedure.dim}"
        )
    den = _denominator(procedure_sum(procedure), rho, IncompatibleStateError)
    probs = {
        label: _checked_probability(trace_product(op, rho) / den, f"p({label!r})")
        for label, op in procedure.outcomes
    }
    k = is_standard(procedure)
    return ProbabilityReport(
        probabilities=probs,
        denominator=den,
        standard=k is not None,
        identity_scale=k,
    )


def posterior(
    ensemble: PreparationEnsemble,
    procedure: MeasurementProcedure,
) -> PosteriorReport:
    """Posterior preparation probabilities given that some outcome was recorded.

    P(s_k) = p_k Tr(X rho_k) / Tr(X rho_avg); the ratio Tr(X rho_k)/Tr(X rho_avg)
    is reported as the likelihood of s_k.  When X is proportional to the
    identity the posterior equals the prior for every entry.
    """
    if ensemble.dim != procedure.dim:
        raise DimensionMismatchError(
            f"ensemble dimension {ensemble.dim} vs procedure dimension {procedure.dim}"
        )
    x_sum = procedure_sum(procedure)
    den = _denominator(x_sum, average_state(ensemble), IncompatibleEnsembleError)
    posteriors: dict[str, float] = {}
    likelihoods: dict[str, float] = {}
    for label, prior, state in ensemble.entries:
        likelihood = trace_product(x_sum, state) / den
        likelihoods[label] = max(likelihood, 0.0)
        posteriors[label] = _checked_probability(prior * likelihood, f"P({label!r})")
    return PosteriorReport(posteriors=posteriors, likelihoods=likelihoods)


def bayes_consistency(
    ensemble: PreparationEnsemble,
    procedure: MeasurementProcedure,
    outcome: str,
) -> tuple[float, float]:
    """Both sides of the mixture decomposition of the outcome probability.

    Left: the outcome probability on the average state.  Right: the same
    probability expanded over preparations, weighted by their posteriors.
    Preparations for which the procedure can record nothing contribute zero
    (their posterior weight vanishes in the same limit).
    """
    report = posterior(ensemble, procedure)
    lhs = general_probability(procedure, average_state(ensemble), outcome)
    rhs = 0.0
    for label, _, state in ensemble.entries:
        try:
            conditional = general_probability(procedure, state, outcome)
        except IncompatibleStateError:
            continue
        rhs += conditional * report.posteriors[label]
    return lhs, rhs


def retrodict(
    ensemble: PreparationEnsemble,
    observed: PositiveOperator,
) -> dict[str, float]:
    """Probability that each preparation produced the observed outcome.

    P(s_k) = p_k Tr(M rho_k) / Tr(M rho_avg) for the observed outcome
    operator M.
    """
    if ensemble.dim != observed.dim:
        raise DimensionMismatchError(
            f"ensemble dimension {ensemble.dim} vs outcome dimension {observed.dim}"
        )
    den = _denominator(observed, average_state(ensemble), OutcomeImpossibleError)
    result = {
        label: _checked_probability(
            prior * trace_product(observed, state) / den, f"P({label!r})"
        )
        for label, prior, state in ensemble.entries
    }
    _checked_unit_sum(result.values(), "retrodictive probabilities")
    return result


def retrodictive_state(observed: PositiveOperator) -> RetrodictiveState:
    """The trace-normalized outcome operator M / Tr(M)."""
    tr = observed.trace()
    if tr <= tolerances().trace:
        raise ValidationError("cannot normalize a zero outcome operator")
    return RetrodictiveState(observed.matrix / tr)


def retrodict_via_duality(
    ensemble: PreparationEnsemble,
    observed: PositiveOperator,
) -> dict[str, float]:
    """Retrodiction computed through the predictive formula.

    Builds the dual procedure whose outcome operators are p_k rho_k (labeled
    by preparation) and evaluates it on the retrodictive state M / Tr(M).
    The result agrees with :func:`retrodict` pointwise.
    """
    if ensemble.dim != observed.dim:
        raise DimensionMismatchError(
            f"ensemble dimension {ensemble.dim} vs outcome dimension {observed.dim}"
        )
    # Same impossibility test as retrodict, before any dual construction.
    _denominator(observed, average_state(ensemble), OutcomeImpossibleError)
    dual = MeasurementProcedure(
        (label, PositiveOperator(prior * state.matrix))
        for label, prior, state in ensemble.entries
    )
    report = general_distribution(dual, retrodictive_state(observed))
    return dict(report.probabilities)


def _locate_effect(povm: StandardPOVM, effect: PositiveOperator, name: str) -> str:
    tol = tolerances().identity_scale
    for label, candidate in povm.effects:
        if float(np.max(np.abs(candidate.matrix - effect.matrix))) <= tol:
            return label
    raise ValidationError(f"the shared effect is not an element of POVM {name}")


def born_noncontextuality_check(
    effect: PositiveOperator,
    povm_a: StandardPOVM,
    povm_b: StandardPOVM,
    rho: DensityOperator,
) -> tuple[float, float]:
    """Probability of a shared effect computed through two different POVMs.

    Each value is obtained as one minus the summed probabilities of the
    other elements of that POVM, so agreement witnesses that the effect's
    probability does not depend on which complete measurement it belongs to.
    """
    if not (effect.dim == povm_a.dim == povm_b.dim == rho.dim):
        raise DimensionMismatchError("effect, POVMs and state must share one dimension")
    results = []
    for name, povm in (("A", povm_a), ("B", povm_b)):
        label = _locate_effect(povm, effect, name)
        complement = sum(
            trace_product(op, rho) for key, op in povm.effects if key != label
        )
        results.append(_checked_probability(1.0 - complement, f"p(shared|{name})"))
    return results[0], results[1]
