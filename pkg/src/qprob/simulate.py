"""Seeded Monte-Carlo oracle for prepare-measure-record experiments.

Trials draw a preparation from the prior, then an outcome from the exact
Born weights of the full POVM (inverse-CDF categorical sampling); trials
whose outcome is not in the recorded set are discarded.  Conditional
frequencies over the accepted trials independently estimate what the
analytic engine predicts for the restricted procedure, and every report
carries the analytic-vs-empirical comparison.

Trials are generated in batches.  Each batch owns its own generator derived
from (seed, batch_index), so identical scenarios reproduce identical reports
and batch tallies merge associatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import tolerances
from .errors import (
    DimensionMismatchError,
    InternalConsistencyError,
    LabelCollisionError,
    UnknownLabelError,
    ValidationError,
)
from .measurement import (
    MeasurementProcedure,
    StandardPOVM,
    is_standard,
    procedure_sum,
    restrict,
)
from .operators import (
    DensityOperator,
    PositiveOperator,
    identity,
    tensor_product,
    trace_product,
)
from .probability import (
    PreparationEnsemble,
    average_state,
    general_distribution,
    posterior,
    retrodict,
)

__all__ = [
    "SINK_LABEL",
    "NO_HERALD_LABEL",
    "Scenario",
    "FrequencyEstimate",
    "ComparisonRow",
    "SimulationReport",
    "run",
    "completion_of",
    "herald_scenario",
    "communication_scenario",
]

SINK_LABEL = "⊥"  # completion outcome absorbing the unrecorded remainder
NO_HERALD_LABEL = "no-herald"

_BATCH_SIZE = 20_000


@dataclass(frozen=True)
class Scenario:
    """A post-selected prepare-and-measure experiment, fully seeded."""

    ensemble: PreparationEnsemble
    full_povm: StandardPOVM
    recorded: tuple[str, ...]
    samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.ensemble.dim != self.full_povm.dim:
            raise DimensionMismatchError(
                f"ensemble dimension {self.ensemble.dim} vs "
                f"POVM dimension {self.full_povm.dim}"
            )
        recorded = tuple(self.recorded)
        if not recorded:
            raise ValidationError("the recorded set must not be empty")
        if len(set(recorded)) != len(recorded):
            raise ValidationError("recorded labels must be unique")
        unknown = set(recorded) - set(self.full_povm.labels)
        if unknown:
            raise UnknownLabelError(f"recorded labels {sorted(unknown)} not in the POVM")
        if self.samples < 1:
            raise ValidationError("at least one sample is required")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        object.__setattr__(self, "recorded", recorded)


@dataclass(frozen=True)
class FrequencyEstimate:
    """A conditional frequency with its binomial standard error.

    Zero and full counts use the rule-of-three bound 3/N instead of the
    plug-in estimate, which would report a uselessly zero standard error.
    """

    count: int
    frequency: float
    stderr: float


@dataclass(frozen=True)
class ComparisonRow:
    """One analytic-vs-empirical comparison from a simulation report."""

    quantity: str  # "outcome" or "preparation"
    label: str
    analytic: float
    empirical: float
    gap: float
    stderr: float
    gap_over_stderr: float | None  # None when the standard error is zero

    @property
    def consistent(self) -> bool:
        return self.gap <= 4.0 * self.stderr or self.gap == 0.0


@dataclass(frozen=True)
class SimulationReport:
    """Frequencies over accepted trials plus the analytic comparison table."""

    samples: int
    accepted_count: int
    inconclusive: bool
    outcome_frequencies: dict[str, FrequencyEstimate]
    preparation_frequencies: dict[str, FrequencyEstimate]
    comparisons: tuple[ComparisonRow, ...]

    @property
    def consistent(self) -> bool:
        """True when every comparison sits within four standard errors."""
        if self.inconclusive:
            return False
        return all(row.consistent for row in self.comparisons)


def _estimate(count: int, accepted: int) -> FrequencyEstimate:
    freq = count / accepted
    if count == 0 or count == accepted:
        stderr = 3.0 / accepted
    else:
        stderr = math.sqrt(freq * (1.0 - freq) / accepted)
    return FrequencyEstimate(count=int(count), frequency=freq, stderr=stderr)


def _categorical_cdf(weights: np.ndarray, what: str) -> np.ndarray:
    """Cumulative distribution of non-negative weights that sum to one."""
    if np.any(weights < -tolerances().probability_slack):
        raise InternalConsistencyError(f"{what} contains a significantly negative weight")
    weights = np.clip(weights, 0.0, None)
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-10:
        raise InternalConsistencyError(f"{what} sums to {total!r}, expected 1")
    cdf = np.cumsum(weights / total)
    cdf[-1] = 1.0
    return cdf


def run(scenario: Scenario, *, analytic_offset: float = 0.0) -> SimulationReport:
    """Simulate a scenario and compare frequencies against the analytic engine.

    ``analytic_offset`` shifts every analytic target; it exists solely as a
    fault-injection knob so front ends can demonstrate the statistical
    inconsistency exit path.  Zero accepted trials yield a report flagged
    inconclusive rather than an exception.
    """
    ensemble, povm = scenario.ensemble, scenario.full_povm
    n_prep = len(ensemble)
    n_out = len(povm)

    priors = np.array([prior for _, prior, _ in ensemble.entries])
    prior_cdf = _categorical_cdf(priors, "prior vector")

    born = np.empty((n_prep, n_out))
    for k, (_, _, state) in enumerate(ensemble.entries):
        for j, (_, effect) in enumerate(povm.effects):
            born[k, j] = trace_product(effect, state)
    born_cdf = np.empty_like(born)
    for k, (label, _, _) in enumerate(ensemble.entries):
        born_cdf[k] = _categorical_cdf(born[k], f"Born weights for {label!r}")

    counts = np.zeros((n_prep, n_out), dtype=np.int64)
    remaining = scenario.samples
    batch_index = 0
    while remaining > 0:
        size = min(_BATCH_SIZE, remaining)
        rng = np.random.default_rng([scenario.seed, batch_index])
        u = rng.random((size, 2))
        preps = np.searchsorted(prior_cdf, u[:, 0], side="right")
        preps = np.minimum(preps, n_prep - 1)
        outs = np.sum(born_cdf[preps] <= u[:, 1, None], axis=1)
        outs = np.minimum(outs, n_out - 1)
        np.add.at(counts, (preps, outs), 1)
        remaining -= size
        batch_index += 1

    recorded_idx = [povm.labels.index(label) for label in scenario.recorded]
    accepted = int(counts[:, recorded_idx].sum())

    if accepted == 0:
        return SimulationReport(
            samples=scenario.samples,
            accepted_count=0,
            inconclusive=True,
            outcome_frequencies={
                label: FrequencyEstimate(0, 0.0, 0.0) for label in scenario.recorded
            },
            preparation_frequencies={
                label: FrequencyEstimate(0, 0.0, 0.0) for label in ensemble.labels
            },
            comparisons=(),
        )

    outcome_freq = {
        label: _estimate(int(counts[:, j].sum()), accepted)
        for label, j in zip(scenario.recorded, recorded_idx)
    }
    prep_freq = {
        label: _estimate(int(counts[k, recorded_idx].sum()), accepted)
        for k, label in enumerate(ensemble.labels)
    }

    restricted = restrict(povm.as_procedure(), scenario.recorded)
    analytic_outcomes = general_distribution(restricted, average_state(ensemble))
    analytic_preps = posterior(ensemble, restricted)

    comparisons: list[ComparisonRow] = []
    for label in scenario.recorded:
        comparisons.append(
            _compare(
                "outcome",
                label,
                analytic_outcomes.probabilities[label] + analytic_offset,
                outcome_freq[label],
            )
        )
    for label in ensemble.labels:
        comparisons.append(
            _compare(
                "preparation",
                label,
                analytic_preps.posteriors[label] + analytic_offset,
                prep_freq[label],
            )
        )

    return SimulationReport(
        samples=scenario.samples,
        accepted_count=accepted,
        inconclusive=False,
        outcome_frequencies=outcome_freq,
        preparation_frequencies=prep_freq,
        comparisons=tuple(comparisons),
    )


def _compare(quantity: str, label: str, analytic: float, est: FrequencyEstimate) -> ComparisonRow:
    gap = abs(est.frequency - analytic)
    if est.stderr > 0:
        ratio = gap / est.stderr
    else:
        ratio = None if gap > 0 else 0.0
    return ComparisonRow(
        quantity=quantity,
        label=label,
        analytic=analytic,
        empirical=est.frequency,
        gap=gap,
        stderr=est.stderr,
        gap_over_stderr=ratio,
    )


def completion_of(procedure: MeasurementProcedure) -> StandardPOVM:
    """Embed a procedure into a complete POVM it can be post-selected from.

    Every outcome operator is rescaled by the largest eigenvalue of X, and
    one sink outcome absorbs the remainder identity - X/lambda_max.  The
    rescaling cancels in the probability ratio, so post-selecting the
    completion on the original labels reproduces the procedure's outcome
    distribution for every state.  A procedure that already sums to the
    identity is kept as-is, with a zero sink effect appended.
    """
    if SINK_LABEL in procedure.labels:
        raise LabelCollisionError(f"label {SINK_LABEL!r} is reserved for the completion")
    x = procedure_sum(procedure)
    lam_max = x.max_eigenvalue
    if lam_max <= tolerances().positivity:
        raise ValidationError("the procedure sum is numerically zero")
    k = is_standard(procedure)
    if k is not None and abs(k - 1.0) <= tolerances().identity_scale:
        effects = list(procedure.outcomes)
        sink = PositiveOperator(np.zeros((procedure.dim, procedure.dim)))
    else:
        effects = [
            (label, PositiveOperator(op.matrix / lam_max))
            for label, op in procedure.outcomes
        ]
        sink = PositiveOperator(np.eye(procedure.dim) - x.matrix / lam_max)
    return StandardPOVM([*effects, (SINK_LABEL, sink)])


def herald_scenario(
    signal_povm: StandardPOVM,
    joint_state: DensityOperator,
    herald_effect: PositiveOperator,
    *,
    samples: int = 100_000,
    seed: int = 0,
) -> Scenario:
    """Conditioning a signal measurement on a companion herald detection.

    Builds the joint-space POVM {herald x E_j} plus a no-herald outcome
    carrying (identity - herald) x identity, and records only the heralded
    outcomes.  The heralded frequencies then estimate the signal distribution
    conditioned on the herald firing.
    """
    dim_herald = herald_effect.dim
    dim_signal = signal_povm.dim
    if joint_state.dim != dim_herald * dim_signal:
        raise DimensionMismatchError(
            f"joint state dimension {joint_state.dim} is not "
            f"{dim_herald} x {dim_signal}"
        )
    if herald_effect.max_eigenvalue > 1.0 + tolerances().positivity:
        raise ValidationError(
            f"herald operator has eigenvalue {herald_effect.max_eigenvalue!r} > 1; "
            "it must be an effect"
        )
    if NO_HERALD_LABEL in signal_povm.labels:
        raise LabelCollisionError(f"label {NO_HERALD_LABEL!r} is reserved")

    effects = [
        (label, tensor_product(herald_effect, op))
        for label, op in signal_povm.effects
    ]
    absent = PositiveOperator(identity(dim_herald).matrix - herald_effect.matrix)
    effects.append((NO_HERALD_LABEL, tensor_product(absent, identity(dim_signal))))

    ensemble = PreparationEnsemble([("joint", 1.0, joint_state)])
    return Scenario(
        ensemble=ensemble,
        full_povm=StandardPOVM(effects),
        recorded=signal_povm.labels,
        samples=samples,
        seed=seed,
    )


def communication_scenario(
    ensemble: PreparationEnsemble,
    bob_povm: StandardPOVM,
    observed: str,
) -> dict[str, float]:
    """Which preparation did the sender pick, given the receiver's outcome?

    Returns the retrodictive probabilities for the observed effect.  The
    same map can be estimated empirically by simulating the POVM with only
    ``observed`` recorded and reading the preparation frequencies.
    """
    return retrodict(ensemble, bob_povm.effect(observed))
