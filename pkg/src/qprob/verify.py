"""Property battery behind the ``verify`` command.

Eight numerical properties, each run at every requested dimension with
seeded inputs and a pinned threshold.  A property reports its measured
worst violation; failures carry enough of the generating context (seed,
dimension, trial index) to replay them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .frames import (
    FrameFunction,
    HiddenFrame,
    polarization_bases,
    positivity_of_reconstruction,
    reconstruct,
    uniqueness_check,
    verify_additivity,
    verify_scaling,
)
from .measurement import MeasurementProcedure, merge_outcomes, random_povm
from .operators import (
    HermitianOperator,
    PositiveOperator,
    random_density,
    random_positive,
    trace_product,
)
from .probability import (
    PreparationEnsemble,
    general_distribution,
    retrodict,
    retrodict_via_duality,
)

__all__ = ["PropertyResult", "run_battery", "PROPERTY_NAMES"]

PROPERTY_NAMES = (
    "additivity",
    "scaling",
    "reconstruction",
    "uniqueness",
    "positivity",
    "duality",
    "born_reduction",
    "merging",
)


@dataclass(frozen=True)
class PropertyResult:
    name: str
    dim: int
    max_violation: float
    threshold: float
    passed: bool
    case: dict | None = None  # replay context, filled on failure


def _result(
    name: str, dim: int, violation: float, threshold: float, seed: int, detail: str = ""
) -> PropertyResult:
    passed = violation <= threshold
    case = None
    if not passed:
        case = {"property": name, "dim": dim, "seed": seed, "detail": detail}
    return PropertyResult(
        name=name,
        dim=dim,
        max_violation=float(violation),
        threshold=threshold,
        passed=passed,
        case=case,
    )


def _default_frame(dim: int, rng: np.random.Generator) -> FrameFunction:
    return HiddenFrame(random_positive(dim, rng)).frame_function()


def _random_ensemble(dim: int, n_states: int, rng: np.random.Generator) -> PreparationEnsemble:
    weights = rng.random(n_states) + 0.1
    weights /= weights.sum()
    return PreparationEnsemble(
        (f"s{k}", float(weights[k]), random_density(dim, rng)) for k in range(n_states)
    )


def _random_procedure(dim: int, n_outcomes: int, rng: np.random.Generator) -> MeasurementProcedure:
    scales = rng.random(n_outcomes) * 2.0 + 0.1
    return MeasurementProcedure(
        (f"m{i}", PositiveOperator(scales[i] * random_positive(dim, rng).matrix))
        for i in range(n_outcomes)
    )


def _check_additivity(dim, rng, seed, frame_factory) -> PropertyResult:
    frame = frame_factory(dim, rng)
    violation = verify_additivity(frame, trials=20, seed=rng)
    return _result("additivity", dim, violation, 1e-12, seed, "hidden-frame additivity")


def _check_scaling(dim, rng, seed, frame_factory) -> PropertyResult:
    frame = frame_factory(dim, rng)
    worst = 0.0
    # rational multipliers, then irrational ones drawn uniformly
    for numerator, denominator in ((0, 1), (1, 1), (3, 7), (22, 9)):
        a = random_positive(dim, rng)
        lhs, rhs = verify_scaling(frame, a, numerator, denominator)
        worst = max(worst, abs(lhs - rhs))
    for _ in range(4):
        a = random_positive(dim, rng)
        alpha = float(rng.random() * np.pi)
        worst = max(worst, abs(alpha * frame(a) - frame(PositiveOperator(alpha * a.matrix))))
    return _result("scaling", dim, worst, 1e-10, seed, "rational and sampled-real scaling")


def _check_reconstruction(dim, rng, seed, frame_factory) -> PropertyResult:
    worst = 0.0
    detail = ""
    for trial in range(5):
        hidden = random_positive(dim, rng)
        result = reconstruct(HiddenFrame(hidden).frame_function())
        gap = float(np.linalg.norm(result.operator.matrix - hidden.matrix))
        if result.frame_queries != dim * dim:
            gap = max(gap, 1.0)
            detail = f"query budget {result.frame_queries} != {dim * dim}"
        if gap > worst:
            worst = gap
            detail = detail or f"trial {trial}"
    return _result("reconstruction", dim, worst, 1e-8, seed, detail)


def _check_uniqueness(dim, rng, seed, frame_factory) -> PropertyResult:
    bases = polarization_bases(dim)
    base = random_positive(dim, rng)
    worst = uniqueness_check(base, base, bases)
    if dim >= 2:
        delta = 1e-3
        perturbation = np.zeros((dim, dim), dtype=complex)
        perturbation[0, 1] = 1j * delta
        perturbation[1, 0] = -1j * delta
        shifted = HermitianOperator(base.matrix + perturbation)
        gap = uniqueness_check(base, shifted, bases)
        worst = max(worst, abs(gap - delta))
        # entrywise bound: operators cannot differ by more than 4x the probe gap
        entry_gap = float(np.max(np.abs(base.matrix - shifted.matrix)))
        worst = max(worst, max(0.0, entry_gap - 4.0 * gap))
    return _result("uniqueness", dim, worst, 1e-12, seed, "diagonal-probe detection")


def _check_positivity(dim, rng, seed, frame_factory) -> PropertyResult:
    hidden = random_positive(dim, rng)
    result = reconstruct(HiddenFrame(hidden).frame_function())
    min_eig = positivity_of_reconstruction(result)
    return _result("positivity", dim, max(0.0, -min_eig), 1e-10, seed, "reconstructed spectrum")


def _check_duality(dim, rng, seed, frame_factory) -> PropertyResult:
    worst = 0.0
    for _ in range(5):
        ensemble = _random_ensemble(dim, int(rng.integers(2, 4)), rng)
        observed = random_positive(dim, rng)
        direct = retrodict(ensemble, observed)
        dual = retrodict_via_duality(ensemble, observed)
        worst = max(worst, max(abs(direct[k] - dual[k]) for k in direct))
    return _result("duality", dim, worst, 1e-12, seed, "retrodiction via dual procedure")


def _check_born_reduction(dim, rng, seed, frame_factory) -> PropertyResult:
    worst = 0.0
    for _ in range(5):
        povm = random_povm(dim, int(rng.integers(2, 5)), rng)
        rho = random_density(dim, rng)
        report = general_distribution(povm.as_procedure(), rho)
        for label, effect in povm.effects:
            worst = max(worst, abs(report.probabilities[label] - trace_product(effect, rho)))
    return _result("born_reduction", dim, worst, 1e-12, seed, "general law vs Born rule")


def _check_merging(dim, rng, seed, frame_factory) -> PropertyResult:
    worst = 0.0
    for _ in range(5):
        procedure = _random_procedure(dim, 4, rng)
        rho = random_density(dim, rng)
        before = general_distribution(procedure, rho).probabilities
        merged = merge_outcomes(procedure, {"m0", "m1"}, "m01")
        after = general_distribution(merged, rho).probabilities
        for label in ("m2", "m3"):
            worst = max(worst, abs(before[label] - after[label]))
        worst = max(worst, abs(before["m0"] + before["m1"] - after["m01"]))
    return _result("merging", dim, worst, 1e-12, seed, "untouched outcomes invariant")


_CHECKS: dict[str, Callable] = {
    "additivity": _check_additivity,
    "scaling": _check_scaling,
    "reconstruction": _check_reconstruction,
    "uniqueness": _check_uniqueness,
    "positivity": _check_positivity,
    "duality": _check_duality,
    "born_reduction": _check_born_reduction,
    "merging": _check_merging,
}


def run_battery(
    seed: int = 0,
    dims: Sequence[int] = (2, 3, 4),
    frame_factory: Callable[[int, np.random.Generator], FrameFunction] | None = None,
) -> list[PropertyResult]:
    """Run every property at every dimension; results in (dim, property) order.

    ``frame_factory`` replaces the hidden-frame source for the additivity and
    scaling checks; injecting a non-additive evaluator makes those properties
    fail, which exercises the failure reporting path.
    """
    factory = frame_factory or _default_frame
    results: list[PropertyResult] = []
    for dim in dims:
        if dim < 1:
            raise ValueError(f"dimension must be at least 1, got {dim}")
        for index, name in enumerate(PROPERTY_NAMES):
            rng = np.random.default_rng([seed, dim, index])
            results.append(_CHECKS[name](dim, rng, seed, factory))
    return results
