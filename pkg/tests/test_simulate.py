"""Monte-Carlo simulator: determinism, completion, heralding, statistics."""

from __future__ import annotations

import numpy as np
import pytest

import qprob as q


def _bell_state() -> q.DensityOperator:
    amp = np.zeros(4, dtype=complex)
    amp[0] = amp[3] = 1.0 / np.sqrt(2.0)
    return q.DensityOperator(q.projector(q.StateVector(amp)).matrix)


def _projective_qubit_povm() -> q.StandardPOVM:
    return q.StandardPOVM(
        [("m0", q.projector(q.basis_state(2, 0))), ("m1", q.projector(q.basis_state(2, 1)))]
    )


@pytest.fixture
def spec_example_scenario(zero_plus_ensemble, proj0, proj_plus) -> q.Scenario:
    """Ensemble {|0>, |+>} measured by the halved completion, two recorded outcomes."""
    e0 = q.PositiveOperator(proj0.matrix / 2)
    e1 = q.PositiveOperator(proj_plus.matrix / 2)
    e2 = q.PositiveOperator(np.eye(2) - e0.matrix - e1.matrix)
    povm = q.StandardPOVM([("m0", e0), ("m1", e1), ("m2", e2)])
    return q.Scenario(
        ensemble=zero_plus_ensemble,
        full_povm=povm,
        recorded=("m0", "m1"),
        samples=100_000,
        seed=1,
    )


class TestScenarioValidation:
    def test_recorded_must_be_subset(self, zero_plus_ensemble):
        with pytest.raises(q.UnknownLabelError):
            q.Scenario(
                ensemble=zero_plus_ensemble,
                full_povm=_projective_qubit_povm(),
                recorded=("mX",),
                samples=10,
                seed=0,
            )

    def test_recorded_must_not_be_empty(self, zero_plus_ensemble):
        with pytest.raises(q.ValidationError):
            q.Scenario(
                ensemble=zero_plus_ensemble,
                full_povm=_projective_qubit_povm(),
                recorded=(),
                samples=10,
                seed=0,
            )

    def test_negative_seed_rejected(self, zero_plus_ensemble):
        with pytest.raises(q.ValidationError):
            q.Scenario(
                ensemble=zero_plus_ensemble,
                full_povm=_projective_qubit_povm(),
                recorded=("m0",),
                samples=10,
                seed=-1,
            )


class TestRun:
    def test_deterministic_for_identical_scenarios(self, spec_example_scenario):
        first = q.run(spec_example_scenario)
        second = q.run(spec_example_scenario)
        assert first == second

    def test_all_recorded_matches_born(self, zero_plus_ensemble):
        povm = q.random_povm(2, 3, seed=3)
        scenario = q.Scenario(
            ensemble=zero_plus_ensemble,
            full_povm=povm,
            recorded=povm.labels,
            samples=100_000,
            seed=5,
        )
        report = q.run(scenario)
        assert report.accepted_count == scenario.samples
        rho = q.average_state(zero_plus_ensemble)
        for label, effect in povm.effects:
            est = report.outcome_frequencies[label]
            assert abs(est.frequency - q.trace_product(effect, rho)) <= 4 * est.stderr

    def test_single_recorded_outcome_is_exactly_one(self, zero_plus_ensemble):
        povm = _projective_qubit_povm()
        scenario = q.Scenario(
            ensemble=zero_plus_ensemble,
            full_povm=povm,
            recorded=("m0",),
            samples=5_000,
            seed=9,
        )
        report = q.run(scenario)
        assert report.outcome_frequencies["m0"].frequency == 1.0

    def test_spec_example_posterior_within_stderr(self, spec_example_scenario, zero_plus_ensemble):
        report = q.run(spec_example_scenario)
        restricted = q.restrict(
            spec_example_scenario.full_povm.as_procedure(), spec_example_scenario.recorded
        )
        analytic = q.posterior(zero_plus_ensemble, restricted).posteriors
        est = report.preparation_frequencies["s0"]
        assert abs(est.frequency - analytic["s0"]) <= 4 * est.stderr
        assert report.consistent

    def test_frequencies_sum_to_one(self, spec_example_scenario):
        report = q.run(spec_example_scenario)
        total = sum(e.frequency for e in report.outcome_frequencies.values())
        assert total == pytest.approx(1.0, abs=1e-12)
        counts = sum(e.count for e in report.outcome_frequencies.values())
        assert counts == report.accepted_count

    def test_zero_count_uses_rule_of_three(self):
        e = q.PreparationEnsemble([("s", 1.0, q.DensityOperator([[1.0, 0.0], [0.0, 0.0]]))])
        scenario = q.Scenario(
            ensemble=e,
            full_povm=_projective_qubit_povm(),
            recorded=("m0", "m1"),
            samples=1_000,
            seed=2,
        )
        report = q.run(scenario)
        est = report.outcome_frequencies["m1"]
        assert est.count == 0
        assert est.stderr == pytest.approx(3.0 / report.accepted_count)
        assert report.consistent

    def test_inconclusive_when_nothing_accepted(self, proj0, proj1):
        e = q.PreparationEnsemble([("s", 1.0, q.DensityOperator(proj0.matrix))])
        scenario = q.Scenario(
            ensemble=e,
            full_povm=_projective_qubit_povm(),
            recorded=("m1",),  # orthogonal to the state: never fires
            samples=2_000,
            seed=4,
        )
        report = q.run(scenario)
        assert report.inconclusive
        assert report.accepted_count == 0
        assert not report.consistent
        assert report.comparisons == ()

    def test_analytic_offset_forces_inconsistency(self, spec_example_scenario):
        report = q.run(spec_example_scenario, analytic_offset=0.05)
        assert not report.consistent

    def test_statistical_soundness_across_seeds(self, zero_plus_ensemble, proj0, proj_plus):
        # over many independent seeds, 4-sigma exceedances must stay rare
        procedure = q.MeasurementProcedure([("m0", proj0), ("m1", proj_plus)])
        povm = q.completion_of(procedure)
        exceedances = 0
        for seed in range(100):
            scenario = q.Scenario(
                ensemble=zero_plus_ensemble,
                full_povm=povm,
                recorded=("m0", "m1"),
                samples=20_000,
                seed=seed,
            )
            if not q.run(scenario).consistent:
                exceedances += 1
        assert exceedances <= 2


class TestCompletion:
    def test_povm_kept_with_zero_sink(self):
        povm = q.random_povm(2, 2, seed=11)
        completed = q.completion_of(povm.as_procedure())
        assert completed.labels == (*povm.labels, q.SINK_LABEL)
        np.testing.assert_allclose(
            completed.effect(q.SINK_LABEL).matrix, np.zeros((2, 2)), atol=1e-12
        )
        for label, effect in povm.effects:
            np.testing.assert_allclose(completed.effect(label).matrix, effect.matrix, atol=1e-12)

    def test_skew_procedure_completion(self, skew_procedure):
        completed = q.completion_of(skew_procedure)
        lam = 1.0 + 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(
            completed.effect("m0").matrix,
            skew_procedure.operator("m0").matrix / lam,
            atol=1e-12,
        )
        total = sum(op.matrix for _, op in completed.effects)
        assert np.max(np.abs(total - np.eye(2))) <= 1e-12

    def test_post_selected_completion_reproduces_general_law(self, skew_procedure):
        rho = q.random_density(2, seed=12)
        analytic = q.general_distribution(skew_procedure, rho).probabilities
        completed = q.completion_of(skew_procedure)
        restricted = q.restrict(completed.as_procedure(), skew_procedure.labels)
        via_completion = q.general_distribution(restricted, rho).probabilities
        for label in analytic:
            assert analytic[label] == pytest.approx(via_completion[label], abs=1e-12)

    def test_monte_carlo_through_completion(self, skew_procedure, proj0):
        rho = q.DensityOperator(proj0.matrix)
        scenario = q.Scenario(
            ensemble=q.PreparationEnsemble([("s", 1.0, rho)]),
            full_povm=q.completion_of(skew_procedure),
            recorded=skew_procedure.labels,
            samples=100_000,
            seed=13,
        )
        report = q.run(scenario)
        est = report.outcome_frequencies["m0"]
        assert abs(est.frequency - 2.0 / 3.0) <= 4 * est.stderr

    def test_sink_label_reserved(self, proj0):
        x = q.MeasurementProcedure([(q.SINK_LABEL, proj0)])
        with pytest.raises(q.LabelCollisionError):
            q.completion_of(x)


class TestHeraldScenario:
    def test_bell_state_heralds_perfectly(self):
        herald = q.projector(q.basis_state(2, 1))
        scenario = q.herald_scenario(
            _projective_qubit_povm(), _bell_state(), herald, samples=100_000, seed=21
        )
        report = q.run(scenario)
        assert report.outcome_frequencies["m0"].frequency == pytest.approx(0.0, abs=1e-12)
        assert report.outcome_frequencies["m1"].frequency == pytest.approx(1.0, abs=1e-12)
        assert report.consistent

    def test_identity_herald_is_unconditioned_born(self):
        joint = q.tensor_product(q.random_density(2, seed=22), q.random_density(2, seed=23))
        joint_state = q.DensityOperator(joint.matrix)
        scenario = q.herald_scenario(
            _projective_qubit_povm(), joint_state, q.identity(2), samples=50_000, seed=24
        )
        report = q.run(scenario)
        assert report.accepted_count == scenario.samples
        signal = q.random_density(2, seed=23)
        for label, effect in _projective_qubit_povm().effects:
            est = report.outcome_frequencies[label]
            assert abs(est.frequency - q.trace_product(effect, signal)) <= 4 * est.stderr

    def test_zero_herald_inconclusive(self):
        zero = q.PositiveOperator(np.zeros((2, 2)))
        scenario = q.herald_scenario(
            _projective_qubit_povm(), _bell_state(), zero, samples=1_000, seed=25
        )
        report = q.run(scenario)
        assert report.inconclusive

    def test_dimension_mismatch(self):
        herald = q.identity(3)
        with pytest.raises(q.DimensionMismatchError):
            q.herald_scenario(_projective_qubit_povm(), _bell_state(), herald)

    def test_non_effect_herald_rejected(self):
        too_big = q.PositiveOperator(2 * np.eye(2))
        with pytest.raises(q.ValidationError, match="effect"):
            q.herald_scenario(_projective_qubit_povm(), _bell_state(), too_big)

    def test_no_herald_label_reserved(self):
        signal = q.StandardPOVM(
            [(q.NO_HERALD_LABEL, q.projector(q.basis_state(2, 0))), ("m1", q.projector(q.basis_state(2, 1)))]
        )
        with pytest.raises(q.LabelCollisionError):
            q.herald_scenario(signal, _bell_state(), q.identity(2))


class TestCommunicationScenario:
    def test_orthogonal_states_sharp_measurement(self, proj0, proj1):
        e = q.PreparationEnsemble(
            [("a", 0.5, q.DensityOperator(proj0.matrix)), ("b", 0.5, q.DensityOperator(proj1.matrix))]
        )
        result = q.communication_scenario(e, _projective_qubit_povm(), "m0")
        assert result["a"] == pytest.approx(1.0, abs=1e-12)
        assert result["b"] == pytest.approx(0.0, abs=1e-12)

    def test_zero_plus_case(self, zero_plus_ensemble):
        result = q.communication_scenario(zero_plus_ensemble, _projective_qubit_povm(), "m0")
        assert result["s0"] == pytest.approx(2 / 3, abs=1e-12)
        assert result["s1"] == pytest.approx(1 / 3, abs=1e-12)

    def test_matches_conditional_monte_carlo(self, zero_plus_ensemble):
        povm = _projective_qubit_povm()
        analytic = q.communication_scenario(zero_plus_ensemble, povm, "m0")
        scenario = q.Scenario(
            ensemble=zero_plus_ensemble,
            full_povm=povm,
            recorded=("m0",),
            samples=100_000,
            seed=31,
        )
        report = q.run(scenario)
        for label, est in report.preparation_frequencies.items():
            assert abs(est.frequency - analytic[label]) <= 4 * est.stderr

    def test_impossible_observation(self, proj0, proj1):
        e = q.PreparationEnsemble([("s", 1.0, q.DensityOperator(proj0.matrix))])
        with pytest.raises(q.OutcomeImpossibleError):
            q.communication_scenario(e, _projective_qubit_povm(), "m1")

    def test_unknown_outcome(self, zero_plus_ensemble):
        with pytest.raises(q.UnknownLabelError):
            q.communication_scenario(zero_plus_ensemble, _projective_qubit_povm(), "mX")
