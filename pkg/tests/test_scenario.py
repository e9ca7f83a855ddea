"""Scenario-document parsing: literals, field attribution, domain handoff."""

from __future__ import annotations

import numpy as np
import pytest

import qprob as q
from qprob.scenario import (
    ParseError,
    ensemble_from_spec,
    parse_ket,
    parse_matrix,
    procedure_from_spec,
    state_from_spec,
)


class TestMatrixLiterals:
    def test_bare_reals_promoted(self):
        out = parse_matrix([[1, 0], [0, 1]], 2, "m")
        np.testing.assert_array_equal(out, np.eye(2))

    def test_complex_pairs(self):
        out = parse_matrix([[0.5, [0, -0.5]], [[0, 0.5], 0.5]], 2, "m")
        np.testing.assert_allclose(out, [[0.5, -0.5j], [0.5j, 0.5]])

    def test_wrong_row_count(self):
        with pytest.raises(ParseError, match=r"^m: expected 2 rows"):
            parse_matrix([[1, 0]], 2, "m")

    def test_entry_path_reported(self):
        with pytest.raises(ParseError, match=r"m\[0\]\[1\]"):
            parse_matrix([[1, "x"], [0, 1]], 2, "m")

    def test_triple_rejected(self):
        with pytest.raises(ParseError, match="exactly"):
            parse_matrix([[1, [1, 2, 3]], [0, 1]], 2, "m")

    def test_boolean_rejected(self):
        with pytest.raises(ParseError):
            parse_matrix([[True, 0], [0, 1]], 2, "m")


class TestKets:
    def test_normalization_applied(self):
        ket = parse_ket([1, 1], 2, "k")
        np.testing.assert_allclose(ket.amplitudes, np.array([1, 1]) / np.sqrt(2))

    def test_complex_amplitudes(self):
        ket = parse_ket([[1, 0], [0, 1]], 2, "k")
        np.testing.assert_allclose(ket.amplitudes, np.array([1, 1j]) / np.sqrt(2))

    def test_zero_ket_rejected(self):
        with pytest.raises(ParseError, match="zero"):
            parse_ket([0, 0], 2, "k")

    def test_length_checked(self):
        with pytest.raises(ParseError, match="expected 2 amplitudes"):
            parse_ket([1, 0, 0], 2, "k")


class TestStateSpecs:
    def test_ket_becomes_projector(self):
        rho = state_from_spec({"ket": [1, 0]}, 2, "state")
        np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]])

    def test_matrix_accepted(self):
        rho = state_from_spec({"matrix": [[0.5, 0], [0, 0.5]]}, 2, "state")
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2)

    def test_both_fields_rejected(self):
        with pytest.raises(ParseError, match="exactly one"):
            state_from_spec({"ket": [1, 0], "matrix": [[1, 0], [0, 0]]}, 2, "state")

    def test_domain_error_passes_through(self):
        # structurally fine, physically wrong: trace is 2
        with pytest.raises(q.ValidationError, match="unit trace"):
            state_from_spec({"matrix": [[1, 0], [0, 1]]}, 2, "state")


class TestEnsembleAndProcedure:
    def test_ensemble_round_trip(self):
        e = ensemble_from_spec(
            [
                {"label": "a", "prior": 0.5, "ket": [1, 0]},
                {"label": "b", "prior": 0.5, "matrix": [[0.5, 0.5], [0.5, 0.5]]},
            ],
            2,
        )
        assert e.labels == ("a", "b")
        assert e.prior("a") == 0.5

    def test_missing_label_attributed(self):
        with pytest.raises(ParseError, match=r"ensemble\[0\]\.label"):
            ensemble_from_spec([{"prior": 1.0, "ket": [1, 0]}], 2)

    def test_procedure_round_trip(self):
        x = procedure_from_spec(
            [
                {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                {"label": "m1", "matrix": [[0, 0], [0, 1]]},
            ],
            2,
        )
        assert x.labels == ("m0", "m1")
        assert q.is_standard(x) == pytest.approx(1.0)

    def test_procedure_needs_matrix(self):
        with pytest.raises(ParseError, match=r"procedure\[0\]\.matrix"):
            procedure_from_spec([{"label": "m0"}], 2)

    def test_non_positive_outcome_is_domain_error(self):
        with pytest.raises(q.NotPositiveError):
            procedure_from_spec([{"label": "m0", "matrix": [[-1, 0], [0, 0]]}], 2)
