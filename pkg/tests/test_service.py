"""HTTP surface: endpoints, error categories, report metadata."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from qprob.service.app import app


@pytest.fixture(scope="module")
def client() -> TestClient:
    return TestClient(app)


SKEW_PROCEDURE = [
    {"label": "m0", "matrix": [[1, 0], [0, 0]]},
    {"label": "m1", "matrix": [[0.5, 0.5], [0.5, 0.5]]},
]
ZERO_PLUS_ENSEMBLE = [
    {"label": "s0", "prior": 0.5, "ket": [1, 0]},
    {"label": "s1", "prior": 0.5, "ket": [1, 1]},
]


class TestHealth:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"


class TestPredict:
    def test_general_law_case(self, client):
        response = client.post(
            "/predict",
            json={"dimension": 2, "procedure": SKEW_PROCEDURE, "state": {"ket": [1, 0]}},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["probabilities"]["m0"] == pytest.approx(2 / 3, abs=1e-12)
        assert not body["standard"]
        assert body["meta"]["command"] == "predict"
        assert body["meta"]["input_digest"].startswith("sha256:")

    def test_standard_povm_flagged(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": [
                    {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                    {"label": "m1", "matrix": [[0, 0], [0, 1]]},
                ],
                "state": {"ket": [1, 1]},
            },
        )
        body = response.json()
        assert body["standard"]
        assert body["identity_scale"] == pytest.approx(1.0)
        assert body["probabilities"]["m0"] == pytest.approx(0.5, abs=1e-12)

    def test_recorded_restriction_applies(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": SKEW_PROCEDURE,
                "recorded": ["m0"],
                "state": {"ket": [1, 0]},
            },
        )
        assert response.json()["probabilities"] == {"m0": 1.0}

    def test_ensemble_input_uses_average_state(self, client):
        response = client.post(
            "/predict",
            json={"dimension": 2, "procedure": SKEW_PROCEDURE, "ensemble": ZERO_PLUS_ENSEMBLE},
        )
        assert response.status_code == 200

    def test_state_and_ensemble_together_is_parse_error(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": SKEW_PROCEDURE,
                "state": {"ket": [1, 0]},
                "ensemble": ZERO_PLUS_ENSEMBLE,
            },
        )
        assert response.status_code == 400
        assert response.json()["detail"]["category"] == "parse"

    def test_malformed_matrix_is_parse_error(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": [{"label": "m0", "matrix": [[1, 0]]}],
                "state": {"ket": [1, 0]},
            },
        )
        assert response.status_code == 400
        assert "procedure[0].matrix" in response.json()["detail"]["message"]

    def test_non_positive_outcome_is_domain_error(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": [{"label": "m0", "matrix": [[-1, 0], [0, 0]]}],
                "state": {"ket": [1, 0]},
            },
        )
        assert response.status_code == 422
        assert response.json()["detail"]["category"] == "domain"
        assert response.json()["detail"]["kind"] == "NotPositiveError"

    def test_incompatible_state_is_domain_error(self, client):
        response = client.post(
            "/predict",
            json={
                "dimension": 2,
                "procedure": [{"label": "m0", "matrix": [[1, 0], [0, 0]]}],
                "state": {"ket": [0, 1]},
            },
        )
        assert response.status_code == 422
        assert response.json()["detail"]["kind"] == "IncompatibleStateError"

    def test_identical_requests_identical_reports(self, client):
        payload = {"dimension": 2, "procedure": SKEW_PROCEDURE, "state": {"ket": [1, 0]}}
        assert client.post("/predict", json=payload).json() == client.post(
            "/predict", json=payload
        ).json()


class TestRetrodict:
    def test_zero_plus_case(self, client):
        response = client.post(
            "/retrodict",
            json={
                "dimension": 2,
                "ensemble": ZERO_PLUS_ENSEMBLE,
                "procedure": [
                    {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                    {"label": "m1", "matrix": [[0, 0], [0, 1]]},
                ],
                "observed": "m0",
            },
        )
        body = response.json()
        assert body["posterior"]["s0"] == pytest.approx(2 / 3, abs=1e-12)
        assert body["posterior"]["s1"] == pytest.approx(1 / 3, abs=1e-12)
        assert body["max_discrepancy"] <= 1e-12

    def test_impossible_outcome_is_domain_error(self, client):
        response = client.post(
            "/retrodict",
            json={
                "dimension": 2,
                "ensemble": [{"label": "s", "prior": 1.0, "ket": [1, 0]}],
                "procedure": [
                    {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                    {"label": "m1", "matrix": [[0, 0], [0, 1]]},
                ],
                "observed": "m1",
            },
        )
        assert response.status_code == 422
        assert response.json()["detail"]["kind"] == "OutcomeImpossibleError"


class TestSimulate:
    def test_consistent_run(self, client):
        response = client.post(
            "/simulate",
            json={
                "dimension": 2,
                "ensemble": [{"label": "s", "prior": 1.0, "ket": [1, 0]}],
                "procedure": SKEW_PROCEDURE,
                "samples": 50_000,
                "seed": 3,
            },
        )
        body = response.json()
        assert body["consistent"]
        assert not body["inconclusive"]
        row = next(r for r in body["comparisons"] if r["label"] == "m0")
        assert row["analytic"] == pytest.approx(2 / 3, abs=1e-12)
        assert abs(row["empirical"] - 2 / 3) <= 4 * row["stderr"]

    def test_corrupted_analytic_target_flags_inconsistency(self, client):
        response = client.post(
            "/simulate",
            json={
                "dimension": 2,
                "ensemble": [{"label": "s", "prior": 1.0, "ket": [1, 0]}],
                "procedure": SKEW_PROCEDURE,
                "samples": 50_000,
                "seed": 3,
                "analytic_offset": 0.05,
            },
        )
        body = response.json()
        assert not body["consistent"]
        assert not body["inconclusive"]

    def test_inconclusive_run(self, client):
        response = client.post(
            "/simulate",
            json={
                "dimension": 2,
                "ensemble": [{"label": "s", "prior": 1.0, "ket": [1, 0]}],
                "procedure": [
                    {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                    {"label": "m1", "matrix": [[0, 0], [0, 1]]},
                ],
                "recorded": ["m1"],
                "samples": 1_000,
                "seed": 5,
            },
        )
        body = response.json()
        assert body["inconclusive"]
        assert body["accepted"] == 0


class TestVerify:
    def test_default_battery(self, client):
        response = client.post("/verify", json={"seed": 0, "dims": [2, 3]})
        body = response.json()
        assert body["all_passed"]
        names = {row["name"] for row in body["properties"]}
        assert "reconstruction" in names and "duality" in names

    def test_injected_nonadditive_frame_fails(self, client):
        response = client.post(
            "/verify", json={"seed": 0, "dims": [2], "inject_nonadditive_frame": True}
        )
        body = response.json()
        assert not body["all_passed"]
        failing = [row for row in body["properties"] if not row["passed"]]
        assert any(row["name"] == "additivity" for row in failing)
        assert all(row["case"] is not None for row in failing)


class TestToleranceOverrides:
    def test_override_reported_and_applied(self, client):
        # a state 2e-10 away from unit trace: rejected by default, accepted
        # when the trace tolerance is loosened
        state = {"matrix": [[0.5 + 2e-10, 0], [0, 0.5]]}
        payload = {
            "dimension": 2,
            "procedure": [
                {"label": "m0", "matrix": [[1, 0], [0, 0]]},
                {"label": "m1", "matrix": [[0, 0], [0, 1]]},
            ],
            "state": state,
        }
        rejected = client.post("/predict", json=payload)
        assert rejected.status_code == 422

        payload["tolerance_overrides"] = {"trace": 1e-8}
        accepted = client.post("/predict", json=payload)
        assert accepted.status_code == 200
        assert accepted.json()["meta"]["tolerances"]["trace"] == 1e-8

    def test_unknown_override_is_parse_error(self, client):
        response = client.post(
            "/verify", json={"dims": [2], "tolerance_overrides": {"nope": 1.0}}
        )
        assert response.status_code == 400
