"""Pydantic request/response models for the HTTP service.

Matrix and ket payloads stay as raw nested JSON here; the numerical parsing
and validation happen in :mod:`qprob.scenario` so that structural errors get
field-attributed messages.
"""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, Field

MatrixData = list[list[Any]]
KetData = list[Any]


class StateSpec(BaseModel):
    matrix: MatrixData | None = None
    ket: KetData | None = None


class EnsembleEntrySpec(BaseModel):
    label: str
    prior: float
    matrix: MatrixData | None = None
    ket: KetData | None = None


class OutcomeSpec(BaseModel):
    label: str
    matrix: MatrixData


class PredictRequest(BaseModel):
    dimension: int
    procedure: list[OutcomeSpec]
    state: StateSpec | None = None
    ensemble: list[EnsembleEntrySpec] | None = None
    recorded: list[str] | None = None
    tolerance_overrides: dict[str, float] | None = None


class RetrodictRequest(BaseModel):
    dimension: int
    ensemble: list[EnsembleEntrySpec]
    procedure: list[OutcomeSpec]
    observed: str
    tolerance_overrides: dict[str, float] | None = None


class SimulateRequest(BaseModel):
    dimension: int
    ensemble: list[EnsembleEntrySpec]
    procedure: list[OutcomeSpec]
    recorded: list[str] | None = None
    samples: int = 100_000
    seed: int = 0
    # Fault-injection knob shifting analytic targets; used to exercise the
    # statistical-inconsistency exit path end to end.
    analytic_offset: float = 0.0
    tolerance_overrides: dict[str, float] | None = None


class VerifyRequest(BaseModel):
    seed: int = 0
    dims: list[int] = Field(default_factory=lambda: [2, 3, 4])
    # Replaces hidden frames with a non-additive evaluator, so the battery
    # demonstrably catches and reports a frame violation.
    inject_nonadditive_frame: bool = False
    tolerance_overrides: dict[str, float] | None = None


class ReportMeta(BaseModel):
    command: str
    input_digest: str
    version: str
    tolerances: dict[str, float]


class PredictResponse(BaseModel):
    meta: ReportMeta
    probabilities: dict[str, float]
    denominator: float
    standard: bool
    identity_scale: float | None = None


class RetrodictResponse(BaseModel):
    meta: ReportMeta
    posterior: dict[str, float]
    duality_posterior: dict[str, float]
    max_discrepancy: float


class FrequencyModel(BaseModel):
    count: int
    frequency: float
    stderr: float


class ComparisonModel(BaseModel):
    quantity: str
    label: str
    analytic: float
    empirical: float
    gap: float
    stderr: float
    gap_over_stderr: float | None = None
    consistent: bool


class SimulateResponse(BaseModel):
    meta: ReportMeta
    samples: int
    accepted: int
    inconclusive: bool
    consistent: bool
    outcomes: dict[str, FrequencyModel]
    preparations: dict[str, FrequencyModel]
    comparisons: list[ComparisonModel]


class PropertyModel(BaseModel):
    name: str
    dim: int
    max_violation: float
    threshold: float
    passed: bool
    case: dict[str, Any] | None = None


class VerifyResponse(BaseModel):
    meta: ReportMeta
    all_passed: bool
    properties: list[PropertyModel]


class HealthResponse(BaseModel):
    status: str
    version: str
