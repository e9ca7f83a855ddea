"""FastAPI service exposing the probability engine.

Stateless compute endpoints: every request carries its whole scenario, every
response echoes a content digest and the tolerances in effect, so identical
requests produce identical reports.

Error contract: structurally malformed scenarios yield 400 with category
"parse"; domain failures (non-positive operators, impossible outcomes, ...)
yield 422 with category "domain".  Statistical inconsistency and inconclusive
simulations are *results*, not errors, and are flagged in the 200 response.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .. import __version__
from ..config import overrides, tolerances
from ..errors import QprobError
from ..frames import FrameFunction
from ..measurement import is_standard, restrict, to_povm
from ..probability import (
    average_state,
    general_distribution,
    retrodict,
    retrodict_via_duality,
)
from ..scenario import (
    ParseError,
    ensemble_from_spec,
    procedure_from_spec,
    state_from_spec,
)
from ..simulate import Scenario, completion_of, run
from ..verify import run_battery
from .models import (
    ComparisonModel,
    FrequencyModel,
    HealthResponse,
    PredictRequest,
    PredictResponse,
    PropertyModel,
    ReportMeta,
    RetrodictRequest,
    RetrodictResponse,
    SimulateRequest,
    SimulateResponse,
    VerifyRequest,
    VerifyResponse,
)


def _digest(request: BaseModel) -> str:
    payload = json.dumps(request.model_dump(), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()


def _meta(command: str, request: BaseModel) -> ReportMeta:
    return ReportMeta(
        command=command,
        input_digest=_digest(request),
        version=__version__,
        tolerances=tolerances().as_dict(),
    )


@contextmanager
def _request_scope(tolerance_overrides: dict[str, float] | None):
    """Apply per-request tolerance overrides and translate errors."""
    try:
        if tolerance_overrides:
            try:
                ctx = overrides(**tolerance_overrides)
            except TypeError as exc:
                raise ParseError("tolerance_overrides", str(exc)) from exc
            with ctx:
                yield
        else:
            yield
    except ParseError as exc:
        raise HTTPException(
            status_code=400, detail={"category": "parse", "message": str(exc)}
        ) from exc
    except QprobError as exc:
        raise HTTPException(
            status_code=422,
            detail={"category": "domain", "message": str(exc), "kind": type(exc).__name__},
        ) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="qprob", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/predict", response_model=PredictResponse)
    def predict(request: PredictRequest) -> PredictResponse:
        with _request_scope(request.tolerance_overrides):
            meta = _meta("predict", request)
            procedure = procedure_from_spec(
                [o.model_dump() for o in request.procedure], request.dimension
            )
            if request.recorded is not None:
                procedure = restrict(procedure, request.recorded)
            if (request.state is None) == (request.ensemble is None):
                raise ParseError("state", "exactly one of 'state' or 'ensemble' is required")
            if request.state is not None:
                rho = state_from_spec(request.state.model_dump(), request.dimension, "state")
            else:
                rho = average_state(
                    ensemble_from_spec(
                        [e.model_dump() for e in request.ensemble], request.dimension
                    )
                )
            report = general_distribution(procedure, rho)
            return PredictResponse(
                meta=meta,
                probabilities=report.probabilities,
                denominator=report.denominator,
                standard=report.standard,
                identity_scale=report.identity_scale,
            )

    @app.post("/retrodict", response_model=RetrodictResponse)
    def retrodict_endpoint(request: RetrodictRequest) -> RetrodictResponse:
        with _request_scope(request.tolerance_overrides):
            meta = _meta("retrodict", request)
            ensemble = ensemble_from_spec(
                [e.model_dump() for e in request.ensemble], request.dimension
            )
            procedure = procedure_from_spec(
                [o.model_dump() for o in request.procedure], request.dimension
            )
            observed = procedure.operator(request.observed)
            direct = retrodict(ensemble, observed)
            dual = retrodict_via_duality(ensemble, observed)
            discrepancy = max(abs(direct[k] - dual[k]) for k in direct)
            return RetrodictResponse(
                meta=meta,
                posterior=direct,
                duality_posterior=dual,
                max_discrepancy=discrepancy,
            )

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        with _request_scope(request.tolerance_overrides):
            meta = _meta("simulate", request)
            ensemble = ensemble_from_spec(
                [e.model_dump() for e in request.ensemble], request.dimension
            )
            procedure = procedure_from_spec(
                [o.model_dump() for o in request.procedure], request.dimension
            )
            recorded = tuple(request.recorded) if request.recorded else procedure.labels
            # A procedure that is already complete is simulated directly;
            # anything else is embedded into its completion and post-selected.
            k = is_standard(procedure)
            if k is not None and abs(k - 1.0) <= tolerances().identity_scale:
                povm = to_povm(procedure)
            else:
                povm = completion_of(procedure)
            scenario = Scenario(
                ensemble=ensemble,
                full_povm=povm,
                recorded=recorded,
                samples=request.samples,
                seed=request.seed,
            )
            report = run(scenario, analytic_offset=request.analytic_offset)
            return SimulateResponse(
                meta=meta,
                samples=report.samples,
                accepted=report.accepted_count,
                inconclusive=report.inconclusive,
                consistent=report.consistent,
                outcomes={
                    label: FrequencyModel(
                        count=est.count, frequency=est.frequency, stderr=est.stderr
                    )
                    for label, est in report.outcome_frequencies.items()
                },
                preparations={
                    label: FrequencyModel(
                        count=est.count, frequency=est.frequency, stderr=est.stderr
                    )
                    for label, est in report.preparation_frequencies.items()
                },
                comparisons=[
                    ComparisonModel(
                        quantity=row.quantity,
                        label=row.label,
                        analytic=row.analytic,
                        empirical=row.empirical,
                        gap=row.gap,
                        stderr=row.stderr,
                        gap_over_stderr=row.gap_over_stderr,
                        consistent=row.consistent,
                    )
                    for row in report.comparisons
                ],
            )

    @app.post("/verify", response_model=VerifyResponse)
    def verify(request: VerifyRequest) -> VerifyResponse:
        with _request_scope(request.tolerance_overrides):
            meta = _meta("verify", request)
            if any(dim < 1 for dim in request.dims):
                raise ParseError("dims", "dimensions must be at least 1")
            factory = None
            if request.inject_nonadditive_frame:
                factory = _nonadditive_frame
            results = run_battery(seed=request.seed, dims=request.dims, frame_factory=factory)
            return VerifyResponse(
                meta=meta,
                all_passed=all(r.passed for r in results),
                properties=[
                    PropertyModel(
                        name=r.name,
                        dim=r.dim,
                        max_violation=r.max_violation,
                        threshold=r.threshold,
                        passed=r.passed,
                        case=r.case,
                    )
                    for r in results
                ],
            )

    return app


def _nonadditive_frame(dim: int, rng) -> FrameFunction:
    """Adversarial evaluator: squared trace is positive but not additive."""
    return FrameFunction(dim, lambda a: a.trace() ** 2)


app = create_app()
