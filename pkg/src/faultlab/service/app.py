"""FastAPI application exposing the faultlab handlers.

Run with: uvicorn faultlab.service.app:app
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DivergentSumError, ModelValidationError, ResourceLimitError
from . import handlers
from .schemas import (
    DecayRequest,
    DecayResponse,
    HealthResponse,
    PhaseRequest,
    PhaseResponse,
    SweepRequest,
    SweepResponse,
    ThresholdRequest,
    ThresholdResponse,
    VerifyBoundsRequest,
    VerifyBoundsResponse,
)

app = FastAPI(title="faultlab", version=__version__)


@app.exception_handler(ModelValidationError)
async def model_validation_handler(request: Request, exc: ModelValidationError):
    return JSONResponse(
        status_code=422,
        content={"error": "model_validation", "path": exc.path, "message": exc.message},
    )


@app.exception_handler(ResourceLimitError)
async def resource_limit_handler(request: Request, exc: ResourceLimitError):
    return JSONResponse(
        status_code=400, content={"error": "resource_limit", "message": str(exc)}
    )


@app.exception_handler(DivergentSumError)
async def divergent_sum_handler(request: Request, exc: DivergentSumError):
    return JSONResponse(
        status_code=400, content={"error": "divergent_sum", "message": str(exc)}
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=400, content={"error": "invalid_parameter", "message": str(exc)}
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/verify-bounds", response_model=VerifyBoundsResponse)
def verify_bounds(request: VerifyBoundsRequest) -> VerifyBoundsResponse:
    return handlers.run_verify_bounds(request)


@app.post("/threshold", response_model=ThresholdResponse)
def threshold(request: ThresholdRequest) -> ThresholdResponse:
    return handlers.run_threshold(request)


@app.post("/decay-sum", response_model=DecayResponse)
def decay_sum(request: DecayRequest) -> DecayResponse:
    return handlers.run_decay(request)


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    return handlers.run_sweep(request)


@app.post("/phase-experiment", response_model=PhaseResponse)
def phase_experiment(request: PhaseRequest) -> PhaseResponse:
    return handlers.run_phase(request)
