"""Request and response models for the faultlab service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class FaultLocationIn(BaseModel):
    step: int
    support: list[int] = Field(min_length=1, max_length=2)


class GridOptions(BaseModel):
    m0: int = 64
    m_max: int = 1024


class VerifyBoundsRequest(BaseModel):
    document: dict[str, Any]
    fault_sets: list[list[FaultLocationIn]]
    grid: GridOptions = GridOptions()
    workers: int = 1


class BoundReportOut(BaseModel):
    regime: str
    r: int
    measured: float
    bound: float
    margin: float
    delta: float
    delta_halved_change: float
    locations: list[FaultLocationIn]
    parameters: dict[str, float]


class RunSummary(BaseModel):
    n_reports: int
    max_margin: float
    violations: int


class VerifyBoundsResponse(BaseModel):
    reports: list[BoundReportOut]
    summary: RunSummary


class GadgetParamsIn(BaseModel):
    max_locations: int
    correctable: int
    constant: float


class LatticeOptions(BaseModel):
    dimension: int
    exponent: float
    amplitude: float = 1.0
    radius: Optional[float] = None
    metric: str = "euclidean"


class ThresholdRequest(BaseModel):
    preset: Optional[str] = None
    gadget: Optional[GadgetParamsIn] = None
    epsilon: Optional[float] = None
    levels: int = 10
    lattice: Optional[LatticeOptions] = None
    t0: float = 1.0


class LevelOut(BaseModel):
    level: int
    value: float
    saturated: bool


class ThresholdResponse(BaseModel):
    max_locations: int
    correctable: int
    constant: float
    epsilon0: float
    input_epsilon: Optional[float] = None
    levels: list[LevelOut]
    coupling_budget: float
    coupling_budget_constant_free: float
    amplitude_budget: Optional[float] = None


class DecayRequest(BaseModel):
    specs: list[LatticeOptions] = []
    scan_dimensions: Optional[list[int]] = None
    scan_exponents: Optional[list[float]] = None
    metric: str = "euclidean"
    amplitude: float = 1.0


class DecayRow(BaseModel):
    D: int
    z: float
    delta: float
    R: float
    metric: str
    value: float
    tail_halfwidth: float
    verdict: str
    growth_law: Optional[str] = None
    growth_coefficient: Optional[float] = None


class DecayResponse(BaseModel):
    rows: list[DecayRow]


class SweepRequest(BaseModel):
    document: dict[str, Any]
    scale_grid: list[float]
    fault_sets: list[list[FaultLocationIn]]
    grid: GridOptions = GridOptions()
    workers: int = 1


class SweepReportOut(BaseModel):
    scale: float
    report: BoundReportOut


class SweepResponse(BaseModel):
    reports: list[SweepReportOut]
    summary: RunSummary


class PhaseRequest(BaseModel):
    document: dict[str, Any]
    faults: list[FaultLocationIn]
    n_samples: int = 1000
    seed: int = 0
    m: int = 64
    workers: int = 1


class PhaseResponse(BaseModel):
    n_branches: int
    n_samples: int
    seed: int
    m: int
    mean: float
    std: float
    min: float
    max: float
    coherent_norm: float


class HealthResponse(BaseModel):
    status: str
    version: str
