"""Pure request handlers shared by the HTTP service and the CLI.

Each handler maps a request model to a response model and raises the
package's domain errors; transport concerns (status codes, exit codes,
files) live with the callers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

from .. import lattice as lattice_mod
from .. import threshold as threshold_mod
from ..errors import ModelValidationError
from ..faultpaths import BoundReport, DeltaGrid, FaultSet, randomized_phase_norm, verify_bound
from ..model import MacroLocation, load_model, scaled_model
from .schemas import (
    BoundReportOut,
    DecayRequest,
    DecayResponse,
    DecayRow,
    FaultLocationIn,
    LevelOut,
    PhaseRequest,
    PhaseResponse,
    RunSummary,
    SweepReportOut,
    SweepRequest,
    SweepResponse,
    ThresholdRequest,
    ThresholdResponse,
    VerifyBoundsRequest,
    VerifyBoundsResponse,
)


def _to_fault_set(raw: list[FaultLocationIn], path: str) -> FaultSet:
    try:
        return FaultSet(
            tuple(MacroLocation(step=loc.step, support=tuple(loc.support)) for loc in raw)
        )
    except ValueError as exc:
        raise ModelValidationError(path, str(exc))


def _report_out(report: BoundReport) -> BoundReportOut:
    record = report.to_record()
    record["locations"] = [FaultLocationIn(**loc) for loc in record["locations"]]
    return BoundReportOut(**record)


def _summarize(reports: list[BoundReportOut]) -> RunSummary:
    margins = [r.margin for r in reports]
    finite = [m for m in margins if math.isfinite(m)]
    max_margin = max(finite) if finite else (math.inf if margins else 0.0)
    violations = sum(1 for m in margins if m > 1.0)
    return RunSummary(n_reports=len(reports), max_margin=max_margin, violations=violations)


def run_verify_bounds(request: VerifyBoundsRequest) -> VerifyBoundsResponse:
    model = load_model(request.document)
    grid = DeltaGrid(m0=request.grid.m0, m_max=request.grid.m_max)
    reports = []
    for idx, raw in enumerate(request.fault_sets):
        faults = _to_fault_set(raw, f"fault_sets[{idx}]")
        reports.append(_report_out(verify_bound(model, faults, grid, request.workers)))
    return VerifyBoundsResponse(reports=reports, summary=_summarize(reports))


def run_threshold(request: ThresholdRequest) -> ThresholdResponse:
    if request.preset is not None:
        params = threshold_mod.preset(request.preset)
    elif request.gadget is not None:
        params = threshold_mod.GadgetParams(
            max_locations=request.gadget.max_locations,
            correctable=request.gadget.correctable,
            constant=request.gadget.constant,
        )
    else:
        raise ValueError("threshold request needs a preset name or explicit gadget params")
    eps0 = threshold_mod.threshold_strength(params)
    levels: list[LevelOut] = []
    input_epsilon = request.epsilon
    if input_epsilon is not None:
        trace = threshold_mod.recursion_trace(params, input_epsilon, request.levels)
        levels = [
            LevelOut(level=k, value=lv.value, saturated=lv.saturated)
            for k, lv in enumerate(trace.levels)
        ]
    amp_budget = None
    if request.lattice is not None:
        spec = lattice_mod.LatticeSpec(
            dimension=request.lattice.dimension,
            exponent=request.lattice.exponent,
            amplitude=1.0,
            radius=request.lattice.radius,
            metric=request.lattice.metric,
        )
        amp_budget = threshold_mod.amplitude_budget(eps0, spec, t0=request.t0)
    return ThresholdResponse(
        max_locations=params.max_locations,
        correctable=params.correctable,
        constant=params.constant,
        epsilon0=eps0,
        input_epsilon=input_epsilon,
        levels=levels,
        coupling_budget=threshold_mod.coupling_budget(eps0),
        coupling_budget_constant_free=threshold_mod.coupling_budget_constant_free(eps0),
        amplitude_budget=amp_budget,
    )


def run_decay(request: DecayRequest) -> DecayResponse:
    rows: list[DecayRow] = []
    for opt in request.specs:
        spec = lattice_mod.LatticeSpec(
            dimension=opt.dimension,
            exponent=opt.exponent,
            amplitude=opt.amplitude,
            radius=opt.radius,
            metric=opt.metric,
        )
        summed = lattice_mod.lattice_sum(spec)
        rows.append(
            DecayRow(
                D=spec.dimension,
                z=spec.exponent,
                delta=spec.amplitude,
                R=summed.radius,
                metric=spec.metric,
                value=summed.value,
                tail_halfwidth=summed.tail_halfwidth,
                verdict=summed.verdict,
            )
        )
    if request.scan_dimensions and request.scan_exponents:
        cells = lattice_mod.divergence_scan(
            request.scan_dimensions,
            request.scan_exponents,
            amplitude=request.amplitude,
            metric=request.metric,
        )
        for cell in cells:
            rows.append(
                DecayRow(
                    D=cell.dimension,
                    z=cell.exponent,
                    delta=cell.amplitude,
                    R=cell.radius,
                    metric=cell.metric,
                    value=cell.value,
                    tail_halfwidth=cell.tail_halfwidth,
                    verdict=cell.verdict,
                    growth_law=cell.growth_law,
                    growth_coefficient=cell.growth_coefficient,
                )
            )
    return DecayResponse(rows=rows)


def run_sweep(request: SweepRequest) -> SweepResponse:
    base = load_model(request.document)
    grid = DeltaGrid(m0=request.grid.m0, m_max=request.grid.m_max)
    fault_sets = [
        _to_fault_set(raw, f"fault_sets[{idx}]") for idx, raw in enumerate(request.fault_sets)
    ]
    for scale in request.scale_grid:
        if scale < 0:
            raise ValueError(f"scale grid entries must be nonnegative, got {scale}")
    models = {scale: scaled_model(base, scale) for scale in request.scale_grid}
    cells = [(scale, faults) for scale in request.scale_grid for faults in fault_sets]

    def run_cell(cell):
        scale, faults = cell
        return SweepReportOut(
            scale=scale, report=_report_out(verify_bound(models[scale], faults, grid))
        )

    # cells run in parallel; collection stays in declaration order
    if request.workers > 1:
        with ThreadPoolExecutor(max_workers=request.workers) as pool:
            reports = list(pool.map(run_cell, cells))
    else:
        reports = [run_cell(cell) for cell in cells]
    return SweepResponse(
        reports=reports, summary=_summarize([r.report for r in reports])
    )


def run_phase(request: PhaseRequest) -> PhaseResponse:
    model = load_model(request.document)
    faults = _to_fault_set(request.faults, "faults")
    stats = randomized_phase_norm(
        model,
        faults,
        n_samples=request.n_samples,
        seed=request.seed,
        m=request.m,
        workers=request.workers,
    )
    return PhaseResponse(**stats.to_record())
