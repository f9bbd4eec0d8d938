"""HTTP service exposing the scheduling pipeline.

Requests carry the hardware, workload, and seed documents as raw text, so
the core parsers stay the single source of validation (including position
annotated syntax errors).  Every endpoint is a thin orchestration of the
library: parse, place, register outputs, route, then shape the artifacts.
Domain failures surface as 422 responses carrying the exception type, which
lets clients distinguish unusable inputs from schedules that cannot be met.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .model import (
    DEFAULT_MARGIN,
    WAIT_EPSILON,
    HardwareGraph,
    Operation,
    Placement,
    ScheduleState,
    SchedulingError,
    Seed,
    apply_seeds,
    build_state,
    default_horizon,
    parse_cost,
    parse_hardware,
    parse_seeds,
    parse_workload,
    register_outputs,
)
from .placing import DEFAULT_STARVATION_BOUND, filtered_placing
from .routing import route_all
from .schedule import (
    compress_waypoints,
    compute_stats,
    diff_movements,
    movements_from_rows,
    program_from_json,
    program_to_json,
    reconstruct,
    render_gantt,
    schedule_to_dict,
    validate_movements,
)
from .sim import emit_control_packets, simulate


@dataclass
class PipelineResult:
    """Everything a fully scheduled run produces, ready for shaping."""

    graph: HardwareGraph
    workload: tuple[Operation, ...]
    seeds: tuple[Seed, ...]
    placements: list[Placement]
    state: ScheduleState


def resolve_epsilon(value: int | float | str | None) -> Fraction:
    if value is None:
        return WAIT_EPSILON
    epsilon = parse_cost(value)
    if epsilon <= 0:
        raise ValueError(f"wait epsilon must be positive, got {value!r}")
    return epsilon


def run_pipeline(
    hardware_text: str,
    workload_text: str,
    seeds_text: str,
    horizon: int | None = None,
    wait_epsilon: Fraction = WAIT_EPSILON,
    margin: int = DEFAULT_MARGIN,
    starvation_bound: int = DEFAULT_STARVATION_BOUND,
) -> PipelineResult:
    """Parse the three documents and drive placing and routing end to end."""
    graph = parse_hardware(hardware_text)
    workload = parse_workload(workload_text)
    seeds = parse_seeds(seeds_text)
    placements = filtered_placing(workload, graph.actors, graph, starvation_bound)
    if horizon is None:
        horizon = default_horizon(placements, graph, margin)
    state = build_state(graph, horizon, wait_epsilon)
    apply_seeds(state, seeds)
    register_outputs(state, placements, workload)
    route_all(state, placements, workload)
    return PipelineResult(graph, workload, seeds, placements, state)


class ScheduleRequest(BaseModel):
    hardware: str
    workload: str
    seeds: str
    horizon: int | None = None
    wait_epsilon: int | float | str | None = None
    margin: int = DEFAULT_MARGIN


class CompareRequest(BaseModel):
    hardware_a: str
    hardware_b: str
    workload: str
    seeds: str
    horizon: int | None = None
    wait_epsilon: int | float | str | None = None
    margin: int = DEFAULT_MARGIN


class VerifyRequest(BaseModel):
    hardware: str
    workload: str
    seeds: str
    movements: str
    control_latency: int = 0


class CompressRequest(BaseModel):
    hardware: str
    workload: str
    seeds: str
    stride: int = 4
    horizon: int | None = None
    wait_epsilon: int | float | str | None = None
    margin: int = DEFAULT_MARGIN


class ReconstructRequest(BaseModel):
    hardware: str
    workload: str
    seeds: str
    program: str
    horizon: int | None = None
    wait_epsilon: int | float | str | None = None
    margin: int = DEFAULT_MARGIN


app = FastAPI(title="cycleflow scheduling service", version="0.1.0")


@app.exception_handler(SchedulingError)
async def scheduling_error_handler(request: Request, exc: SchedulingError):
    return JSONResponse(
        status_code=422,
        content={"detail": str(exc), "error_type": type(exc).__name__},
    )


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(
        status_code=422,
        content={"detail": str(exc), "error_type": type(exc).__name__},
    )


@app.get("/health")
async def health() -> dict:
    return {"status": "ok"}


@app.post("/schedule")
async def schedule_endpoint(req: ScheduleRequest) -> dict:
    result = run_pipeline(
        req.hardware,
        req.workload,
        req.seeds,
        horizon=req.horizon,
        wait_epsilon=resolve_epsilon(req.wait_epsilon),
        margin=req.margin,
    )
    body = schedule_to_dict(result.state, result.graph, result.workload)
    body["horizon"] = result.state.horizon
    body["gantt"] = render_gantt(result.state)
    return body


@app.post("/compare")
async def compare_endpoint(req: CompareRequest) -> dict:
    epsilon = resolve_epsilon(req.wait_epsilon)
    # Shared documents must be sound regardless of either hardware variant.
    parse_workload(req.workload)
    parse_seeds(req.seeds)

    def one_side(hardware_text: str) -> tuple[dict, object]:
        try:
            result = run_pipeline(
                hardware_text,
                req.workload,
                req.seeds,
                horizon=req.horizon,
                wait_epsilon=epsilon,
                margin=req.margin,
            )
        except SchedulingError as exc:
            return {"error": str(exc), "error_type": type(exc).__name__}, None
        stats = compute_stats(result.state, result.graph)
        return {"stats": stats.as_dict()}, stats

    side_a, stats_a = one_side(req.hardware_a)
    side_b, stats_b = one_side(req.hardware_b)
    delta = None
    exclusive = None
    if stats_a is not None and stats_b is not None:
        delta = {
            "total_energy": float(stats_b.total_energy - stats_a.total_energy),
            "makespan": stats_b.makespan - stats_a.makespan,
        }
        wires_a = set(stats_a.per_wire_utilization)
        wires_b = set(stats_b.per_wire_utilization)
        exclusive = {
            "a": sorted(wires_a - wires_b),
            "b": sorted(wires_b - wires_a),
        }
    return {"a": side_a, "b": side_b, "delta": delta, "exclusive_wires": exclusive}


@app.post("/verify")
async def verify_endpoint(req: VerifyRequest) -> dict:
    graph = parse_hardware(req.hardware)
    workload = parse_workload(req.workload)
    seeds = parse_seeds(req.seeds)
    try:
        doc = json.loads(req.movements)
    except json.JSONDecodeError as exc:
        raise ValueError(f"movements document is not valid JSON: {exc}") from None
    movements = movements_from_rows(doc)
    validate_movements(movements, graph)
    if isinstance(doc, dict) and "placements" in doc:
        placements = [
            Placement(row["operation"], row["actor"], row["cycle"])
            for row in doc["placements"]
        ]
    else:
        placements = filtered_placing(workload, graph.actors, graph)
    packets = emit_control_packets(movements, req.control_latency)
    report = simulate(graph, packets, placements, workload, seeds)
    body = report.as_dict()
    body["ok"] = report.ok
    return body


@app.post("/compress")
async def compress_endpoint(req: CompressRequest) -> dict:
    epsilon = resolve_epsilon(req.wait_epsilon)
    result = run_pipeline(
        req.hardware,
        req.workload,
        req.seeds,
        horizon=req.horizon,
        wait_epsilon=epsilon,
        margin=req.margin,
    )
    program = compress_waypoints(result.state, result.state.requests, req.stride)
    replayed = reconstruct(
        program,
        result.graph,
        result.workload,
        result.seeds,
        horizon=result.state.horizon,
        wait_epsilon=epsilon,
    )
    first_diff = diff_movements(replayed.movements, result.state.movements)
    return {
        "program": json.loads(program_to_json(program)),
        "matches_schedule": first_diff is None,
        "first_diff": first_diff,
    }


@app.post("/reconstruct")
async def reconstruct_endpoint(req: ReconstructRequest) -> dict:
    epsilon = resolve_epsilon(req.wait_epsilon)
    graph = parse_hardware(req.hardware)
    workload = parse_workload(req.workload)
    seeds = parse_seeds(req.seeds)
    program = program_from_json(req.program)
    state = reconstruct(
        program,
        graph,
        workload,
        seeds,
        horizon=req.horizon,
        wait_epsilon=epsilon,
        margin=req.margin,
    )
    direct = run_pipeline(
        req.hardware,
        req.workload,
        req.seeds,
        horizon=req.horizon,
        wait_epsilon=epsilon,
        margin=req.margin,
    )
    first_diff = diff_movements(state.movements, direct.state.movements)
    body = schedule_to_dict(state, graph, workload)
    body["horizon"] = state.horizon
    body["matches_direct"] = first_diff is None
    body["first_diff"] = first_diff
    return body
