"""Post-routing products: statistics, serialization, and waypoint programs.

A completed ScheduleState can be summarized (energy, makespan, wire
utilization), exported as CSV/JSON artifacts, or compressed into a waypoint
program that keeps only every k-th space-time point of each routed path.
Replaying a program re-routes every leg between consecutive waypoints with
the same deterministic router, reproducing the original movements exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import pairwise
from typing import Iterable, Sequence

from .model import (
    DEFAULT_MARGIN,
    WAIT_EPSILON,
    HardwareGraph,
    HardwareError,
    Movement,
    Operation,
    Placement,
    ReconstructionError,
    ScheduleState,
    Seed,
    TimingFault,
    WorkloadError,
    _load_json,
    apply_seeds,
    build_state,
    cost_to_json,
    default_horizon,
    register_outputs,
)
from .routing import Path, SpaceTimePoint, reserve, route_between


@dataclass(frozen=True)
class ScheduleStats:
    total_energy: Fraction
    makespan: int
    per_wire_utilization: dict[str, Fraction]

    def as_dict(self) -> dict:
        return {
            "total_energy": cost_to_json(self.total_energy),
            "makespan": self.makespan,
            "per_wire_utilization": {
                name: float(u) for name, u in self.per_wire_utilization.items()
            },
        }

    def as_text(self) -> str:
        lines = [
            f"total_energy  {cost_to_json(self.total_energy)}",
            f"makespan      {self.makespan}",
            "wire utilization over makespan:",
        ]
        width = max((len(n) for n in self.per_wire_utilization), default=0)
        for name, u in self.per_wire_utilization.items():
            lines.append(f"  {name.ljust(width)}  {float(u):.6f}")
        return "\n".join(lines) + "\n"


def makespan_of(state: ScheduleState) -> int:
    """Last cycle at which any movement or placed operation completes."""
    last = 0
    for m in state.movements:
        last = max(last, m.end_cycle)
    for p in state.placements:
        actor = state.graph.actor(p.actor)
        last = max(last, p.arrival_cycle + actor.op_delay)
    return last


def compute_stats(state: ScheduleState, graph: HardwareGraph) -> ScheduleStats:
    """Energy, makespan, and per-wire utilization of a routed state.

    Energy charges each movement its wire's cost; waiting in place is free
    in the report (movements never include wait steps).  Utilization is the
    fraction of launch cycles in [0, makespan) on which a wire carries
    anything.
    """
    energy = sum((graph.wire(m.wire).cost for m in state.movements), Fraction(0))
    makespan = makespan_of(state)
    utilization: dict[str, Fraction] = {}
    for wire in graph.wires:
        if makespan == 0:
            utilization[wire.name] = Fraction(0)
            continue
        busy = sum(
            1
            for launch, datums in state.wire_history[wire.name].items()
            if datums and 0 <= launch < makespan
        )
        utilization[wire.name] = Fraction(busy, makespan)
    return ScheduleStats(energy, makespan, utilization)


# ---------------------------------------------------------------------------
# Artifact serialization


def movements_to_csv(movements: Iterable[Movement]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["datum", "source_node", "start_cycle", "end_node", "end_cycle"])
    for m in movements:
        writer.writerow([m.datum, m.src, m.start_cycle, m.dst, m.end_cycle])
    return out.getvalue()


def movements_to_rows(movements: Iterable[Movement]) -> list[dict]:
    return [
        {
            "datum": m.datum,
            "source_node": m.src,
            "start_cycle": m.start_cycle,
            "end_node": m.dst,
            "end_cycle": m.end_cycle,
            "wire": m.wire,
        }
        for m in movements
    ]


def movements_from_rows(rows: object) -> list[Movement]:
    if isinstance(rows, dict) and "movements" in rows:
        rows = rows["movements"]
    if not isinstance(rows, list):
        raise WorkloadError("movement document must be a JSON list of rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise WorkloadError(f"movement {i} must be an object")
        try:
            out.append(
                Movement(
                    datum=int(row["datum"]),
                    src=str(row["source_node"]),
                    start_cycle=int(row["start_cycle"]),
                    dst=str(row["end_node"]),
                    end_cycle=int(row["end_cycle"]),
                    wire=str(row["wire"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise WorkloadError(f"movement {i} is malformed: {exc}") from None
    return out


def validate_movements(movements: Iterable[Movement], graph: HardwareGraph) -> None:
    """Structural cross-check of a movement list against a hardware graph."""
    for m in movements:
        wire = graph.wire(m.wire)
        if (wire.src, wire.dst) != (m.src, m.dst):
            raise HardwareError(
                f"movement of datum {m.datum} travels {m.src} -> {m.dst}, but "
                f"wire {m.wire!r} joins {wire.src} -> {wire.dst}"
            )
        if m.end_cycle - m.start_cycle != wire.delay:
            raise HardwareError(
                f"movement of datum {m.datum} on wire {m.wire!r} spans "
                f"{m.end_cycle - m.start_cycle} cycles, wire delay is {wire.delay}"
            )


def placements_to_rows(
    placements: Iterable[Placement],
    workload: tuple[Operation, ...],
    graph: HardwareGraph,
) -> list[dict]:
    rows = []
    for p in placements:
        op = workload[p.operation]
        actor = graph.actor(p.actor)
        rows.append(
            {
                "operation": p.operation,
                "actor": p.actor,
                "node": actor.input_node,
                "cycle": p.arrival_cycle,
                "data": list(op.inputs),
            }
        )
    return rows


def placements_to_csv(rows: Sequence[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["cycle", "node", "data"])
    for row in rows:
        writer.writerow([row["cycle"], row["node"], " ".join(map(str, row["data"]))])
    return out.getvalue()


def schedule_to_dict(
    state: ScheduleState,
    graph: HardwareGraph,
    workload: tuple[Operation, ...],
) -> dict:
    """The full schedule artifact: placements, movements, statistics."""
    return {
        "placements": placements_to_rows(state.placements, workload, graph),
        "movements": movements_to_rows(state.movements),
        "stats": compute_stats(state, graph).as_dict(),
    }


def render_gantt(state: ScheduleState) -> str:
    """Node occupancy over cycles as an aligned text chart.

    One row per node in declaration order, one column per cycle up to the
    makespan, datum ids in the cells.
    """
    makespan = makespan_of(state)
    cycles = list(range(0, makespan + 1))
    cells: dict[str, list[str]] = {}
    for node in state.graph.nodes:
        history = state.node_history[node.name]
        cells[node.name] = [
            ",".join(map(str, sorted(history.get(t, ())))) or "." for t in cycles
        ]
    name_width = max((len(n.name) for n in state.graph.nodes), default=0)
    widths = [
        max(len(str(t)), max(len(cells[n.name][i]) for n in state.graph.nodes))
        for i, t in enumerate(cycles)
    ]
    header = " " * name_width + " | " + " ".join(
        str(t).rjust(w) for t, w in zip(cycles, widths)
    )
    lines = [header]
    for node in state.graph.nodes:
        row = " ".join(c.rjust(w) for c, w in zip(cells[node.name], widths))
        lines.append(f"{node.name.ljust(name_width)} | {row}")
    return "\n".join(lines) + "\n"


def diff_movements(
    ours: Sequence[Movement], theirs: Sequence[Movement]
) -> str | None:
    """First difference between two movement lists, or None when equal."""
    for i, (a, b) in enumerate(zip(ours, theirs)):
        if a != b:
            return f"movement {i} differs: {a} != {b}"
    if len(ours) != len(theirs):
        return f"movement counts differ: {len(ours)} != {len(theirs)}"
    return None


# ---------------------------------------------------------------------------
# Waypoint compression


@dataclass(frozen=True)
class WaypointRequest:
    datum: int
    target: SpaceTimePoint
    waypoints: tuple[SpaceTimePoint, ...]


@dataclass(frozen=True)
class WaypointProgram:
    """A schedule compressed to its key points.

    Every routed request keeps its endpoints plus every stride-th point in
    between; the movements in between are re-derived on replay.
    """

    stride: int
    placements: tuple[Placement, ...]
    requests: tuple[WaypointRequest, ...]


def compress_waypoints(
    state: ScheduleState, paths: Sequence[Path], stride: int
) -> WaypointProgram:
    """Keep every stride-th space-time point of each path plus both endpoints."""
    if not isinstance(stride, int) or stride < 1:
        raise ValueError(f"stride must be a positive integer, got {stride!r}")
    requests = []
    for path in paths:
        points = path.points(state.graph)
        kept = points[::stride]
        if kept[-1] != points[-1]:
            kept.append(points[-1])
        requests.append(WaypointRequest(path.datum, path.destination, tuple(kept)))
    return WaypointProgram(stride, tuple(state.placements), tuple(requests))


def program_to_json(program: WaypointProgram) -> str:
    doc = {
        "stride": program.stride,
        "placements": [
            {"operation": p.operation, "actor": p.actor, "arrival_cycle": p.arrival_cycle}
            for p in program.placements
        ],
        "requests": [
            {
                "datum": r.datum,
                "target": {"node": r.target.node, "cycle": r.target.cycle},
                "waypoints": [{"node": w.node, "cycle": w.cycle} for w in r.waypoints],
            }
            for r in program.requests
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _point_from(raw: object, what: str) -> SpaceTimePoint:
    if not isinstance(raw, dict) or "node" not in raw or "cycle" not in raw:
        raise ReconstructionError(f"{what} must be an object with node and cycle")
    return SpaceTimePoint(str(raw["node"]), int(raw["cycle"]))


def program_from_json(text: str) -> WaypointProgram:
    doc = _load_json(text, "waypoint program", ReconstructionError)
    if not isinstance(doc, dict):
        raise ReconstructionError("waypoint program must be a JSON object")
    try:
        stride = int(doc["stride"])
        placements = tuple(
            Placement(int(p["operation"]), str(p["actor"]), int(p["arrival_cycle"]))
            for p in doc["placements"]
        )
        raw_requests = doc["requests"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ReconstructionError(f"waypoint program is malformed: {exc}") from None
    requests = []
    for i, raw in enumerate(raw_requests):
        if not isinstance(raw, dict):
            raise ReconstructionError(f"request {i} must be an object")
        waypoints = tuple(
            _point_from(w, f"request {i} waypoint") for w in raw.get("waypoints", [])
        )
        if len(waypoints) < 1:
            raise ReconstructionError(f"request {i} has no waypoints")
        requests.append(
            WaypointRequest(
                int(raw["datum"]), _point_from(raw.get("target"), f"request {i} target"),
                waypoints,
            )
        )
    return WaypointProgram(stride, placements, tuple(requests))


def reconstruct(
    program: WaypointProgram,
    graph: HardwareGraph,
    workload: tuple[Operation, ...],
    seeds: Iterable[Seed],
    horizon: int | None = None,
    wait_epsilon: Fraction = WAIT_EPSILON,
    margin: int = DEFAULT_MARGIN,
) -> ScheduleState:
    """Replay a waypoint program into a full schedule.

    Requests are replayed in their original global order and every leg is
    re-routed between consecutive waypoints with the usual deterministic
    tie-breaking, so reservation interference evolves exactly as it did when
    the program was produced.  The horizon and wait epsilon must match the
    original run for the replay to be faithful.
    """
    for placement in program.placements:
        if not 0 <= placement.operation < len(workload):
            raise ReconstructionError(
                f"placement references operation {placement.operation}, workload "
                f"has {len(workload)}"
            )
        op = workload[placement.operation]
        actor = graph.actor(placement.actor)
        expected = op.offset + actor.distribution_latency
        if placement.arrival_cycle != expected:
            raise ReconstructionError(
                f"placement of operation {placement.operation} arrives at "
                f"{placement.arrival_cycle}, workload and hardware imply {expected}"
            )

    if horizon is None:
        horizon = default_horizon(program.placements, graph, margin)
    state = build_state(graph, horizon, wait_epsilon=wait_epsilon)
    apply_seeds(state, seeds)
    state.placements = list(program.placements)
    register_outputs(state, program.placements, workload)

    cursor = 0
    for placement in program.placements:
        op = workload[placement.operation]
        actor = graph.actor(placement.actor)
        target = SpaceTimePoint(actor.input_node, placement.arrival_cycle)
        consume_at = placement.arrival_cycle + actor.op_delay
        for datum in op.distinct_inputs():
            if cursor >= len(program.requests):
                raise ReconstructionError(
                    "program has fewer requests than the placements require"
                )
            request = program.requests[cursor]
            cursor += 1
            if request.datum != datum or request.target != target:
                raise ReconstructionError(
                    f"request {cursor - 1} carries datum {request.datum} to "
                    f"{request.target}, placements expect datum {datum} to {target}"
                )
            if request.waypoints[-1] != target:
                raise ReconstructionError(
                    f"request {cursor - 1} does not end at its target"
                )
            if any(b.cycle <= a.cycle for a, b in pairwise(request.waypoints)):
                raise ReconstructionError(
                    f"request {cursor - 1} waypoint cycles are not increasing"
                )
            for a, b in pairwise(request.waypoints):
                try:
                    leg = route_between(
                        state,
                        datum,
                        a,
                        b,
                        target_node=actor.input_node,
                        consume_at=consume_at,
                        reused=datum in op.reused,
                    )
                except (TimingFault, WorkloadError) as exc:
                    raise ReconstructionError(
                        f"leg {a} -> {b} for datum {datum} cannot be replayed: {exc}"
                    ) from None
                reserve(state, leg)
    if cursor != len(program.requests):
        raise ReconstructionError("program has more requests than the placements use")
    return state
