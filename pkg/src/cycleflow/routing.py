"""Cycle-accurate datum routing over an implicit time-expanded graph.

Vertices of the search graph are (node, cycle) pairs.  A wire traversal
launched at cycle t reaches the far node at t + delay; an implicit wait wire
lets a datum hold its position for one cycle at a tiny epsilon cost.  The
router runs Dijkstra backward from the requested arrival point toward any
cycle at which the datum first appears somewhere, so a request is feasible
exactly when some admissible schedule delivers the datum at the precise
arrival cycle.

Admissibility is checked against the live reservations in the ScheduleState:
a wire launch must fit the wire's bandwidth alongside whatever already
shares it, and landing a datum in a node must fit the node's capacity at
every cycle the datum will then occupy (memories keep a copy until the
horizon; a target actor input frees it when the operation consumes it).

Tie-breaking among equal-cost paths is deterministic: prefer the path whose
physical launches are latest, considered from the arrival end backward, so
datums linger at their sources rather than arriving early downstream; break
remaining ties by wire declaration order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Iterable, Mapping

from .model import (
    HardwareGraph,
    Movement,
    Operation,
    Placement,
    ScheduleState,
    SchedulingError,
    StalePathError,
    TimingFault,
    WorkloadError,
    build_state,
)


@dataclass(frozen=True)
class SpaceTimePoint:
    node: str
    cycle: int


@dataclass(frozen=True)
class PathStep:
    """One edge of a routed path; wire None means hold in place one cycle."""

    wire: str | None
    launch: int


@dataclass(frozen=True)
class Path:
    """A fully resolved route for one datum, arriving exactly on time.

    consume_at and reused govern how long the datum stays resident in the
    target node once it lands there; state_version pins the reservations the
    path was computed against.
    """

    datum: int
    origin: SpaceTimePoint
    destination: SpaceTimePoint
    steps: tuple[PathStep, ...]
    cost: Fraction
    target_node: str
    consume_at: int | None
    reused: bool
    state_version: int

    def points(self, graph: HardwareGraph) -> list[SpaceTimePoint]:
        """Every space-time point the path occupies, origin through arrival."""
        out = [self.origin]
        here = self.origin
        for step in self.steps:
            if step.wire is None:
                here = SpaceTimePoint(here.node, step.launch + 1)
            else:
                wire = graph.wire(step.wire)
                here = SpaceTimePoint(wire.dst, step.launch + wire.delay)
            out.append(here)
        return out


def locate_datum(state: ScheduleState, datum: int) -> list[SpaceTimePoint]:
    """Every (node, cycle) at which the datum is recorded, within horizon."""
    points = [
        SpaceTimePoint(node, cycle)
        for node, history in state.node_history.items()
        for cycle, datums in history.items()
        if datum in datums
    ]
    if not points:
        raise WorkloadError(
            f"datum {datum} is not present anywhere in the schedule history"
        )
    points.sort(key=lambda p: (p.cycle, p.node))
    return points


def _run_starts(state: ScheduleState, datum: int) -> set[tuple[str, int]]:
    """Points where a presence run of the datum begins.

    These are the cycles at which the datum first materializes somewhere, so
    they are the only honest places a route may depart from.
    """
    starts: set[tuple[str, int]] = set()
    for node, history in state.node_history.items():
        for cycle, datums in history.items():
            if datum in datums and (cycle == 0 or datum not in history.get(cycle - 1, ())):
                starts.add((node, cycle))
    return starts


def _retention_stop(
    state: ScheduleState,
    node: str,
    target_node: str,
    consume_at: int | None,
    reused: bool,
) -> int:
    """First cycle at which a datum landed in `node` is no longer held.

    Consumption frees a target actor input; everywhere else keeps a copy to
    the horizon (moving a datum never removes it from the source).
    """
    if (
        consume_at is not None
        and node == target_node
        and state.graph.node(node).kind == "actor_input"
        and not reused
    ):
        return consume_at
    return state.horizon + 1


def _search(
    state: ScheduleState,
    datum: int,
    destination: SpaceTimePoint,
    is_terminal: Callable[[str, int], bool],
    target_node: str,
    consume_at: int | None,
    reused: bool,
) -> tuple[SpaceTimePoint, tuple[PathStep, ...], Fraction]:
    """Backward Dijkstra from the destination to any terminal point.

    Heap entries order by (cost, launch key, wire key): the launch key holds
    negated launch cycles in backward encounter order, so among equal costs
    the path whose launches are latest pops first; the wire key settles what
    remains by declaration order.
    """
    graph = state.graph
    epsilon = state.wait_epsilon

    def coverable(node: str, cycle: int) -> bool:
        return state.present(datum, node, cycle) or state.can_insert(datum, node, cycle)

    ticket = count()
    start = (Fraction(0), (), (), next(ticket), destination.node, destination.cycle, ())
    heap = [start]
    settled: set[tuple[str, int]] = set()
    frontier = destination.cycle

    while heap:
        cost, lkey, wkey, _, node, cycle, steps = heapq.heappop(heap)
        if (node, cycle) in settled:
            continue
        settled.add((node, cycle))
        frontier = min(frontier, cycle)

        if is_terminal(node, cycle):
            return SpaceTimePoint(node, cycle), tuple(reversed(steps)), cost

        # Hold in place: forward, the datum occupies this node at cycle - 1
        # and stays through `cycle`, so both cells must fit.
        if cycle >= 1 and coverable(node, cycle) and coverable(node, cycle - 1):
            entry = (
                cost + epsilon,
                lkey,
                wkey,
                next(ticket),
                node,
                cycle - 1,
                steps + (PathStep(None, cycle - 1),),
            )
            if (node, cycle - 1) not in settled:
                heapq.heappush(heap, entry)

        stop = _retention_stop(state, node, target_node, consume_at, reused)
        for wire in graph.wires_into(node):
            launch = cycle - wire.delay
            if launch < 0 or (wire.src, launch) in settled:
                continue
            if not state.wire_can_carry(datum, wire.name, launch):
                continue
            if not state.can_insert_span(datum, node, cycle, stop):
                continue
            entry = (
                cost + wire.cost,
                lkey + (-launch,),
                wkey + (wire.index,),
                next(ticket),
                wire.src,
                launch,
                steps + (PathStep(wire.name, launch),),
            )
            heapq.heappush(heap, entry)

    raise TimingFault(datum, destination.node, destination.cycle, frontier)


def route_datum(
    state: ScheduleState,
    datum: int,
    target: SpaceTimePoint,
    consume_at: int | None = None,
    reused: bool = False,
) -> Path:
    """Minimum-cost admissible route ending at exactly (target.node, target.cycle).

    The route may depart from any point where the datum materializes; waiting
    in place costs wait_epsilon per cycle.  Does not mutate the state; apply
    the result with reserve().
    """
    graph = state.graph
    graph.node(target.node)
    if not 0 <= target.cycle <= state.horizon:
        raise WorkloadError(
            f"target cycle {target.cycle} outside the horizon [0, {state.horizon}]"
        )
    starts = _run_starts(state, datum)
    if not starts:
        raise WorkloadError(
            f"datum {datum} is not present anywhere in the schedule history"
        )
    origin, steps, cost = _search(
        state,
        datum,
        target,
        lambda node, cycle: (node, cycle) in starts,
        target.node,
        consume_at,
        reused,
    )
    return Path(
        datum=datum,
        origin=origin,
        destination=target,
        steps=steps,
        cost=cost,
        target_node=target.node,
        consume_at=consume_at,
        reused=reused,
        state_version=state.version,
    )


def route_between(
    state: ScheduleState,
    datum: int,
    origin: SpaceTimePoint,
    destination: SpaceTimePoint,
    target_node: str,
    consume_at: int | None = None,
    reused: bool = False,
) -> Path:
    """Route one leg with both endpoints pinned.

    Used when replaying waypoint programs: the datum must already sit at the
    origin point, and retention at the request's true target node follows the
    original request (target_node is where the consuming operation reads the
    datum, which may lie beyond this leg).
    """
    graph = state.graph
    graph.node(origin.node)
    graph.node(destination.node)
    if not state.present(datum, origin.node, origin.cycle):
        raise WorkloadError(
            f"datum {datum} is not present at {origin.node!r} cycle {origin.cycle}"
        )
    if destination.cycle < origin.cycle:
        raise WorkloadError("leg destination precedes its origin")
    origin_found, steps, cost = _search(
        state,
        datum,
        destination,
        lambda node, cycle: node == origin.node and cycle == origin.cycle,
        target_node,
        consume_at,
        reused,
    )
    return Path(
        datum=datum,
        origin=origin_found,
        destination=destination,
        steps=steps,
        cost=cost,
        target_node=target_node,
        consume_at=consume_at,
        reused=reused,
        state_version=state.version,
    )


def reserve(state: ScheduleState, path: Path) -> ScheduleState:
    """Commit a routed path: mark wires and nodes, emit movement records.

    Wait steps never become movements; they only extend node presence.
    """
    if path.state_version != state.version:
        raise StalePathError(
            f"path for datum {path.datum} was computed against state version "
            f"{path.state_version}, state is now at {state.version}"
        )
    if not state.present(path.datum, path.origin.node, path.origin.cycle):
        raise StalePathError(
            f"path origin {path.origin} no longer holds datum {path.datum}"
        )
    node, cycle = path.origin.node, path.origin.cycle
    for step in path.steps:
        if step.wire is None:
            if step.launch != cycle:
                raise SchedulingError(f"path for datum {path.datum} does not chain")
            state.insert(path.datum, node, cycle + 1)
            cycle += 1
            continue
        wire = state.graph.wire(step.wire)
        if wire.src != node or step.launch != cycle:
            raise SchedulingError(f"path for datum {path.datum} does not chain")
        state.wire_history[wire.name].setdefault(step.launch, set()).add(path.datum)
        landing = step.launch + wire.delay
        stop = _retention_stop(
            state, wire.dst, path.target_node, path.consume_at, path.reused
        )
        state.insert_span(path.datum, wire.dst, landing, stop)
        state.movements.append(
            Movement(path.datum, wire.src, step.launch, wire.dst, landing, wire.name)
        )
        node, cycle = wire.dst, landing
    if (node, cycle) != (path.destination.node, path.destination.cycle):
        raise SchedulingError(
            f"path for datum {path.datum} ends at ({node}, {cycle}), "
            f"declared destination is {path.destination}"
        )
    state.requests.append(path)
    state.touch()
    return state


def route_all(
    state: ScheduleState,
    placements: Iterable[Placement],
    workload: tuple[Operation, ...],
) -> ScheduleState:
    """Route every input of every placed operation, in deterministic order.

    Placements are processed in sequence; within an operation, inputs are
    routed in their listed order (duplicates routed once).  Each datum is
    routed against the reservations of everything before it, then committed.
    """
    placements = list(placements)
    state.placements = list(placements)
    for placement in placements:
        op = workload[placement.operation]
        actor = state.graph.actor(placement.actor)
        target = SpaceTimePoint(actor.input_node, placement.arrival_cycle)
        consume_at = placement.arrival_cycle + actor.op_delay
        for datum in op.distinct_inputs():
            try:
                path = route_datum(
                    state,
                    datum,
                    target,
                    consume_at=consume_at,
                    reused=datum in op.reused,
                )
            except TimingFault as fault:
                raise fault.annotated(placement.operation) from None
            reserve(state, path)
    return state


def reverse_movements(movements: Iterable[Movement], instant: int) -> list[Movement]:
    """Mirror movements in time around `instant`; applying twice is identity."""
    return [
        Movement(
            m.datum,
            m.dst,
            instant - m.end_cycle,
            m.src,
            instant - m.start_cycle,
            m.wire,
        )
        for m in movements
    ]


def route_reduction(
    state: ScheduleState,
    tree: HardwareGraph,
    result: int,
    result_point: SpaceTimePoint,
    leaf_assignments: Mapping[int, str],
) -> list[Movement]:
    """Schedule an accumulation over a reduction network by time reversal.

    A distribution flow is computed on `tree` (wires pointing away from the
    root): the result datum fans out from the root at cycle 0 to every
    assigned leaf at its earliest feasible arrival, sharing trunk transfers.
    Mirroring that flow around result_point.cycle yields the accumulation
    schedule: partials leave the leaves and merge toward the root, arriving
    at result_point on time.
    """
    tree.node(result_point.node)
    horizon = result_point.cycle
    if horizon < 0:
        raise WorkloadError("result cycle must be non-negative")
    scratch = build_state(
        tree, horizon, wait_epsilon=state.wait_epsilon, sizes=state.sizes
    )
    if not scratch.can_insert_span(result, result_point.node, 0, horizon + 1):
        raise WorkloadError(
            f"result datum {result} does not fit at {result_point.node!r}"
        )
    scratch.insert_span(result, result_point.node, 0, horizon + 1)
    scratch.touch()

    for _, leaf in sorted(leaf_assignments.items()):
        tree.node(leaf)
        path = None
        for arrival in range(0, horizon + 1):
            try:
                path = route_datum(scratch, result, SpaceTimePoint(leaf, arrival))
            except TimingFault:
                continue
            break
        if path is None:
            raise TimingFault(result, leaf, horizon, 0)
        reserve(scratch, path)
    return reverse_movements(scratch.movements, horizon)
