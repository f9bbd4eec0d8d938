"""Operation-to-actor assignment: first best fit with an affinity score.

The placer walks the workload in order against a coarse virtual clock that
is independent of the router's cycle grid.  For every operation it takes the
available actor that already caches the most of the operation's inputs,
breaking ties toward the earliest-declared actor, and derives the cycle at
which the inputs must arrive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import ActorSpec, HardwareGraph, Operation, Placement, PlacementError

DEFAULT_STARVATION_BOUND = 10**6


@dataclass
class ActorRuntimeState:
    """Per-actor bookkeeping the placer maintains while walking the workload.

    Lanes fill as operations land on the actor within one clock tick; a tick
    later the actor has launched that batch and its lanes are free again.
    Filling the last lane marks the actor busy for its cooldown.
    """

    name: str
    lane_count: int
    busy_until: int = 0
    free_lanes: int = 0
    batch_clock: int = -1  # clock at which the currently filling batch opened
    cached: set[int] = field(default_factory=set)

    def lanes_available(self, clock: int) -> int:
        if clock > self.batch_clock:
            return self.lane_count
        return self.free_lanes


def affinity(actor_state: ActorRuntimeState, op: Operation) -> int:
    """How many of the operation's distinct inputs the actor already caches."""
    return len(set(op.inputs) & actor_state.cached)


def lanes_required(op: Operation) -> int:
    # A dot product occupies one lane per multiplicand pair; every other
    # opcode takes a single lane.
    if op.opcode == "dot":
        return max(1, len(op.inputs) // 2)
    return 1


def filtered_placing(
    ops: tuple[Operation, ...],
    actors: tuple[ActorSpec, ...],
    graph: HardwareGraph,
    starvation_bound: int = DEFAULT_STARVATION_BOUND,
) -> list[Placement]:
    """Place each operation on a capable actor, in workload order.

    Candidates for an operation are the actors whose capabilities contain its
    opcode, that are past their cooldown, and that have enough free lanes.
    Among candidates the highest affinity wins; ties go to the lowest
    declaration index.  When no candidate exists the clock advances one cycle
    and the search repeats, up to starvation_bound cycles.

    The arrival cycle of a placement is always offset + distribution_latency
    of the chosen actor, regardless of how long the operation waited for one.
    """
    runtime = [ActorRuntimeState(a.name, a.lane_count) for a in actors]
    placements: list[Placement] = []
    clock = 0
    for index, op in enumerate(ops):
        candidates = [
            (state, spec)
            for state, spec in zip(runtime, actors)
            if op.opcode in spec.capabilities
        ]
        if not candidates:
            raise PlacementError(f"no actor can perform opcode {op.opcode!r}")
        lanes = lanes_required(op)
        if all(spec.lane_count < lanes for _, spec in candidates):
            raise PlacementError(
                f"operation {index} needs {lanes} lanes, no capable actor has "
                f"that many"
            )

        clock = max(clock, op.offset)
        waited = 0
        while True:
            ready = [
                (state, spec)
                for state, spec in candidates
                if state.busy_until <= clock and state.lanes_available(clock) >= lanes
            ]
            if ready:
                break
            clock += 1
            waited += 1
            if waited > starvation_bound:
                raise PlacementError(
                    f"placing stalled: operation {index} (opcode {op.opcode!r}) "
                    f"found no available actor within {starvation_bound} cycles "
                    f"(clock reached {clock}); raise lane counts or cooldowns"
                )

        state, spec = max(ready, key=lambda pair: (affinity(pair[0], op), -pair[1].index))
        if clock > state.batch_clock:
            state.free_lanes = state.lane_count
            state.batch_clock = clock
        state.free_lanes -= lanes
        if state.free_lanes == 0:
            state.busy_until = clock + spec.cooldown
        state.cached |= set(op.inputs)
        placements.append(
            Placement(index, spec.name, op.offset + spec.distribution_latency)
        )
    return placements


def first_best_fit(
    ops: tuple[Operation, ...],
    actors: tuple[ActorSpec, ...],
    graph: HardwareGraph,
    starvation_bound: int = DEFAULT_STARVATION_BOUND,
) -> list[Placement]:
    """First best fit over a homogeneous actor pool.

    Identical to filtered_placing; the capability filter degenerates to the
    identity when every actor can perform every opcode.
    """
    return filtered_placing(ops, actors, graph, starvation_bound)
