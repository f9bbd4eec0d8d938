"""Discrete-event replay of a schedule, independent of the router's records.

A central controller issues one control packet per movement ahead of time;
the packet's TTL is the absolute cycle at which the transfer must fire.  The
simulator advances cycle by cycle with its own occupancy bookkeeping (it
shares nothing with ScheduleState) and reports violations as data: a clean
report certifies that the schedule is physically executable with every
operand in place before its operation starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import (
    HardwareGraph,
    Movement,
    Operation,
    Placement,
    Seed,
)

VIOLATION_KINDS = ("bandwidth", "capacity", "missing_datum", "late_packet")


@dataclass(frozen=True)
class ControlPacket:
    """Instruction to one node to fire a transfer at an exact cycle.

    ttl is the absolute consume-at cycle (the movement's start); the packet
    must be issued control_latency cycles earlier to arrive in time.
    """

    movement: Movement
    issue_cycle: int
    ttl: int
    target: str


@dataclass(frozen=True)
class Violation:
    kind: str
    cycle: int
    subject: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "cycle": self.cycle, "subject": self.subject}


@dataclass
class SimReport:
    violations: list[Violation] = field(default_factory=list)
    controller_peak_queue: int = 0
    completed_ops: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "violations": [v.as_dict() for v in self.violations],
            "controller_peak_queue": self.controller_peak_queue,
            "completed_ops": self.completed_ops,
        }


def emit_control_packets(
    movements: Iterable[Movement], control_latency: int, slack: int = 0
) -> list[ControlPacket]:
    """One packet per movement, issued control_latency (+slack) cycles early.

    Packets are ordered by issue cycle; a negative issue cycle means the
    controller cannot ship the packet in time (flagged late by simulate).
    """
    packets = [
        ControlPacket(
            movement=m,
            issue_cycle=m.start_cycle - control_latency - slack,
            ttl=m.start_cycle,
            target=m.src,
        )
        for m in movements
    ]
    packets.sort(key=lambda p: p.issue_cycle)
    return packets


def peak_queue(packets: Sequence[ControlPacket]) -> int:
    """Largest number of packets sharing one issue cycle."""
    counts: dict[int, int] = {}
    for p in packets:
        counts[p.issue_cycle] = counts.get(p.issue_cycle, 0) + 1
    return max(counts.values(), default=0)


def simulate(
    graph: HardwareGraph,
    packets: Sequence[ControlPacket],
    placements: Sequence[Placement],
    workload: tuple[Operation, ...],
    seeds: Iterable[Seed],
    sizes: Mapping[int, int] | None = None,
) -> SimReport:
    """Replay packets cycle by cycle and audit every resource each cycle.

    Within a cycle: scheduled consumptions free actor inputs, seed and
    transfer arrivals land, operation completions register outputs, then
    packets fire (a datum landing this cycle may launch onward this cycle),
    arrival checks run, and bandwidth plus capacity audits close the cycle.
    """
    sizes = dict(sizes or {})

    def size_of(datum: int) -> int:
        return sizes.get(datum, 1)

    report = SimReport()
    occupancy: dict[str, set[int]] = {n.name: set() for n in graph.nodes}

    seed_events: dict[int, list[Seed]] = {}
    for seed in seeds:
        graph.node(seed.node)
        seed_events.setdefault(seed.cycle, []).append(seed)

    fire_events: dict[int, list[ControlPacket]] = {}
    end = 0
    for packet in packets:
        if packet.issue_cycle < 0:
            report.violations.append(
                Violation(
                    "late_packet",
                    packet.issue_cycle,
                    f"packet for datum {packet.movement.datum} on wire "
                    f"{packet.movement.wire!r} cannot be issued in time",
                )
            )
        if packet.ttl >= 0:
            fire_events.setdefault(packet.ttl, []).append(packet)
        end = max(end, packet.ttl + graph.wire(packet.movement.wire).delay)

    consume_events: dict[int, list[tuple[str, int]]] = {}
    output_events: dict[int, list[tuple[str, int]]] = {}
    check_events: dict[int, list[Placement]] = {}
    for placement in placements:
        op = workload[placement.operation]
        actor = graph.actor(placement.actor)
        done = placement.arrival_cycle + actor.op_delay
        check_events.setdefault(placement.arrival_cycle, []).append(placement)
        for datum in op.distinct_inputs():
            if datum not in op.reused:
                consume_events.setdefault(done, []).append((actor.input_node, datum))
        for datum in op.outputs:
            output_events.setdefault(done, []).append((actor.output_node, datum))
        end = max(end, done)
    if seed_events:
        end = max(end, max(seed_events))

    arrivals: dict[int, list[tuple[int, str]]] = {}
    for cycle in range(0, end + 1):
        for node, datum in consume_events.get(cycle, ()):
            occupancy[node].discard(datum)

        for seed in seed_events.get(cycle, ()):
            for datum in seed.data:
                occupancy[seed.node].add(datum)

        for datum, node in arrivals.get(cycle, ()):
            occupancy[node].add(datum)

        for node, datum in output_events.get(cycle, ()):
            occupancy[node].add(datum)

        launches: dict[str, set[int]] = {}
        for packet in fire_events.get(cycle, ()):
            m = packet.movement
            if m.datum not in occupancy[m.src]:
                report.violations.append(
                    Violation(
                        "missing_datum",
                        cycle,
                        f"{m.src}: datum {m.datum} absent when wire {m.wire!r} fires",
                    )
                )
                continue
            launches.setdefault(m.wire, set()).add(m.datum)
            arrivals.setdefault(cycle + graph.wire(m.wire).delay, []).append(
                (m.datum, m.dst)
            )

        for placement in check_events.get(cycle, ()):
            op = workload[placement.operation]
            actor = graph.actor(placement.actor)
            missing = [
                d for d in op.distinct_inputs() if d not in occupancy[actor.input_node]
            ]
            for datum in missing:
                report.violations.append(
                    Violation(
                        "missing_datum",
                        cycle,
                        f"{actor.input_node}: datum {datum} not delivered for "
                        f"operation {placement.operation}",
                    )
                )
            if not missing:
                report.completed_ops += 1

        for wire_name, datums in launches.items():
            load = sum(size_of(d) for d in datums)
            if load > graph.wire(wire_name).bandwidth:
                report.violations.append(
                    Violation(
                        "bandwidth",
                        cycle,
                        f"wire {wire_name!r} carries {load} bytes, bandwidth "
                        f"{graph.wire(wire_name).bandwidth}",
                    )
                )

        for node in graph.nodes:
            if node.capacity is None:
                continue
            load = sum(size_of(d) for d in occupancy[node.name])
            if load > node.capacity:
                report.violations.append(
                    Violation(
                        "capacity",
                        cycle,
                        f"node {node.name!r} holds {load} bytes, capacity "
                        f"{node.capacity}",
                    )
                )

    report.controller_peak_queue = peak_queue(packets)
    return report
