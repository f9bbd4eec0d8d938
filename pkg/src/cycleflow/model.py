"""Core domain types, document parsing, and the shared occupancy state.

The hardware is a graph of named nodes (memories and actor ports) joined by
wires (buses with bandwidth, energy cost, and delay).  Everything scheduled
against it lives in a ScheduleState: per-node and per-wire occupancy
histories indexed by cycle, plus the placement and movement records that the
pipeline accumulates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

NODE_KINDS = ("memory", "actor_input", "actor_output")

# Cost of idling in place for one cycle.  Small enough that no number of
# waits within a realistic horizon can outweigh a real wire traversal, large
# enough to make the router prefer fewer waits among equal-wire-cost paths.
WAIT_EPSILON = Fraction(1, 2**20)

# Horizon slack appended after the last operation completes, so produced
# results have room to drain back into memories.
DEFAULT_MARGIN = 32


class SchedulingError(Exception):
    """Base class for every failure this package raises on purpose."""


class HardwareError(SchedulingError):
    """Invalid hardware description (syntax, references, invariants)."""


class WorkloadError(SchedulingError):
    """Invalid workload, seed document, or datum bookkeeping request."""


class CapacityError(SchedulingError):
    """An insertion would overflow a finite node at some cycle."""

    def __init__(self, message: str, node: str | None = None, cycle: int | None = None):
        super().__init__(message)
        self.node = node
        self.cycle = cycle


class PlacementError(SchedulingError):
    """No actor can accept an operation (capability gap or starvation)."""


class TimingFault(SchedulingError):
    """No admissible path delivers a datum at the requested cycle.

    Carries enough context to tell the user which arrival estimate to raise.
    """

    def __init__(
        self,
        datum: int,
        node: str,
        cycle: int,
        frontier: int,
        op_index: int | None = None,
    ):
        self.datum = datum
        self.node = node
        self.cycle = cycle
        self.frontier = frontier
        self.op_index = op_index
        where = f" while routing operation {op_index}" if op_index is not None else ""
        super().__init__(
            f"no admissible path delivers datum {datum} to {node} at cycle "
            f"{cycle}{where}; search frontier reached cycle {frontier} "
            f"(raise the offset or distribution latency)"
        )

    def annotated(self, op_index: int) -> TimingFault:
        return TimingFault(self.datum, self.node, self.cycle, self.frontier, op_index)


class StalePathError(SchedulingError):
    """A path was computed against an older version of the state."""


class ReconstructionError(SchedulingError):
    """A waypoint program does not replay cleanly on the given inputs."""


def parse_cost(value: object) -> Fraction:
    """Read a non-negative rational from JSON (int, float, or "n/d" text)."""
    if isinstance(value, bool):
        raise HardwareError(f"cost must be a number, got {value!r}")
    if isinstance(value, int):
        out = Fraction(value)
    elif isinstance(value, float):
        # Go through the decimal literal so 2.5 means exactly 5/2.
        out = Fraction(str(value))
    elif isinstance(value, str):
        try:
            out = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise HardwareError(f"cannot parse cost {value!r}: {exc}") from None
    else:
        raise HardwareError(f"cost must be a number, got {value!r}")
    if out < 0:
        raise HardwareError(f"cost must be non-negative, got {value!r}")
    return out


def cost_to_json(value: Fraction) -> int | str:
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class NodeSpec:
    """A storage location; capacity None means unbounded."""

    name: str
    kind: str
    capacity: int | None


@dataclass(frozen=True)
class WireSpec:
    """A directed bus between two nodes.

    bandwidth limits the total datum bytes sharing one launch cycle; cost is
    the energy charged per datum traversal; delay is the cycles a traversal
    takes.  Wait wires (idle in place one cycle) exist implicitly for every
    node and are never declared in documents.
    """

    name: str
    src: str
    dst: str
    bandwidth: int
    cost: Fraction
    delay: int
    index: int = 0  # declaration order, the router's final tie-break
    is_wait: bool = False


@dataclass(frozen=True)
class ActorSpec:
    """A compute unit with an input buffer node and an output buffer node."""

    name: str
    input_node: str
    output_node: str
    capabilities: frozenset[str]
    cooldown: int
    op_delay: int
    distribution_latency: int
    buffer_size: int
    lane_count: int
    index: int = 0  # declaration order, the placer's tie-break


@dataclass(frozen=True)
class Operation:
    """One workload step: consume `inputs`, produce `outputs`.

    offset is the earliest coarse clock at which the operation may be
    dispatched; ids in `reused` stay resident in the actor input buffer after
    consumption instead of being freed.
    """

    opcode: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    offset: int = 0
    reused: frozenset[int] = frozenset()

    def distinct_inputs(self) -> tuple[int, ...]:
        seen: list[int] = []
        for d in self.inputs:
            if d not in seen:
                seen.append(d)
        return tuple(seen)


@dataclass(frozen=True)
class Placement:
    """Assignment of one operation to an actor.

    arrival_cycle is when every input must sit in the actor's input node;
    it equals operation.offset + actor.distribution_latency.
    """

    operation: int
    actor: str
    arrival_cycle: int


@dataclass(frozen=True)
class Movement:
    """One physical transfer, the unit row of a schedule."""

    datum: int
    src: str
    start_cycle: int
    dst: str
    end_cycle: int
    wire: str


@dataclass(frozen=True)
class HardwareGraph:
    nodes: tuple[NodeSpec, ...]
    wires: tuple[WireSpec, ...]
    actors: tuple[ActorSpec, ...]

    @cached_property
    def _nodes_by_name(self) -> dict[str, NodeSpec]:
        return {n.name: n for n in self.nodes}

    @cached_property
    def _wires_by_name(self) -> dict[str, WireSpec]:
        return {w.name: w for w in self.wires}

    @cached_property
    def _actors_by_name(self) -> dict[str, ActorSpec]:
        return {a.name: a for a in self.actors}

    @cached_property
    def _wires_into(self) -> dict[str, tuple[WireSpec, ...]]:
        into: dict[str, list[WireSpec]] = {n.name: [] for n in self.nodes}
        for w in self.wires:
            into[w.dst].append(w)
        return {name: tuple(ws) for name, ws in into.items()}

    def node(self, name: str) -> NodeSpec:
        try:
            return self._nodes_by_name[name]
        except KeyError:
            raise HardwareError(f"unknown node {name!r}") from None

    def wire(self, name: str) -> WireSpec:
        try:
            return self._wires_by_name[name]
        except KeyError:
            raise HardwareError(f"unknown wire {name!r}") from None

    def actor(self, name: str) -> ActorSpec:
        try:
            return self._actors_by_name[name]
        except KeyError:
            raise HardwareError(f"unknown actor {name!r}") from None

    def wires_into(self, node: str) -> tuple[WireSpec, ...]:
        return self._wires_into.get(node, ())


def _require(condition: bool, error: type[SchedulingError], message: str) -> None:
    if not condition:
        raise error(message)


def _as_int(value: object, what: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise HardwareError(f"{what} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise HardwareError(f"{what} must be >= {minimum}, got {value}")
    return value


def _load_json(text: str, what: str, error: type[SchedulingError]) -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise error(
            f"{what} syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def validate_graph(graph: HardwareGraph) -> HardwareGraph:
    """Check every structural invariant; returns the graph for chaining."""
    _require(len(graph.nodes) > 0, HardwareError, "graph has no nodes")

    seen: set[str] = set()
    for node in graph.nodes:
        _require(bool(node.name), HardwareError, "node with empty name")
        _require(node.name not in seen, HardwareError, f"duplicate name {node.name!r}")
        seen.add(node.name)
        _require(
            node.kind in NODE_KINDS,
            HardwareError,
            f"node {node.name!r} has unknown kind {node.kind!r}",
        )
        if node.capacity is None:
            _require(
                node.kind == "memory",
                HardwareError,
                f"node {node.name!r}: only memory nodes may be unbounded",
            )
        else:
            _require(
                node.capacity >= 1,
                HardwareError,
                f"node {node.name!r} capacity must be positive",
            )

    names = {n.name for n in graph.nodes}
    for wire in graph.wires:
        _require(bool(wire.name), HardwareError, "wire with empty name")
        _require(wire.name not in seen, HardwareError, f"duplicate name {wire.name!r}")
        seen.add(wire.name)
        for endpoint in (wire.src, wire.dst):
            _require(
                endpoint in names,
                HardwareError,
                f"wire {wire.name!r} references unknown node {endpoint!r}",
            )
        _require(
            not wire.is_wait,
            HardwareError,
            f"wire {wire.name!r}: wait wires are implicit and never declared",
        )
        _require(
            wire.src != wire.dst,
            HardwareError,
            f"wire {wire.name!r}: explicit wires never self-loop",
        )
        _require(wire.delay >= 1, HardwareError, f"wire {wire.name!r} delay < 1")
        _require(
            wire.bandwidth >= 1,
            HardwareError,
            f"wire {wire.name!r} bandwidth must be positive",
        )
        _require(wire.cost >= 0, HardwareError, f"wire {wire.name!r} cost is negative")

    for actor in graph.actors:
        _require(bool(actor.name), HardwareError, "actor with empty name")
        _require(actor.name not in seen, HardwareError, f"duplicate name {actor.name!r}")
        seen.add(actor.name)
        for port, kind in ((actor.input_node, "actor_input"), (actor.output_node, "actor_output")):
            _require(
                port in names,
                HardwareError,
                f"actor {actor.name!r} references unknown node {port!r}",
            )
            _require(
                graph.node(port).kind == kind,
                HardwareError,
                f"actor {actor.name!r}: node {port!r} must have kind {kind}",
            )
        _require(actor.cooldown >= 0, HardwareError, f"actor {actor.name!r} cooldown < 0")
        _require(actor.op_delay >= 1, HardwareError, f"actor {actor.name!r} op_delay < 1")
        _require(
            actor.distribution_latency >= 0,
            HardwareError,
            f"actor {actor.name!r} distribution_latency < 0",
        )
        _require(actor.lane_count >= 1, HardwareError, f"actor {actor.name!r} lane_count < 1")
        # One lane holds one operand pair of unit datums.
        _require(
            actor.lane_count * 2 <= actor.buffer_size,
            HardwareError,
            f"actor {actor.name!r}: {actor.lane_count} lanes need "
            f"{actor.lane_count * 2} buffer bytes, has {actor.buffer_size}",
        )

    _check_connected(graph)
    return graph


def _check_connected(graph: HardwareGraph) -> None:
    # Undirected reachability over explicit wires; implicit wait wires only
    # ever join a node to itself, so they cannot bridge components.
    if len(graph.nodes) <= 1:
        return
    adjacency: dict[str, set[str]] = {n.name: set() for n in graph.nodes}
    for w in graph.wires:
        adjacency[w.src].add(w.dst)
        adjacency[w.dst].add(w.src)
    start = graph.nodes[0].name
    seen = {start}
    frontier = [start]
    while frontier:
        here = frontier.pop()
        for there in adjacency[here]:
            if there not in seen:
                seen.add(there)
                frontier.append(there)
    missing = [n.name for n in graph.nodes if n.name not in seen]
    _require(
        not missing,
        HardwareError,
        "graph is not connected; unreachable from "
        f"{start!r}: {', '.join(missing)}",
    )


def parse_hardware(text: str) -> HardwareGraph:
    """Parse and validate a hardware description document.

    The document is a JSON object with keys "nodes", "wires", "actors".
    Node capacity may be the string "unbounded" for memory nodes.
    """
    doc = _load_json(text, "hardware document", HardwareError)
    if not isinstance(doc, dict):
        raise HardwareError("hardware document must be a JSON object")
    unknown = set(doc) - {"nodes", "wires", "actors"}
    _require(not unknown, HardwareError, f"unknown hardware keys: {sorted(unknown)}")

    nodes = []
    for i, raw in enumerate(doc.get("nodes", [])):
        if not isinstance(raw, dict):
            raise HardwareError(f"node {i} must be an object")
        capacity = raw.get("capacity")
        if capacity == "unbounded":
            cap: int | None = None
        else:
            cap = _as_int(capacity, f"node {i} capacity")
        nodes.append(
            NodeSpec(
                name=str(raw.get("name", "")),
                kind=str(raw.get("kind", "")),
                capacity=cap,
            )
        )

    wires = []
    for i, raw in enumerate(doc.get("wires", [])):
        if not isinstance(raw, dict):
            raise HardwareError(f"wire {i} must be an object")
        wires.append(
            WireSpec(
                name=str(raw.get("name", "")),
                src=str(raw.get("src", "")),
                dst=str(raw.get("dst", "")),
                bandwidth=_as_int(raw.get("bandwidth"), f"wire {i} bandwidth"),
                cost=parse_cost(raw.get("cost")),
                delay=_as_int(raw.get("delay"), f"wire {i} delay"),
                index=i,
            )
        )

    actors = []
    for i, raw in enumerate(doc.get("actors", [])):
        if not isinstance(raw, dict):
            raise HardwareError(f"actor {i} must be an object")
        capabilities = raw.get("capabilities", [])
        if not isinstance(capabilities, list) or not all(
            isinstance(c, str) and c for c in capabilities
        ):
            raise HardwareError(f"actor {i} capabilities must be a list of opcode strings")
        actors.append(
            ActorSpec(
                name=str(raw.get("name", "")),
                input_node=str(raw.get("input_node", "")),
                output_node=str(raw.get("output_node", "")),
                capabilities=frozenset(capabilities),
                cooldown=_as_int(raw.get("cooldown"), f"actor {i} cooldown"),
                op_delay=_as_int(raw.get("op_delay"), f"actor {i} op_delay"),
                distribution_latency=_as_int(
                    raw.get("distribution_latency"), f"actor {i} distribution_latency"
                ),
                buffer_size=_as_int(raw.get("buffer_size"), f"actor {i} buffer_size"),
                lane_count=_as_int(raw.get("lane_count"), f"actor {i} lane_count"),
                index=i,
            )
        )

    return validate_graph(HardwareGraph(tuple(nodes), tuple(wires), tuple(actors)))


def serialize_hardware(graph: HardwareGraph) -> str:
    """Inverse of parse_hardware on validated graphs."""
    doc = {
        "nodes": [
            {
                "name": n.name,
                "capacity": "unbounded" if n.capacity is None else n.capacity,
                "kind": n.kind,
            }
            for n in graph.nodes
        ],
        "wires": [
            {
                "name": w.name,
                "src": w.src,
                "dst": w.dst,
                "bandwidth": w.bandwidth,
                "cost": cost_to_json(w.cost),
                "delay": w.delay,
            }
            for w in graph.wires
        ],
        "actors": [
            {
                "name": a.name,
                "input_node": a.input_node,
                "output_node": a.output_node,
                "capabilities": sorted(a.capabilities),
                "cooldown": a.cooldown,
                "op_delay": a.op_delay,
                "distribution_latency": a.distribution_latency,
                "buffer_size": a.buffer_size,
                "lane_count": a.lane_count,
            }
            for a in graph.actors
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def remove_wire(graph: HardwareGraph, wire_name: str) -> HardwareGraph:
    """Return a copy of the graph without the named wire; original untouched."""
    graph.wire(wire_name)  # raises on unknown names
    kept = tuple(w for w in graph.wires if w.name != wire_name)
    return HardwareGraph(graph.nodes, kept, graph.actors)


def parse_workload(text: str) -> tuple[Operation, ...]:
    """Parse a workload document: a JSON list of operations, order preserved.

    The placer is order-sensitive, so the returned tuple follows document
    order exactly.
    """
    doc = _load_json(text, "workload document", WorkloadError)
    if not isinstance(doc, list):
        raise WorkloadError("workload document must be a JSON list")

    ops: list[Operation] = []
    produced: set[int] = set()
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise WorkloadError(f"operation {i} must be an object")
        opcode = raw.get("opcode")
        if not isinstance(opcode, str) or not opcode:
            raise WorkloadError(f"operation {i} has a malformed opcode: {opcode!r}")
        inputs = _datum_list(raw.get("inputs", []), f"operation {i} inputs")
        outputs = _datum_list(raw.get("outputs", []), f"operation {i} outputs")
        offset = raw.get("offset", 0)
        if isinstance(offset, bool) or not isinstance(offset, int) or offset < 0:
            raise WorkloadError(f"operation {i} offset must be a non-negative integer")
        reused = frozenset(_datum_list(raw.get("reused", []), f"operation {i} reused"))

        overlap = set(inputs) & set(outputs)
        if overlap:
            raise WorkloadError(
                f"operation {i}: outputs must be disjoint from inputs, both "
                f"contain {sorted(overlap)}"
            )
        if opcode == "dot" and len(inputs) % 2 != 0:
            raise WorkloadError(
                f"operation {i}: dot takes multiplicand pairs, got "
                f"{len(inputs)} inputs"
            )
        clash = produced & set(outputs)
        if clash:
            raise WorkloadError(
                f"operation {i}: datum {sorted(clash)} already produced by an "
                f"earlier operation"
            )
        produced |= set(outputs)
        ops.append(Operation(opcode, inputs, outputs, offset, reused))
    return tuple(ops)


def _datum_list(value: object, what: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise WorkloadError(f"{what} must be a list of datum ids")
    out = []
    for d in value:
        if isinstance(d, bool) or not isinstance(d, int) or d < 0:
            raise WorkloadError(f"{what}: datum ids are non-negative integers, got {d!r}")
        out.append(d)
    return tuple(out)


def serialize_workload(ops: Iterable[Operation]) -> str:
    doc = [
        {
            "opcode": op.opcode,
            "inputs": list(op.inputs),
            "outputs": list(op.outputs),
            "offset": op.offset,
            "reused": sorted(op.reused),
        }
        for op in ops
    ]
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class Seed:
    """Initial presence of datums in a memory node from a given cycle on."""

    node: str
    cycle: int
    data: tuple[int, ...]


def parse_seeds(text: str) -> tuple[Seed, ...]:
    doc = _load_json(text, "seed document", WorkloadError)
    if not isinstance(doc, list):
        raise WorkloadError("seed document must be a JSON list")
    seeds = []
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise WorkloadError(f"seed {i} must be an object")
        cycle = raw.get("cycle", 0)
        if isinstance(cycle, bool) or not isinstance(cycle, int) or cycle < 0:
            raise WorkloadError(f"seed {i} cycle must be a non-negative integer")
        seeds.append(
            Seed(
                node=str(raw.get("node", "")),
                cycle=cycle,
                data=_datum_list(raw.get("data", []), f"seed {i} data"),
            )
        )
    return tuple(seeds)


def serialize_seeds(seeds: Iterable[Seed]) -> str:
    doc = [{"node": s.node, "cycle": s.cycle, "data": list(s.data)} for s in seeds]
    return json.dumps(doc, indent=2) + "\n"


@dataclass
class ScheduleState:
    """Mutable occupancy record shared by the placer, router, and reports.

    node_history maps node name -> cycle -> set of datum ids present there;
    wire_history maps wire name -> launch cycle -> set of datum ids sharing
    that launch.  Histories are bounded by the horizon (inclusive last
    cycle).  version increments on every mutation so routed paths can be
    rejected once stale.
    """

    graph: HardwareGraph
    horizon: int
    wait_epsilon: Fraction = WAIT_EPSILON
    sizes: dict[int, int] = field(default_factory=dict)
    node_history: dict[str, dict[int, set[int]]] = field(default_factory=dict)
    wire_history: dict[str, dict[int, set[int]]] = field(default_factory=dict)
    placements: list[Placement] = field(default_factory=list)
    movements: list[Movement] = field(default_factory=list)
    requests: list = field(default_factory=list)  # Path records, set by the router
    version: int = 0

    def __post_init__(self) -> None:
        if not self.node_history:
            self.node_history = {n.name: {} for n in self.graph.nodes}
        if not self.wire_history:
            self.wire_history = {w.name: {} for w in self.graph.wires}

    def size_of(self, datum: int) -> int:
        return self.sizes.get(datum, 1)

    def present(self, datum: int, node: str, cycle: int) -> bool:
        return datum in self.node_history[node].get(cycle, ())

    def node_load(self, node: str, cycle: int) -> int:
        return sum(self.size_of(d) for d in self.node_history[node].get(cycle, ()))

    def can_insert(self, datum: int, node: str, cycle: int) -> bool:
        """Capacity test for one cycle; re-inserting a present datum is free."""
        if cycle < 0 or cycle > self.horizon:
            return False
        if self.present(datum, node, cycle):
            return True
        capacity = self.graph.node(node).capacity
        if capacity is None:
            return True
        return self.node_load(node, cycle) + self.size_of(datum) <= capacity

    def can_insert_span(self, datum: int, node: str, start: int, stop: int) -> bool:
        stop = min(stop, self.horizon + 1)
        return all(self.can_insert(datum, node, t) for t in range(start, stop))

    def insert(self, datum: int, node: str, cycle: int) -> None:
        self.node_history[node].setdefault(cycle, set()).add(datum)

    def insert_span(self, datum: int, node: str, start: int, stop: int) -> None:
        for t in range(start, min(stop, self.horizon + 1)):
            self.insert(datum, node, t)

    def wire_load(self, wire: str, launch: int) -> int:
        return sum(self.size_of(d) for d in self.wire_history[wire].get(launch, ()))

    def wire_can_carry(self, datum: int, wire_name: str, launch: int) -> bool:
        """Bandwidth test at one launch cycle; same-datum re-use is free."""
        if launch < 0 or launch > self.horizon:
            return False
        carried = self.wire_history[wire_name].get(launch, ())
        if datum in carried:
            return True
        wire = self.graph.wire(wire_name)
        return self.wire_load(wire_name, launch) + self.size_of(datum) <= wire.bandwidth

    def touch(self) -> None:
        self.version += 1

    def audit(self) -> None:
        """Re-check every recorded cycle against the structural invariants.

        Raises on the first violated capacity, bandwidth, or movement record.
        """
        for node_name, history in self.node_history.items():
            capacity = self.graph.node(node_name).capacity
            if capacity is None:
                continue
            for cycle, datums in history.items():
                load = sum(self.size_of(d) for d in datums)
                if load > capacity:
                    raise CapacityError(
                        f"node {node_name!r} holds {load} bytes at cycle {cycle}, "
                        f"capacity {capacity}",
                        node=node_name,
                        cycle=cycle,
                    )
        for wire_name, history in self.wire_history.items():
            bandwidth = self.graph.wire(wire_name).bandwidth
            for launch, datums in history.items():
                load = sum(self.size_of(d) for d in datums)
                if load > bandwidth:
                    raise CapacityError(
                        f"wire {wire_name!r} carries {load} bytes at launch "
                        f"{launch}, bandwidth {bandwidth}",
                        node=wire_name,
                        cycle=launch,
                    )
        for m in self.movements:
            wire = self.graph.wire(m.wire)
            if (wire.src, wire.dst) != (m.src, m.dst):
                raise HardwareError(
                    f"movement {m} disagrees with wire {wire.name!r} endpoints"
                )
            if m.end_cycle - m.start_cycle != wire.delay:
                raise HardwareError(
                    f"movement {m} spans {m.end_cycle - m.start_cycle} cycles, "
                    f"wire delay is {wire.delay}"
                )
            if m.datum not in self.wire_history[m.wire].get(m.start_cycle, ()):
                raise HardwareError(f"movement {m} missing from wire history")
            if not self.present(m.datum, m.src, m.start_cycle):
                raise HardwareError(f"movement {m} departs a node not holding it")
            if not self.present(m.datum, m.dst, m.end_cycle):
                raise HardwareError(f"movement {m} lands at a node not holding it")


def build_state(
    graph: HardwareGraph,
    horizon: int,
    wait_epsilon: Fraction = WAIT_EPSILON,
    sizes: Mapping[int, int] | None = None,
) -> ScheduleState:
    if horizon < 0:
        raise WorkloadError(f"horizon must be non-negative, got {horizon}")
    return ScheduleState(
        graph=graph,
        horizon=horizon,
        wait_epsilon=wait_epsilon,
        sizes=dict(sizes or {}),
    )


def seed_memory(
    state: ScheduleState, node: str, data: Iterable[int], cycle: int
) -> ScheduleState:
    """Declare datums resident in a memory node from `cycle` to the horizon."""
    spec = state.graph.node(node)
    if spec.kind != "memory":
        raise WorkloadError(
            f"seeding requires a memory node; {node!r} has kind {spec.kind}"
        )
    if cycle < 0 or cycle > state.horizon:
        raise WorkloadError(
            f"seed cycle {cycle} outside the horizon [0, {state.horizon}]"
        )
    for datum in data:
        if not state.can_insert_span(datum, node, cycle, state.horizon + 1):
            raise CapacityError(
                f"seeding datum {datum} overflows {node!r} at cycle {cycle}",
                node=node,
                cycle=cycle,
            )
        state.insert_span(datum, node, cycle, state.horizon + 1)
    state.touch()
    return state


def apply_seeds(state: ScheduleState, seeds: Iterable[Seed]) -> ScheduleState:
    for seed in seeds:
        seed_memory(state, seed.node, seed.data, seed.cycle)
    return state


def register_outputs(
    state: ScheduleState,
    placements: Iterable[Placement],
    workload: tuple[Operation, ...],
) -> ScheduleState:
    """Record where and when every operation result will come into existence.

    Each output datum appears in the chosen actor's output node from
    arrival_cycle + op_delay onward, so later operations can route from it.
    """
    for placement in placements:
        op = workload[placement.operation]
        actor = state.graph.actor(placement.actor)
        born = placement.arrival_cycle + actor.op_delay
        if born > state.horizon:
            raise WorkloadError(
                f"operation {placement.operation} completes at cycle {born}, "
                f"beyond the horizon {state.horizon}"
            )
        for datum in op.outputs:
            if not state.can_insert_span(datum, actor.output_node, born, state.horizon + 1):
                raise CapacityError(
                    f"output datum {datum} overflows {actor.output_node!r}",
                    node=actor.output_node,
                    cycle=born,
                )
            state.insert_span(datum, actor.output_node, born, state.horizon + 1)
    state.touch()
    return state


def default_horizon(
    placements: Iterable[Placement],
    graph: HardwareGraph,
    margin: int = DEFAULT_MARGIN,
) -> int:
    """Last completion cycle plus a drain margin; just the margin if empty."""
    last = 0
    for placement in placements:
        actor = graph.actor(placement.actor)
        last = max(last, placement.arrival_cycle + actor.op_delay)
    return last + margin
