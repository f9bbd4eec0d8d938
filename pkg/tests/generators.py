"""Seeded random instance generators shared by the property tests."""

from __future__ import annotations

import json
import random

from cycleflow.model import build_state, parse_hardware, seed_memory
from cycleflow.routing import SpaceTimePoint

COSTS = [1, 2, 3, 5, "5/2"]


def random_route_state(rng: random.Random):
    """A small reserved state plus one routing request against it.

    Returns (state, datum, target, consume_at, reused).  The graph has at
    most 6 nodes and 8 wires; up to 3 foreign datums are already holding
    space so the request must route around them.
    """
    n = rng.randint(3, 6)
    names = [f"n{i}" for i in range(n)]
    nodes = []
    for i, name in enumerate(names):
        kind = "memory"
        if i == n - 1 and rng.random() < 0.5:
            kind = "actor_input"
        capacity = rng.choice([2, 3, 4, 4, "unbounded" if kind == "memory" else 4])
        nodes.append({"name": name, "kind": kind, "capacity": capacity})

    wires = []
    for i in range(n - 1):  # spanning chain keeps the graph connected
        wires.append((names[i], names[i + 1]))
    while len(wires) < min(8, n - 1 + rng.randint(0, 4)):
        src, dst = rng.sample(names, 2)
        wires.append((src, dst))
    wire_docs = [
        {
            "name": f"w{i}",
            "src": src,
            "dst": dst,
            "bandwidth": rng.randint(1, 2),
            "cost": rng.choice(COSTS),
            "delay": rng.randint(1, 3),
        }
        for i, (src, dst) in enumerate(wires)
    ]
    doc = {"nodes": nodes, "wires": wire_docs, "actors": []}
    graph = parse_hardware(json.dumps(doc))

    horizon = rng.randint(6, 10)
    state = build_state(graph, horizon)
    seed_memory(state, names[0], [0], rng.randint(0, 2))

    for foreign in range(1, rng.randint(1, 4)):
        node = rng.choice(names)
        start = rng.randint(0, horizon)
        if state.can_insert_span(foreign, node, start, horizon + 1):
            state.insert_span(foreign, node, start, horizon + 1)
        wire = rng.choice(wire_docs)["name"]
        launch = rng.randint(0, horizon)
        if state.wire_can_carry(foreign, wire, launch):
            state.wire_history[wire].setdefault(launch, set()).add(foreign)
    state.touch()

    target = SpaceTimePoint(rng.choice(names[1:]), rng.randint(2, horizon))
    consume_at = None
    if rng.random() < 0.7:
        consume_at = target.cycle + rng.randint(1, 2)
    reused = rng.random() < 0.2
    return state, 0, target, consume_at, reused


def random_pipeline_docs(rng: random.Random) -> tuple[str, str, str]:
    """Random but mostly-feasible (hardware, workload, seeds) documents."""
    actor_count = rng.randint(1, 2)
    opcode_pool = ["dot", "mul", "add"]
    nodes = [
        {"name": "DRAM", "kind": "memory", "capacity": rng.choice(["unbounded", 64])},
        {"name": "SRAM", "kind": "memory", "capacity": rng.randint(6, 10)},
    ]
    wires = [
        {
            "name": "dram_sram",
            "src": "DRAM",
            "dst": "SRAM",
            "bandwidth": rng.randint(2, 4),
            "cost": rng.choice(COSTS),
            "delay": rng.randint(1, 2),
        }
    ]
    actors = []
    capability_union: set[str] = set()
    for i in range(actor_count):
        caps = rng.sample(opcode_pool, rng.randint(1, 3))
        capability_union |= set(caps)
        nodes.append({"name": f"A{i}_in", "kind": "actor_input", "capacity": 4})
        nodes.append({"name": f"A{i}_out", "kind": "actor_output", "capacity": 4})
        wires.append(
            {
                "name": f"sram_a{i}",
                "src": "SRAM",
                "dst": f"A{i}_in",
                "bandwidth": rng.randint(1, 2),
                "cost": rng.choice(COSTS),
                "delay": rng.randint(1, 2),
            }
        )
        wires.append(
            {
                "name": f"a{i}_sram",
                "src": f"A{i}_out",
                "dst": "SRAM",
                "bandwidth": 1,
                "cost": rng.choice(COSTS),
                "delay": 1,
            }
        )
        actors.append(
            {
                "name": f"A{i}",
                "input_node": f"A{i}_in",
                "output_node": f"A{i}_out",
                "capabilities": caps,
                "cooldown": rng.randint(0, 2),
                "op_delay": rng.randint(1, 2),
                "distribution_latency": rng.randint(8, 12),
                "buffer_size": 4,
                "lane_count": rng.randint(1, 2),
            }
        )
    hardware = json.dumps({"nodes": nodes, "wires": wires, "actors": actors}, indent=1)

    pool = list(range(10))
    ops = []
    offset = 0
    produced: list[int] = []
    next_out = 100
    for i in range(rng.randint(1, 4)):
        opcode = rng.choice(sorted(capability_union))
        width = 2 if opcode == "dot" else rng.randint(1, 3)
        inputs = rng.sample(pool, width)
        if produced and rng.random() < 0.4:
            # consume an earlier result; spacing below keeps it routable
            inputs[0] = rng.choice(produced)
            offset += 14
        outputs = [next_out]
        produced.append(next_out)
        next_out += 1
        ops.append(
            {"opcode": opcode, "inputs": inputs, "outputs": outputs, "offset": offset}
        )
        offset += rng.randint(0, 6)
    workload = json.dumps(ops, indent=1)

    seeds = json.dumps([{"node": "DRAM", "cycle": 0, "data": pool}])
    return hardware, workload, seeds


def star_hardware(pe_count: int) -> tuple[str, str, str]:
    """A hub fanning out to pe_count identical single-lane actors.

    One dot per actor at offset 0 forces one batch of simultaneous
    deliveries, so controller pressure scales with the fan-out.
    """
    nodes = [{"name": "HUB", "kind": "memory", "capacity": "unbounded"}]
    wires = []
    actors = []
    ops = []
    for i in range(pe_count):
        nodes.append({"name": f"P{i}_in", "kind": "actor_input", "capacity": 4})
        nodes.append({"name": f"P{i}_out", "kind": "actor_output", "capacity": 4})
        wires.append(
            {
                "name": f"hub_p{i}",
                "src": "HUB",
                "dst": f"P{i}_in",
                "bandwidth": 2,
                "cost": 1,
                "delay": 1,
            }
        )
        wires.append(
            {
                "name": f"p{i}_hub",
                "src": f"P{i}_out",
                "dst": "HUB",
                "bandwidth": 1,
                "cost": 1,
                "delay": 1,
            }
        )
        actors.append(
            {
                "name": f"P{i}",
                "input_node": f"P{i}_in",
                "output_node": f"P{i}_out",
                "capabilities": ["dot"],
                "cooldown": 1,
                "op_delay": 1,
                "distribution_latency": 4,
                "buffer_size": 4,
                "lane_count": 1,
            }
        )
        ops.append(
            {
                "opcode": "dot",
                "inputs": [2 * i, 2 * i + 1],
                "outputs": [100 + i],
                "offset": 0,
            }
        )
    hardware = json.dumps({"nodes": nodes, "wires": wires, "actors": actors})
    workload = json.dumps(ops)
    seeds = json.dumps(
        [{"node": "HUB", "cycle": 0, "data": list(range(2 * pe_count))}]
    )
    return hardware, workload, seeds
