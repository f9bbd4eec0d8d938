"""Routing: exact-cycle delivery, reservations, tie-breaking, reversal."""

from __future__ import annotations

from fractions import Fraction

import pytest

from cycleflow.model import (
    Movement,
    StalePathError,
    TimingFault,
    WorkloadError,
    build_state,
    parse_hardware,
    seed_memory,
)
from cycleflow.routing import (
    SpaceTimePoint,
    locate_datum,
    reserve,
    reverse_movements,
    route_between,
    route_datum,
    route_reduction,
)

from conftest import fixture_text

EPSILON = Fraction(1, 2**20)


@pytest.fixture
def chain():
    graph = parse_hardware(fixture_text("tiny_chain.json"))
    state = build_state(graph, 10)
    seed_memory(state, "SRAM", [0], 0)
    return state


def test_exact_arrival_and_cost(chain):
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    # two hops of cost 2, and the slack spent waiting at the source
    assert path.cost == 4 + 3 * EPSILON
    assert path.destination == SpaceTimePoint("PE_in", 5)
    reserve(chain, path)
    assert chain.movements[-1].end_cycle == 5
    chain.audit()


def test_waits_linger_at_source(chain):
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    # among equal-cost paths the launches are as late as possible, so every
    # wait step precedes the first wire step
    wire_seen = False
    for step in path.steps:
        if step.wire is None:
            assert not wire_seen
        else:
            wire_seen = True
    assert [s.launch for s in path.steps if s.wire is not None] == [3, 4]


def test_second_datum_is_pushed_earlier(chain):
    seed_memory(chain, "SRAM", [1], 0)
    first = route_datum(chain, 0, SpaceTimePoint("PE_in", 3), consume_at=4)
    reserve(chain, first)
    second = route_datum(chain, 1, SpaceTimePoint("PE_in", 3), consume_at=4)
    reserve(chain, second)
    by_datum = {m.datum: m for m in chain.movements if m.wire == "bus1"}
    # bus1 has bandwidth 1: the first datum takes the latest launch, the
    # second slides one cycle earlier and waits at the actor input
    assert by_datum[0].start_cycle == 2
    assert by_datum[1].start_cycle == 1
    assert chain.present(1, "PE_in", 2) and chain.present(1, "PE_in", 3)
    chain.audit()


def test_movements_may_end_before_target_cycle(chain):
    seed_memory(chain, "SRAM", [1], 0)
    reserve(chain, route_datum(chain, 0, SpaceTimePoint("PE_in", 3), consume_at=4))
    second = route_datum(chain, 1, SpaceTimePoint("PE_in", 3), consume_at=4)
    assert second.destination.cycle == 3
    last_wire = [s for s in second.steps if s.wire is not None][-1]
    assert last_wire.launch + 1 < 3 or second.steps[-1].wire is None


def test_timing_fault_reports_frontier(chain):
    with pytest.raises(TimingFault) as info:
        route_datum(chain, 0, SpaceTimePoint("PE_in", 1), consume_at=2)
    fault = info.value
    assert (fault.datum, fault.node, fault.cycle) == (0, "PE_in", 1)
    assert fault.frontier >= 0
    assert "raise the offset" in str(fault)


def test_route_sources_from_nearest_copy(chain):
    hop = route_datum(chain, 0, SpaceTimePoint("Reg", 2))
    reserve(chain, hop)
    onward = route_datum(chain, 0, SpaceTimePoint("PE_in", 6), consume_at=7)
    # the copy in Reg at cycle 2 beats restarting from SRAM
    assert onward.origin == SpaceTimePoint("Reg", 2)
    assert onward.cost == 2 + 3 * EPSILON


def test_locate_datum_lists_copies(chain):
    reserve(chain, route_datum(chain, 0, SpaceTimePoint("Reg", 2)))
    points = locate_datum(chain, 0)
    assert SpaceTimePoint("SRAM", 0) in points
    assert SpaceTimePoint("Reg", 2) in points
    with pytest.raises(WorkloadError):
        locate_datum(chain, 99)


def test_consumed_datum_frees_the_buffer(chain):
    # consume_at 4 releases PE_in (capacity 4) from cycle 4 on
    reserve(chain, route_datum(chain, 0, SpaceTimePoint("PE_in", 3), consume_at=4))
    assert chain.present(0, "PE_in", 3)
    assert not chain.present(0, "PE_in", 4)


def test_reused_datum_stays_resident(chain):
    reserve(
        chain,
        route_datum(chain, 0, SpaceTimePoint("PE_in", 3), consume_at=4, reused=True),
    )
    assert chain.present(0, "PE_in", 10)


def test_memory_landing_keeps_copy_to_horizon(chain):
    reserve(chain, route_datum(chain, 0, SpaceTimePoint("Reg", 2)))
    assert all(chain.present(0, "Reg", c) for c in range(2, 11))


def test_router_threads_a_capacity_gap(chain):
    # Reg is full until cycle 4; the only admissible landing is cycle 5
    for d in (91, 92, 93):
        chain.insert_span(d, "Reg", 0, 11)
    chain.insert_span(94, "Reg", 0, 5)
    chain.touch()
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 7), consume_at=8)
    reserve(chain, path)
    landing = [m for m in chain.movements if m.dst == "Reg"]
    # the latest-launch tie-break lands at 6, past the congestion either way
    assert landing[0].end_cycle >= 5
    chain.audit()


def test_route_blocked_by_capacity_faults(chain):
    for d in (91, 92, 93, 94):
        chain.insert_span(d, "Reg", 0, 11)
    chain.touch()
    with pytest.raises(TimingFault):
        route_datum(chain, 0, SpaceTimePoint("PE_in", 7), consume_at=8)


def test_reserve_rejects_stale_version(chain):
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    seed_memory(chain, "SRAM", [42], 0)  # bumps the state version
    with pytest.raises(StalePathError):
        reserve(chain, path)


def test_reserve_rejects_double_commit(chain):
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    reserve(chain, path)
    with pytest.raises(StalePathError):
        reserve(chain, path)


def test_reserve_rejects_vanished_origin(chain):
    path = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    chain.node_history["SRAM"][0].discard(0)  # bypass touch() on purpose
    with pytest.raises(StalePathError, match="origin"):
        reserve(chain, path)


def test_route_between_requires_presence(chain):
    with pytest.raises(WorkloadError, match="not present"):
        route_between(
            chain,
            0,
            SpaceTimePoint("Reg", 0),
            SpaceTimePoint("PE_in", 5),
            target_node="PE_in",
        )


def test_route_between_replays_whole_route(chain):
    direct = route_datum(chain, 0, SpaceTimePoint("PE_in", 5), consume_at=6)
    legged = route_between(
        chain,
        0,
        direct.origin,
        direct.destination,
        target_node="PE_in",
        consume_at=6,
    )
    assert legged.steps == direct.steps


def test_reverse_movements_involution():
    rows = [
        Movement(1, "A", 2, "B", 4, "w0"),
        Movement(2, "B", 5, "C", 6, "w1"),
    ]
    once = reverse_movements(rows, 9)
    assert once[0] == Movement(1, "B", 5, "A", 7, "w0")
    assert reverse_movements(once, 9) == rows


def test_route_reduction_tree():
    tree = parse_hardware(fixture_text("reduction_tree.json"))
    state = build_state(parse_hardware(fixture_text("tiny_chain.json")), 20)
    assignments = {0: "MUL_0", 1: "MUL_1", 2: "MUL_2", 3: "MUL_3"}
    movements = route_reduction(
        state, tree, 7, SpaceTimePoint("ROOT", 6), assignments
    )
    # a binary accumulation over four leaves is 2 * (4 - 1) transfers
    assert len(movements) == 6
    assert all(m.end_cycle <= 6 for m in movements)
    roots = [m for m in movements if m.dst == "ROOT"]
    # each subtree feeds the root over its own wire, so both land on time
    assert sorted(m.end_cycle for m in roots) == [6, 6]
    # every movement climbs: reversal turned the fan-out into a merge
    leaf_departures = [m for m in movements if m.src in assignments.values()]
    assert len(leaf_departures) == 4


def test_route_reduction_result_must_fit():
    tree = parse_hardware(fixture_text("reduction_tree.json"))
    state = build_state(parse_hardware(fixture_text("tiny_chain.json")), 20)
    state.sizes[7] = 99
    with pytest.raises(WorkloadError, match="does not fit"):
        route_reduction(state, tree, 7, SpaceTimePoint("ROOT", 6), {0: "MUL_0"})


def test_target_cycle_outside_horizon(chain):
    with pytest.raises(WorkloadError, match="horizon"):
        route_datum(chain, 0, SpaceTimePoint("PE_in", 11))
