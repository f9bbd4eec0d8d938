"""Ahead-of-time, cycle-accurate scheduling for deterministic dataflows.

The pipeline: parse the hardware graph and workload, place operations onto
actors, register their future outputs, then route every operand through the
wire network with per-cycle buffer and bandwidth reservations.  Schedules
can be compressed to waypoint programs, reconstructed bit-exactly, and
replayed by an independent simulator for verification.
"""

from .model import (
    DEFAULT_MARGIN,
    WAIT_EPSILON,
    ActorSpec,
    CapacityError,
    HardwareError,
    HardwareGraph,
    Movement,
    NodeSpec,
    Operation,
    Placement,
    PlacementError,
    ReconstructionError,
    ScheduleState,
    SchedulingError,
    Seed,
    StalePathError,
    TimingFault,
    WireSpec,
    WorkloadError,
    apply_seeds,
    build_state,
    default_horizon,
    parse_hardware,
    parse_seeds,
    parse_workload,
    register_outputs,
    remove_wire,
    seed_memory,
    serialize_hardware,
    serialize_seeds,
    serialize_workload,
    validate_graph,
)
from .placing import filtered_placing, first_best_fit
from .routing import (
    Path,
    PathStep,
    SpaceTimePoint,
    locate_datum,
    reserve,
    reverse_movements,
    route_all,
    route_between,
    route_datum,
    route_reduction,
)
from .schedule import (
    ScheduleStats,
    WaypointProgram,
    WaypointRequest,
    compress_waypoints,
    compute_stats,
    diff_movements,
    makespan_of,
    movements_from_rows,
    movements_to_csv,
    movements_to_rows,
    placements_to_csv,
    placements_to_rows,
    program_from_json,
    program_to_json,
    reconstruct,
    render_gantt,
    schedule_to_dict,
    validate_movements,
)
from .sim import (
    ControlPacket,
    SimReport,
    Violation,
    emit_control_packets,
    peak_queue,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ActorSpec",
    "CapacityError",
    "ControlPacket",
    "DEFAULT_MARGIN",
    "HardwareError",
    "HardwareGraph",
    "Movement",
    "NodeSpec",
    "Operation",
    "Path",
    "PathStep",
    "Placement",
    "PlacementError",
    "ReconstructionError",
    "ScheduleState",
    "ScheduleStats",
    "SchedulingError",
    "Seed",
    "SimReport",
    "SpaceTimePoint",
    "StalePathError",
    "TimingFault",
    "Violation",
    "WAIT_EPSILON",
    "WaypointProgram",
    "WaypointRequest",
    "WireSpec",
    "WorkloadError",
    "apply_seeds",
    "build_state",
    "compress_waypoints",
    "compute_stats",
    "default_horizon",
    "diff_movements",
    "emit_control_packets",
    "filtered_placing",
    "first_best_fit",
    "locate_datum",
    "makespan_of",
    "movements_from_rows",
    "movements_to_csv",
    "movements_to_rows",
    "parse_hardware",
    "parse_seeds",
    "parse_workload",
    "peak_queue",
    "placements_to_csv",
    "placements_to_rows",
    "program_from_json",
    "program_to_json",
    "reconstruct",
    "register_outputs",
    "remove_wire",
    "render_gantt",
    "reserve",
    "reverse_movements",
    "route_all",
    "route_between",
    "route_datum",
    "route_reduction",
    "schedule_to_dict",
    "seed_memory",
    "serialize_hardware",
    "serialize_seeds",
    "serialize_workload",
    "simulate",
    "validate_graph",
    "validate_movements",
]
