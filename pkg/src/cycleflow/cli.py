"""Command line client for the scheduling service.

Every command reads its documents from disk, posts them to the HTTP API,
and shapes the response into files or stdout.  By default the service runs
in process over an ASGI transport; pass --server to target a running
instance instead.  Exit codes: 0 on success, 1 when a schedule cannot be
met or a check fails, 2 for unusable inputs or bad invocations.
"""

from __future__ import annotations

import asyncio
import json
import pathlib

import click
import httpx

from .model import DEFAULT_MARGIN
from .schedule import movements_from_rows, movements_to_csv, placements_to_csv
from .service import app

# 422 payloads carrying these exception types are the caller's fault.
USAGE_ERROR_TYPES = {"HardwareError", "WorkloadError", "ValueError"}


def call(server: str | None, method: str, path: str, payload: dict | None = None) -> dict:
    """Send one request, in process unless a server URL is given."""

    async def go() -> httpx.Response:
        if server:
            async with httpx.AsyncClient(base_url=server, timeout=300.0) as client:
                return await client.request(method, path, json=payload)
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://cycleflow.local"
        ) as client:
            return await client.request(method, path, json=payload)

    try:
        response = asyncio.run(go())
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach the service: {exc}", err=True)
        raise SystemExit(1) from None
    if response.status_code == 422:
        body = response.json()
        detail = body.get("detail", response.text)
        if isinstance(detail, list):
            # Request model validation: malformed invocation.
            raise click.UsageError(json.dumps(detail))
        if body.get("error_type") in USAGE_ERROR_TYPES:
            raise click.UsageError(str(detail))
        click.echo(f"error: {detail}", err=True)
        raise SystemExit(1)
    if response.status_code >= 400:
        click.echo(f"error: service returned {response.status_code}: {response.text}", err=True)
        raise SystemExit(1)
    return response.json()


def read_text(path: str) -> str:
    try:
        return pathlib.Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}") from None


def stats_text(stats: dict) -> str:
    lines = [
        f"total energy : {stats['total_energy']}",
        f"makespan     : {stats['makespan']} cycles",
        "wire utilization:",
    ]
    for wire, value in stats["per_wire_utilization"].items():
        lines.append(f"  {wire:<20} {value:.6f}")
    return "\n".join(lines)


def document_options(f):
    f = click.option(
        "--seeds",
        "seeds_path",
        required=True,
        type=click.Path(),
        help="Seed placement document (JSON).",
    )(f)
    f = click.option(
        "--workload",
        "workload_path",
        required=True,
        type=click.Path(),
        help="Operation list document (JSON).",
    )(f)
    f = click.option(
        "--hardware",
        "hardware_path",
        required=True,
        type=click.Path(),
        help="Hardware description document (JSON).",
    )(f)
    return f


def tuning_options(f):
    f = click.option(
        "--margin",
        type=int,
        default=DEFAULT_MARGIN,
        show_default=True,
        help="Drain cycles appended to the derived horizon.",
    )(f)
    f = click.option(
        "--wait-epsilon",
        default=None,
        help="Cost of one waiting cycle (int, float, or n/d).",
    )(f)
    f = click.option(
        "--horizon",
        type=int,
        default=None,
        help="Last schedulable cycle; derived from the workload when omitted.",
    )(f)
    return f


def server_option(f):
    return click.option(
        "--server",
        default=None,
        help="Base URL of a running service; defaults to an in-process instance.",
    )(f)


@click.group()
def main() -> None:
    """Ahead-of-time, cycle-accurate scheduling for accelerator dataflows."""


@main.command()
@document_options
@tuning_options
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json", "text"]),
    default="text",
    show_default=True,
    help="Stdout format when no output directory is given.",
)
@click.option(
    "--out-dir",
    type=click.Path(),
    default=None,
    help="Write schedule.json, movements.csv, placements.csv, gantt.txt here.",
)
@server_option
def schedule(
    hardware_path: str,
    workload_path: str,
    seeds_path: str,
    horizon: int | None,
    wait_epsilon: str | None,
    margin: int,
    fmt: str,
    out_dir: str | None,
    server: str | None,
) -> None:
    """Place and route a workload, producing the full schedule."""
    payload = {
        "hardware": read_text(hardware_path),
        "workload": read_text(workload_path),
        "seeds": read_text(seeds_path),
        "horizon": horizon,
        "wait_epsilon": wait_epsilon,
        "margin": margin,
    }
    body = call(server, "POST", "/schedule", payload)
    artifact = {key: body[key] for key in ("placements", "movements", "stats", "horizon")}
    movements = movements_from_rows(body["movements"])
    if out_dir is not None:
        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "schedule.json").write_text(json.dumps(artifact, indent=2) + "\n")
        (out / "movements.csv").write_text(movements_to_csv(movements))
        (out / "placements.csv").write_text(placements_to_csv(body["placements"]))
        (out / "gantt.txt").write_text(body["gantt"] + "\n")
        click.echo(stats_text(body["stats"]))
        return
    if fmt == "json":
        click.echo(json.dumps(artifact, indent=2))
    elif fmt == "csv":
        click.echo(movements_to_csv(movements), nl=False)
    else:
        click.echo(body["gantt"])
        click.echo("")
        click.echo(stats_text(body["stats"]))


@main.command()
@click.option("--hardware-a", "hardware_a", required=True, type=click.Path())
@click.option("--hardware-b", "hardware_b", required=True, type=click.Path())
@click.option("--workload", "workload_path", required=True, type=click.Path())
@click.option("--seeds", "seeds_path", required=True, type=click.Path())
@tuning_options
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "text"]),
    default="text",
    show_default=True,
)
@server_option
def compare(
    hardware_a: str,
    hardware_b: str,
    workload_path: str,
    seeds_path: str,
    horizon: int | None,
    wait_epsilon: str | None,
    margin: int,
    fmt: str,
    server: str | None,
) -> None:
    """Schedule one workload on two hardware variants and report the delta."""
    payload = {
        "hardware_a": read_text(hardware_a),
        "hardware_b": read_text(hardware_b),
        "workload": read_text(workload_path),
        "seeds": read_text(seeds_path),
        "horizon": horizon,
        "wait_epsilon": wait_epsilon,
        "margin": margin,
    }
    body = call(server, "POST", "/compare", payload)
    for side in ("a", "b"):
        error_type = body[side].get("error_type")
        if error_type in USAGE_ERROR_TYPES:
            raise click.UsageError(f"variant {side}: {body[side]['error']}")
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        for side in ("a", "b"):
            click.echo(f"variant {side}:")
            if "error" in body[side]:
                click.echo(f"  infeasible: {body[side]['error']}")
            else:
                stats = body[side]["stats"]
                click.echo(f"  total energy: {stats['total_energy']}")
                click.echo(f"  makespan:     {stats['makespan']} cycles")
        if body["delta"] is not None:
            click.echo("delta (b - a):")
            click.echo(f"  total energy: {body['delta']['total_energy']:+g}")
            click.echo(f"  makespan:     {body['delta']['makespan']:+d} cycles")
    if body["delta"] is None:
        raise SystemExit(1)


@main.command()
@document_options
@click.option(
    "--movements",
    "movements_path",
    required=True,
    type=click.Path(),
    help="Schedule artifact or movement rows (JSON).",
)
@click.option(
    "--control-latency",
    type=int,
    default=0,
    show_default=True,
    help="Cycles a control packet needs to reach its node.",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "text"]),
    default="text",
    show_default=True,
)
@server_option
def verify(
    hardware_path: str,
    workload_path: str,
    seeds_path: str,
    movements_path: str,
    control_latency: int,
    fmt: str,
    server: str | None,
) -> None:
    """Replay a schedule cycle by cycle and report every violation."""
    payload = {
        "hardware": read_text(hardware_path),
        "workload": read_text(workload_path),
        "seeds": read_text(seeds_path),
        "movements": read_text(movements_path),
        "control_latency": control_latency,
    }
    body = call(server, "POST", "/verify", payload)
    if fmt == "json":
        click.echo(json.dumps(body, indent=2))
    else:
        if body["violations"]:
            click.echo("violations:")
            for v in body["violations"]:
                click.echo(f"  [{v['kind']}] cycle {v['cycle']}: {v['subject']}")
        else:
            click.echo("violations: none")
        click.echo(f"completed operations: {body['completed_ops']}")
        click.echo(f"controller peak queue: {body['controller_peak_queue']}")
    if not body["ok"]:
        raise SystemExit(1)


@main.command()
@document_options
@tuning_options
@click.option(
    "--stride",
    type=int,
    default=4,
    show_default=True,
    help="Keep every stride-th waypoint of each route.",
)
@click.option(
    "--out",
    "out_path",
    type=click.Path(),
    default=None,
    help="Write the waypoint program here instead of stdout.",
)
@server_option
def compress(
    hardware_path: str,
    workload_path: str,
    seeds_path: str,
    horizon: int | None,
    wait_epsilon: str | None,
    margin: int,
    stride: int,
    out_path: str | None,
    server: str | None,
) -> None:
    """Schedule a workload and emit its compressed waypoint program."""
    payload = {
        "hardware": read_text(hardware_path),
        "workload": read_text(workload_path),
        "seeds": read_text(seeds_path),
        "stride": stride,
        "horizon": horizon,
        "wait_epsilon": wait_epsilon,
        "margin": margin,
    }
    body = call(server, "POST", "/compress", payload)
    text = json.dumps(body["program"], indent=2) + "\n"
    if out_path is not None:
        pathlib.Path(out_path).write_text(text)
        click.echo(f"waypoint program written to {out_path}")
    else:
        click.echo(text, nl=False)
    if not body["matches_schedule"]:
        click.echo(f"error: replay mismatch: {body['first_diff']}", err=True)
        raise SystemExit(1)


@main.command()
@document_options
@tuning_options
@click.option(
    "--program",
    "program_path",
    required=True,
    type=click.Path(),
    help="Waypoint program produced by compress (JSON).",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["csv", "json", "text"]),
    default="text",
    show_default=True,
)
@server_option
def reconstruct(
    hardware_path: str,
    workload_path: str,
    seeds_path: str,
    horizon: int | None,
    wait_epsilon: str | None,
    margin: int,
    program_path: str,
    fmt: str,
    server: str | None,
) -> None:
    """Rebuild the exact schedule from a compressed waypoint program."""
    payload = {
        "hardware": read_text(hardware_path),
        "workload": read_text(workload_path),
        "seeds": read_text(seeds_path),
        "program": read_text(program_path),
        "horizon": horizon,
        "wait_epsilon": wait_epsilon,
        "margin": margin,
    }
    body = call(server, "POST", "/reconstruct", payload)
    movements = movements_from_rows(body["movements"])
    if fmt == "json":
        artifact = {
            key: body[key]
            for key in ("placements", "movements", "stats", "horizon", "matches_direct")
        }
        click.echo(json.dumps(artifact, indent=2))
    elif fmt == "csv":
        click.echo(movements_to_csv(movements), nl=False)
    else:
        click.echo(stats_text(body["stats"]))
        click.echo(f"movements: {len(movements)}")
        if body["matches_direct"]:
            click.echo("matches a direct scheduling run")
    if not body["matches_direct"]:
        click.echo(f"error: reconstruction diverged: {body['first_diff']}", err=True)
        raise SystemExit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the scheduling service as an HTTP server."""
    import uvicorn

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
