"""Operator entry point: serve the profiler, drive workloads, analyze traces.

Exit codes: 0 success, 1 usage, 2 I/O, 3 protocol.
"""

from __future__ import annotations

import json
import sys

import click

from .analyze import analyze_trace, format_table
from .client import emit, emit_to_file, ProducerConnection
from .protocol import MalformedMessage, read_trace_file
from .scenarios import SCENARIO_NAMES, build_scenario
from .service import HubConfig, create_app
from .session import parse_exclude_flag

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PROTOCOL = 3


def _server_options(fn):
    fn = click.option("--host", default="127.0.0.1", show_default=True)(fn)
    fn = click.option("--ingest-port", default=7071, show_default=True)(fn)
    fn = click.option("--ui-port", default=7072, show_default=True)(fn)
    fn = click.option("--mirror-port", default=7073, show_default=True)(fn)
    fn = click.option(
        "--exclude",
        multiple=True,
        metavar="PACKAGE.PREFIX",
        help="Drop events of methods under this package prefix (repeatable).",
    )(fn)
    fn = click.option("--window-ms", default=3000, show_default=True)(fn)
    fn = click.option("--tick-ms", default=100, show_default=True)(fn)
    return fn


def _build_config(host, ingest_port, ui_port, mirror_port, exclude, window_ms, tick_ms, record=None):
    if window_ms <= 0:
        raise click.UsageError("--window-ms must be positive")
    if tick_ms <= 0:
        raise click.UsageError("--tick-ms must be positive")
    try:
        prefixes = tuple(parse_exclude_flag(raw) for raw in exclude)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    return HubConfig(
        host=host,
        ingest_port=ingest_port,
        ui_port=ui_port,
        mirror_port=mirror_port,
        window_ms=window_ms,
        tick_ms=tick_ms,
        excluded_packages=prefixes,
        record_path=record,
    )


def _run_server(config: HubConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.ui_port, log_level="warning")


@click.group()
def cli() -> None:
    """Real-time profiling city: serve, simulate, replay, record, analyze."""


@cli.command()
@_server_options
def serve(**kwargs) -> None:
    """Run the profiling server (ingest TCP, WebSocket stream, TCP mirror)."""
    _run_server(_build_config(**kwargs))


@cli.command()
@click.argument("out", type=click.Path(dir_okay=False, writable=True))
@_server_options
def record(out, **kwargs) -> None:
    """Serve while recording every accepted ingest message to OUT."""
    _run_server(_build_config(record=out, **kwargs))


@cli.command()
@click.argument("scenario", type=click.Choice(SCENARIO_NAMES))
@click.option("--restarts", default=16, show_default=True, help="thread-leak: simulated restarts.")
@click.option("--duty", default=0.3, show_default=True, help="duty-cycle: busy fraction of each second.")
@click.option("--duration-ms", default=None, type=int, help="Simulated length; scenario default if omitted.")
@click.option("--seed", default=0, show_default=True)
@click.option("--pace", type=click.Choice(["real", "fast"]), default="real", show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7071, show_default=True, help="Server ingest port.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write a trace file instead of sending to a server.")
def simulate(scenario, restarts, duty, duration_ms, seed, pace, host, port, out) -> None:
    """Emit a synthetic workload to a server or trace file."""
    if restarts < 1:
        raise click.UsageError("--restarts must be >= 1")
    if not 0.0 < duty < 1.0:
        raise click.UsageError("--duty must be between 0 and 1 exclusive")
    if duration_ms is not None and duration_ms <= 0:
        raise click.UsageError("--duration-ms must be positive")
    messages = build_scenario(
        scenario,
        restarts=restarts,
        duty=duty,
        duration_micros=duration_ms * 1000 if duration_ms else None,
        seed=seed,
    )
    if out is not None:
        count = emit_to_file(messages, out)
        click.echo(f"wrote {count} messages to {out}")
        return
    speed = 1.0 if pace == "real" else 0.0
    conn = ProducerConnection(host, port)
    try:
        count = emit(messages, conn.send, speed=speed)
    finally:
        conn.close()
    click.echo(f"sent {count} messages to {host}:{port}")


@cli.command()
@click.argument("trace", type=click.Path(exists=True, dir_okay=False))
@click.option("--speed", default=1.0, show_default=True,
              help="Wall-clock pacing factor; timestamps are sent unmodified.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=7071, show_default=True, help="Server ingest port.")
def replay(trace, speed, host, port) -> None:
    """Resend a recorded trace to a server, pacing by its own timestamps."""
    if speed <= 0:
        raise click.UsageError("--speed must be positive")
    conn = ProducerConnection(host, port)
    try:
        count = emit(read_trace_file(trace), conn.send, speed=speed)
    finally:
        conn.close()
    click.echo(f"replayed {count} messages from {trace}")


@cli.command()
@click.argument("trace", type=click.Path(exists=True, dir_okay=False))
@click.option("--window-ms", default=3000, show_default=True)
@click.option("--tick-ms", default=100, show_default=True)
@click.option("--exclude", multiple=True, metavar="PACKAGE.PREFIX")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def analyze(trace, window_ms, tick_ms, exclude, fmt) -> None:
    """Report peak elevation, self time, and thread counts per method."""
    if window_ms <= 0 or tick_ms <= 0:
        raise click.UsageError("--window-ms and --tick-ms must be positive")
    try:
        prefixes = tuple(parse_exclude_flag(raw) for raw in exclude)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    report = analyze_trace(
        trace,
        window_micros=window_ms * 1000,
        tick_micros=tick_ms * 1000,
        excluded_packages=prefixes,
    )
    if fmt == "json":
        click.echo(json.dumps(report.to_json(), indent=2))
    else:
        click.echo(format_table(report), nl=False)


def main(argv: list[str] | None = None) -> int:
    """CLI wrapper mapping failures onto the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.Abort:
        return EXIT_USAGE
    except MalformedMessage as exc:
        click.echo(f"protocol error: {exc}", err=True)
        return EXIT_PROTOCOL
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
