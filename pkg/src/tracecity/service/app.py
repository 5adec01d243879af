"""FastAPI application: WebSocket stream for UI clients plus a status API.

The app owns the whole service lifecycle: its lifespan starts the producer
ingest listener, the TCP mirror, and the tick loop, all on the server's event
loop. Ports configured as 0 bind ephemerally; the bound ports are published on
``app.state.hub``.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .hub import Hub, HubConfig
from .schemas import FrameResponse, HealthResponse, StatsResponse, StructureResponse
from .tcp import bound_port, start_ingest_server, start_mirror_server

log = logging.getLogger("tracecity")


def create_app(config: HubConfig | None = None) -> FastAPI:
    hub = Hub(config or HubConfig())

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        ingest = await start_ingest_server(hub)
        mirror = await start_mirror_server(hub)
        hub.bound_ingest_port = bound_port(ingest)
        hub.bound_mirror_port = bound_port(mirror)
        ticker = asyncio.create_task(hub.run_ticks())
        log.info(
            "serving: ingest tcp/%d, mirror tcp/%d, window %d ms, tick %d ms",
            hub.bound_ingest_port,
            hub.bound_mirror_port,
            hub.config.window_ms,
            hub.config.tick_ms,
        )
        try:
            yield
        finally:
            ticker.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await ticker
            ingest.close()
            mirror.close()
            await ingest.wait_closed()
            await mirror.wait_closed()
            hub.close()

    app = FastAPI(title="tracecity", lifespan=lifespan)
    app.state.hub = hub

    @app.websocket("/stream")
    async def stream(ws: WebSocket) -> None:
        await ws.accept()
        link = hub.attach_client()
        try:
            await ws.send_text(_dump(hub.hello))
            await ws.send_text(_dump(hub.latest_structure))
            while True:
                msg = await link.queue.get()
                await ws.send_text(_dump(msg))
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            hub.detach_client(link)

    @app.get("/healthz", response_model=HealthResponse)
    async def healthz() -> HealthResponse:
        return HealthResponse(
            status="ok",
            program=hub.session.program_name,
            rev=hub.rev,
            methods=len(hub.session.registry),
            threads=len(hub.session.engine.threads),
            clients=len(hub.clients),
            producer_connected=hub.producer_connected,
        )

    @app.get("/stats", response_model=StatsResponse)
    async def stats() -> StatsResponse:
        return StatsResponse.model_validate(hub.stats_snapshot())

    @app.get("/structure", response_model=StructureResponse)
    async def structure() -> StructureResponse:
        return StructureResponse.model_validate(hub.latest_structure)

    @app.get("/frame", response_model=FrameResponse)
    async def frame() -> FrameResponse:
        latest = hub.latest_frame
        if latest is None:
            return FrameResponse(rev=hub.rev, t_us=0, rows=[])
        return FrameResponse.model_validate(latest.to_wire())

    return app


def _dump(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":"))
