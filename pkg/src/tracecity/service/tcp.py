"""Raw TCP endpoints: the producer ingest listener and the NDJSON mirror.

Both speak newline-delimited JSON over plain sockets so any language can
produce or consume without a WebSocket stack.
"""

from __future__ import annotations

import asyncio
import json
import logging

from .hub import Hub

log = logging.getLogger("tracecity")

MAX_LINE_BYTES = 16 * 1024 * 1024  # one batch line; generous but bounded


async def _handle_producer(hub: Hub, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
    peer = writer.get_extra_info("peername")
    if not hub.on_producer_connect():
        log.warning("rejecting second producer connection from %s", peer)
        writer.close()
        return
    log.info("producer connected: %s", peer)
    try:
        while True:
            try:
                raw = await reader.readline()
            except ValueError:
                # Line exceeded the buffer limit; treat as malformed and bail.
                hub.session.stats.dropped_malformed += 1
                break
            except (ConnectionResetError, asyncio.LimitOverrunError):
                break
            if not raw:
                break
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                hub.session.stats.dropped_malformed += 1
                continue
            hub.on_producer_line(line)
    finally:
        hub.on_producer_disconnect()
        writer.close()
        log.info("producer disconnected: %s", peer)


async def _handle_mirror_client(hub: Hub, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
    link = hub.attach_client()

    def send(msg: dict) -> None:
        writer.write(json.dumps(msg, separators=(",", ":")).encode("utf-8") + b"\n")

    try:
        send(hub.hello)
        send(hub.latest_structure)
        await writer.drain()
        while True:
            msg = await link.queue.get()
            send(msg)
            await writer.drain()
    except (ConnectionError, asyncio.CancelledError):
        pass
    finally:
        hub.detach_client(link)
        writer.close()


async def start_ingest_server(hub: Hub) -> asyncio.AbstractServer:
    server = await asyncio.start_server(
        lambda r, w: _handle_producer(hub, r, w),
        host=hub.config.host,
        port=hub.config.ingest_port,
        limit=MAX_LINE_BYTES,
    )
    return server


async def start_mirror_server(hub: Hub) -> asyncio.AbstractServer:
    server = await asyncio.start_server(
        lambda r, w: _handle_mirror_client(hub, r, w),
        host=hub.config.host,
        port=hub.config.mirror_port,
    )
    return server


def bound_port(server: asyncio.AbstractServer) -> int:
    return server.sockets[0].getsockname()[1]
