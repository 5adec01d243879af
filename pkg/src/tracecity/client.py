"""Producer-side emitter: sends ingest messages to a server or a trace file.

Pacing sleeps on the producer's wall clock only; event timestamps are never
rewritten, so the engine computes identical elevations at any replay speed.
"""

from __future__ import annotations

import socket
import time
from pathlib import Path
from typing import Iterable

from .protocol import EventBatch, IngestMessage, encode_message


class ProducerConnection:
    """Blocking NDJSON writer over TCP."""

    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)

    def send(self, msg: IngestMessage) -> None:
        self._sock.sendall(encode_message(msg).encode("utf-8") + b"\n")

    def close(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_WR)
        except OSError:
            pass
        self._sock.close()


def _batch_sim_time(msg: IngestMessage) -> int | None:
    if isinstance(msg, EventBatch):
        return msg.events[-1].timestamp
    return None


def emit(
    messages: Iterable[IngestMessage],
    send,
    speed: float = 0.0,
    sleep=time.sleep,
) -> int:
    """Push messages through ``send``; returns the count sent.

    ``speed`` > 0 paces emission: the gap between consecutive batches' latest
    timestamps is slept scaled by 1/speed. 0 emits as fast as possible.
    """
    if speed < 0:
        raise ValueError("speed must be positive")
    count = 0
    previous_sim: int | None = None
    for msg in messages:
        sim = _batch_sim_time(msg)
        if speed > 0 and sim is not None:
            if previous_sim is not None and sim > previous_sim:
                sleep((sim - previous_sim) / 1_000_000 / speed)
            previous_sim = sim
        send(msg)
        count += 1
    return count


def emit_to_server(
    messages: Iterable[IngestMessage],
    host: str,
    port: int,
    speed: float = 0.0,
) -> int:
    conn = ProducerConnection(host, port)
    try:
        return emit(messages, conn.send, speed=speed)
    finally:
        conn.close()


def emit_to_file(messages: Iterable[IngestMessage], path: str | Path) -> int:
    from .protocol import write_trace_file

    return write_trace_file(path, messages)
