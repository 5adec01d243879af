"""Central coordinator: one producer session in, many stream clients out.

Everything here runs on a single event loop; tick_once() is synchronous, so a
tick observes a consistent prefix of the ingest queue and a frame can never
outrun the structure revision it refers to.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from typing import IO

from ..frames import Frame, compose_frame, hello_message, structure_message
from ..layout import CityLayout, build_layout
from ..protocol import MalformedMessage, SessionMeta, decode_line, encode_message
from ..session import Session

log = logging.getLogger("tracecity")

MAX_CLIENT_LAG = 50  # frames a client may fall behind before a resync


@dataclass
class HubConfig:
    host: str = "127.0.0.1"
    ingest_port: int = 7071
    ui_port: int = 7072
    mirror_port: int = 7073
    window_ms: int = 3000
    tick_ms: int = 100
    excluded_packages: tuple[tuple[str, ...], ...] = ()
    record_path: str | None = None

    @property
    def window_micros(self) -> int:
        return self.window_ms * 1000

    @property
    def tick_micros(self) -> int:
        return self.tick_ms * 1000


class ClientLink:
    """Outbound queue of one stream client (WebSocket or TCP mirror)."""

    __slots__ = ("queue", "resyncs")

    def __init__(self) -> None:
        self.queue: asyncio.Queue[dict] = asyncio.Queue()
        self.resyncs = 0


class Hub:
    def __init__(self, config: HubConfig):
        self.config = config
        self.session = self._new_session()
        self.rev = 0
        self.layout: CityLayout | None = None
        self.latest_structure = structure_message(0, self.session.registry, None)
        self.latest_frame: Frame | None = None
        self.clients: set[ClientLink] = set()
        self.client_resyncs = 0
        self.producer_connected = False
        self.bound_ingest_port: int | None = None  # filled once listeners start
        self.bound_mirror_port: int | None = None
        self._had_producer = False
        self._built_version = 0
        self._prev_now = 0
        self._record: IO[str] | None = None
        self._record_has_meta = False

    def _new_session(self) -> Session:
        return Session(
            window_micros=self.config.window_micros,
            excluded_packages=self.config.excluded_packages,
        )

    @property
    def hello(self) -> dict:
        return hello_message(self.config.window_micros, self.config.tick_micros)

    # -- producer lifecycle --------------------------------------------------

    def on_producer_connect(self) -> bool:
        """Admit a producer; only one at a time. True if admitted."""
        if self.producer_connected:
            return False
        if self._had_producer:
            # One connection, one session: a returning producer starts fresh.
            self.session = self._new_session()
            self._prev_now = 0
            self._built_version = -1  # force an (empty) structure broadcast
        self.producer_connected = True
        self._had_producer = True
        self._open_record()
        return True

    def on_producer_disconnect(self) -> None:
        # The session stays: heights decay in view instead of vanishing.
        self.producer_connected = False
        self._close_record()

    def on_producer_line(self, line: str) -> None:
        """Decode and apply one wire line; malformed lines are counted, not fatal."""
        try:
            msg = decode_line(line)
        except MalformedMessage as exc:
            self.session.stats.dropped_malformed += 1
            log.debug("dropped malformed line: %s", exc)
            return
        self.session.accept(msg)
        self._record_message(msg)

    # -- record tee ------------------------------------------------------------

    def _open_record(self) -> None:
        if self.config.record_path is None:
            return
        self._record = open(self.config.record_path, "w", encoding="utf-8", newline="\n")
        self._record_has_meta = False

    def _record_message(self, msg) -> None:
        if self._record is None:
            return
        if not self._record_has_meta:
            if not isinstance(msg, SessionMeta):
                synthesized = SessionMeta(program_name="unknown", time_origin_micros=0)
                self._record.write(encode_message(synthesized) + "\n")
            self._record_has_meta = True
        self._record.write(encode_message(msg) + "\n")

    def _close_record(self) -> None:
        if self._record is not None:
            self._record.close()
            self._record = None

    # -- clients ---------------------------------------------------------------

    def attach_client(self) -> ClientLink:
        link = ClientLink()
        self.clients.add(link)
        return link

    def detach_client(self, link: ClientLink) -> None:
        self.clients.discard(link)

    def broadcast(self, msg: dict) -> None:
        for link in list(self.clients):
            if link.queue.qsize() >= MAX_CLIENT_LAG:
                # Frames are idempotent snapshots: drop the backlog, resync.
                while not link.queue.empty():
                    link.queue.get_nowait()
                link.resyncs += 1
                self.client_resyncs += 1
                link.queue.put_nowait(self.latest_structure)
                frame = self.latest_frame
                if frame is not None and frame.rev == self.rev:
                    link.queue.put_nowait(frame.to_wire())
            else:
                link.queue.put_nowait(msg)

    # -- tick ------------------------------------------------------------------

    def refresh_structure(self) -> bool:
        """Rebuild layout and broadcast a new revision if the registry changed."""
        registry = self.session.registry
        if registry.version == self._built_version:
            return False
        self._built_version = registry.version
        self.rev += 1
        self.layout = build_layout(registry, self.rev) if len(registry) else None
        self.latest_structure = structure_message(self.rev, registry, self.layout)
        self.broadcast(self.latest_structure)
        return True

    def next_now(self) -> int:
        """Window end for this tick: latest producer time, else previous + tick."""
        latest = self.session.latest_accepted_micros
        if latest > self._prev_now:
            return latest
        return self._prev_now + self.config.tick_micros

    def tick_once(self, now_micros: int | None = None) -> Frame:
        self.refresh_structure()
        now = self.next_now() if now_micros is None else now_micros
        self._prev_now = now
        rows = self.session.tick(now)
        frame = compose_frame(rows, self.rev, now)
        self.latest_frame = frame
        self.broadcast(frame.to_wire())
        return frame

    async def run_ticks(self) -> None:
        interval = self.config.tick_ms / 1000
        while True:
            await asyncio.sleep(interval)
            self.tick_once()

    def close(self) -> None:
        self._close_record()

    # -- status snapshots --------------------------------------------------

    def stats_snapshot(self) -> dict:
        stats = self.session.stats
        drops = {
            "malformed": stats.dropped_malformed,
            "out_of_order": stats.dropped_out_of_order,
            "excluded": stats.dropped_excluded,
            "conflicts": stats.dropped_conflicts,
            "unmatched_exits": self.session.dropped_exits,
        }
        return {
            "messages": stats.messages,
            "events": stats.events,
            "resyncs": self.session.resyncs,
            "drops": drops,
            "drops_total": sum(drops.values()),
            "client_resyncs": self.client_resyncs,
            "rev": self.rev,
            "now_us": self._prev_now,
            "window_ms": self.config.window_ms,
            "tick_ms": self.config.tick_ms,
        }
