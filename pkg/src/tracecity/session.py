"""Session state for one producer connection: registry, filters, counters, queue.

Accepted event batches are queued here and drained into the elevation engine
at tick boundaries. Per thread, accepted timestamps are checked non-decreasing
at accept time, so the engine always sees ordered input no matter how ticks
interleave with arrivals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import ElevationEngine, ElevationRow
from .model import (
    ConflictingRegistration,
    MethodId,
    MethodRegistry,
    ThreadId,
    TraceEvent,
    Window,
    placeholder_descriptor,
)
from .protocol import EventBatch, IngestMessage, Register, SessionMeta


@dataclass
class SessionStats:
    """Counters exposed for operators; drops are split by cause."""

    messages: int = 0
    events: int = 0
    dropped_malformed: int = 0
    dropped_out_of_order: int = 0
    dropped_excluded: int = 0
    dropped_conflicts: int = 0

    @property
    def drops(self) -> int:
        return (
            self.dropped_malformed
            + self.dropped_out_of_order
            + self.dropped_excluded
            + self.dropped_conflicts
        )


class OutOfOrderBatch(Exception):
    """A batch started before the thread's last accepted timestamp."""


@dataclass
class Session:
    """One profiled program run: registry, engine, exclusions, and statistics."""

    window_micros: int = 3_000_000
    excluded_packages: tuple[tuple[str, ...], ...] = ()
    program_name: str = ""
    time_origin_micros: int = 0

    registry: MethodRegistry = field(default_factory=MethodRegistry)
    stats: SessionStats = field(default_factory=SessionStats)

    def __post_init__(self) -> None:
        self.engine = ElevationEngine(self.window_micros)
        self._pending: list[tuple[ThreadId, tuple[TraceEvent, ...]]] = []
        self._last_accepted: dict[ThreadId, int] = {}
        self._excluded_ids: set[MethodId] = set()

    # -- registration ------------------------------------------------------

    def register(self, reg: Register) -> bool:
        """Apply a registration; returns True if the registry changed."""
        before = self.registry.version
        self.registry.register(reg.descriptor())
        if self._is_excluded(reg.package_path):
            self._excluded_ids.add(reg.id)
        return self.registry.version != before

    def _is_excluded(self, package_path: tuple[str, ...]) -> bool:
        return any(
            package_path[: len(prefix)] == prefix for prefix in self.excluded_packages
        )

    def _ensure_known(self, method_id: MethodId) -> None:
        if method_id not in self.registry:
            self.registry.register(placeholder_descriptor(method_id))

    # -- events ------------------------------------------------------------

    def accept_events(self, batch: EventBatch) -> int:
        """Validate and queue a batch; returns the number of events accepted.

        Unregistered ids get placeholder descriptors so every observed method
        has an identity. Events of excluded packages are discarded before
        stack reconstruction, as if those methods were never called; their
        time stays inside the caller's self time.

        Raises OutOfOrderBatch (after counting the drop) when the batch starts
        before the thread's last accepted timestamp. Batches are never
        reordered.
        """
        last = self._last_accepted.get(batch.thread)
        if last is not None and batch.events[0].timestamp < last:
            self.stats.dropped_out_of_order += len(batch.events)
            raise OutOfOrderBatch(
                f"thread {batch.thread}: batch starts at {batch.events[0].timestamp}"
                f" before last accepted {last}"
            )

        excluded = self._excluded_ids
        kept: list[TraceEvent] = []
        for event in batch.events:
            self._ensure_known(event.method)
            if event.method in excluded:
                self.stats.dropped_excluded += 1
                continue
            kept.append(event)
        # Last-seen advances for the whole accepted batch, filtered or not.
        self._last_accepted[batch.thread] = batch.events[-1].timestamp
        if kept:
            self._pending.append((batch.thread, tuple(kept)))
        self.stats.events += len(kept)
        return len(kept)

    def accept(self, msg: IngestMessage) -> None:
        """Dispatch one decoded message into the session.

        Conflicting registrations are counted and skipped rather than raised:
        a live profiler survives misbehaving producers.
        """
        self.stats.messages += 1
        if isinstance(msg, EventBatch):
            try:
                self.accept_events(msg)
            except OutOfOrderBatch:
                pass
        elif isinstance(msg, Register):
            try:
                self.register(msg)
            except ConflictingRegistration:
                self.stats.dropped_conflicts += 1
        elif isinstance(msg, SessionMeta):
            self.program_name = msg.program_name
            self.time_origin_micros = msg.time_origin_micros

    def drain_pending(self) -> list[tuple[ThreadId, tuple[TraceEvent, ...]]]:
        pending, self._pending = self._pending, []
        return pending

    @property
    def latest_accepted_micros(self) -> int:
        """Largest timestamp accepted so far (queued or already applied)."""
        queued = max(self._last_accepted.values(), default=0)
        return max(queued, self.engine.latest_event_micros)

    # -- engine facade -----------------------------------------------------

    def tick(self, now_micros: int) -> list[ElevationRow]:
        """Drain queued events into the engine and advance the window."""
        return self.engine.tick(now_micros, self.drain_pending())

    def elevation(self, method: MethodId, window: Window) -> ElevationRow:
        return self.engine.elevation(method, window)

    @property
    def resyncs(self) -> int:
        return self.engine.resyncs

    @property
    def dropped_exits(self) -> int:
        return self.engine.dropped_exits


def parse_exclude_flag(raw: str) -> tuple[str, ...]:
    """Turn a CLI ``--exclude org.ini4j`` value into a package-path prefix."""
    prefix = tuple(seg for seg in raw.split(".") if seg)
    if not prefix:
        raise ValueError("exclude prefix must name at least one package segment")
    return prefix
