"""Per-thread stack reconstruction and windowed self-time elevations.

Self time means top-of-stack attribution: between two consecutive events of a
thread, the whole gap belongs to the method currently on top of that thread's
stack, so callee time is subtracted from the caller automatically. Elevation
normalizes the windowed self time by the window length, and the value reported
for a method is the maximum across threads.

All arithmetic is integer microseconds until the final division, so equal
traces produce bit-equal elevations regardless of batching or tick cadence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .model import EventAction, MethodId, ThreadId, TraceEvent, Window

_ENTER = int(EventAction.ENTER)


@dataclass(frozen=True, slots=True)
class SelfTimeInterval:
    """One attributed slice of exclusive execution time."""

    method: MethodId
    thread: ThreadId
    start: int
    end: int


@dataclass(frozen=True, slots=True)
class ElevationRow:
    """One method's state at a tick: windowed elevation and lifetime thread count."""

    method: MethodId
    elevation: float  # fraction of the window, in [0, 1]
    thread_count: int  # distinct threads that ever entered the method


class _SpanStore:
    """Closed self-time spans of one method on one thread, oldest first."""

    __slots__ = ("spans", "total")

    def __init__(self) -> None:
        self.spans: deque[tuple[int, int]] = deque()
        self.total = 0  # sum of retained span lengths


class ThreadTimeline:
    """Reconstructed call stack and attributed self-time of one thread.

    Robustness over strictness: mismatched exits resync the stack by popping,
    unknown exits are dropped; both are counted, never fatal, because a live
    profiler must survive lossy producers.
    """

    __slots__ = (
        "thread",
        "stack",
        "last_ts",
        "entered",
        "resyncs",
        "dropped_exits",
        "_stores",
        "_lifetime",
    )

    def __init__(self, thread: ThreadId):
        self.thread = thread
        self.stack: list[tuple[MethodId, int]] = []  # (method, entered_at)
        self.last_ts: int | None = None
        self.entered: set[MethodId] = set()  # methods this thread ever entered
        self.resyncs = 0
        self.dropped_exits = 0
        self._stores: dict[MethodId, _SpanStore] = {}
        self._lifetime: dict[MethodId, int] = {}

    def apply(self, event: TraceEvent) -> None:
        """Fold one event into the timeline.

        Requires event timestamps to be non-decreasing per thread; the ingest
        layer enforces that before events reach the engine.
        """
        ts = event.timestamp
        last = self.last_ts
        stack = self.stack
        if stack and last is not None and ts > last:
            top = stack[-1][0]
            store = self._stores.get(top)
            if store is None:
                store = self._stores[top] = _SpanStore()
            store.spans.append((last, ts))
            gap = ts - last
            store.total += gap
            self._lifetime[top] = self._lifetime.get(top, 0) + gap

        method = event.method
        if event.action == _ENTER:
            stack.append((method, ts))
            self.entered.add(method)
        elif stack and stack[-1][0] == method:
            stack.pop()
        else:
            for i in range(len(stack) - 1, -1, -1):
                if stack[i][0] == method:
                    del stack[i:]
                    self.resyncs += 1
                    break
            else:
                self.dropped_exits += 1
        self.last_ts = ts

    def apply_batch(self, events: Iterable[TraceEvent]) -> None:
        apply = self.apply
        for event in events:
            apply(event)

    def intervals_for(self, method: MethodId) -> list[SelfTimeInterval]:
        """Retained closed intervals of a method (oldest first), as values."""
        store = self._stores.get(method)
        if store is None:
            return []
        return [SelfTimeInterval(method, self.thread, s, e) for s, e in store.spans]

    def self_time(self, method: MethodId, window: Window) -> int:
        """Microseconds of the window spent with this method on top of the stack.

        The still-open interval of the current stack top is treated as ending
        at the window end. Accurate for windows not older than the last prune.
        """
        ws, we = window.start_micros, window.end_micros
        total = 0
        store = self._stores.get(method)
        if store is not None:
            for start, end in store.spans:
                if start >= we:
                    break
                overlap = min(end, we) - max(start, ws)
                if overlap > 0:
                    total += overlap
        if self.stack and self.stack[-1][0] == method and self.last_ts is not None:
            open_part = we - max(ws, self.last_ts)
            if open_part > 0:
                total += open_part
        return min(total, window.length_micros)

    def prune(self, window_start: int) -> None:
        """Discard closed spans that can no longer overlap any future window."""
        dead = None
        for method, store in self._stores.items():
            spans = store.spans
            while spans and spans[0][1] <= window_start:
                start, end = spans.popleft()
                store.total -= end - start
            if not spans:
                if dead is None:
                    dead = [method]
                else:
                    dead.append(method)
        if dead:
            for method in dead:
                del self._stores[method]

    def window_self_times(self, window_start: int, window_end: int) -> dict[MethodId, int]:
        """Self time per method over [window_start, window_end], post-prune.

        Assumes spans never extend past ``window_end`` (the tick loop advances
        the window end to at least the latest ingested timestamp).
        """
        out: dict[MethodId, int] = {}
        for method, store in self._stores.items():
            spans = store.spans
            if not spans:
                continue
            total = store.total
            first = spans[0]
            if first[0] < window_start:  # only the oldest span can straddle
                total -= window_start - first[0]
            if total > 0:
                out[method] = total
        if self.stack and self.last_ts is not None:
            open_part = window_end - max(window_start, self.last_ts)
            if open_part > 0:
                top = self.stack[-1][0]
                out[top] = out.get(top, 0) + open_part
        return out

    @property
    def dormant(self) -> bool:
        return not self.stack and not self._stores

    def lifetime_self_times(self, now: int) -> dict[MethodId, int]:
        """Total attributed self time since session start, open top included."""
        totals = dict(self._lifetime)
        if self.stack and self.last_ts is not None and now > self.last_ts:
            top = self.stack[-1][0]
            totals[top] = totals.get(top, 0) + (now - self.last_ts)
        return totals


class ElevationEngine:
    """Owns all timelines; driven single-threaded by the tick loop."""

    def __init__(self, window_micros: int = 3_000_000):
        if window_micros <= 0:
            raise ValueError("window length must be positive")
        self.window_micros = window_micros
        self.threads: dict[ThreadId, ThreadTimeline] = {}
        self.now_micros = 0
        self.latest_event_micros = 0
        self._active: set[MethodId] = set()

    def timeline(self, thread: ThreadId) -> ThreadTimeline:
        timeline = self.threads.get(thread)
        if timeline is None:
            timeline = self.threads[thread] = ThreadTimeline(thread)
        return timeline

    def ingest(self, thread: ThreadId, events: Iterable[TraceEvent]) -> None:
        timeline = self.timeline(thread)
        timeline.apply_batch(events)
        if timeline.last_ts is not None and timeline.last_ts > self.latest_event_micros:
            self.latest_event_micros = timeline.last_ts

    def thread_count(self, method: MethodId) -> int:
        return sum(1 for tl in self.threads.values() if method in tl.entered)

    def elevation(self, method: MethodId, window: Window) -> ElevationRow:
        """Max-over-threads windowed elevation for one method."""
        best = 0
        for timeline in self.threads.values():
            value = timeline.self_time(method, window)
            if value > best:
                best = value
        return ElevationRow(
            method=method,
            elevation=best / window.length_micros,
            thread_count=self.thread_count(method),
        )

    def tick(
        self,
        now_micros: int,
        batches: Iterable[tuple[ThreadId, Iterable[TraceEvent]]] = (),
    ) -> list[ElevationRow]:
        """Advance the window end to ``now`` and report the current skyline.

        Returns a row for every method with positive elevation, plus a single
        0.0 row for each method whose elevation just dropped to zero so that
        clients can lower its building before it disappears from frames.
        """
        if now_micros < self.now_micros:
            raise ValueError(
                f"tick time moved backwards: {now_micros} < {self.now_micros}"
            )
        for thread, events in batches:
            self.ingest(thread, events)
        if self.latest_event_micros > now_micros:
            raise ValueError("tick time precedes already-ingested timestamps")
        self.now_micros = now_micros
        window_start = max(0, now_micros - self.window_micros)

        best: dict[MethodId, int] = {}
        for timeline in self.threads.values():
            if timeline.dormant:
                continue
            timeline.prune(window_start)
            for method, value in timeline.window_self_times(window_start, now_micros).items():
                if value > best.get(method, 0):
                    best[method] = value

        length = self.window_micros
        rows = [
            ElevationRow(method, value / length, self.thread_count(method))
            for method, value in best.items()
            if value > 0
        ]
        active = {row.method for row in rows}
        for method in self._active - active:
            rows.append(ElevationRow(method, 0.0, self.thread_count(method)))
        self._active = active
        rows.sort(key=lambda row: row.method)
        return rows

    def lifetime_self_times(self, now: int | None = None) -> dict[MethodId, int]:
        """Per-method self time summed over all threads since session start."""
        at = self.now_micros if now is None else now
        totals: dict[MethodId, int] = {}
        for timeline in self.threads.values():
            for method, value in timeline.lifetime_self_times(at).items():
                totals[method] = totals.get(method, 0) + value
        return totals

    @property
    def resyncs(self) -> int:
        return sum(tl.resyncs for tl in self.threads.values())

    @property
    def dropped_exits(self) -> int:
        return sum(tl.dropped_exits for tl in self.threads.values())
