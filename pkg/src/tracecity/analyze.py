"""Offline trace analysis: sweep a sliding window over a recorded session.

The sweep replays the trace through the same session/engine stack the live
server uses, ticking at the configured resolution, and reports each method's
peak elevation, lifetime self time, and cumulative thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .model import MethodId
from .protocol import EventBatch, read_trace_file
from .session import Session


@dataclass(frozen=True, slots=True)
class MethodReport:
    method: MethodId
    method_name: str
    class_name: str
    package_path: tuple[str, ...]
    peak_elevation: float
    total_self_micros: int
    thread_count: int


@dataclass(frozen=True)
class AnalysisReport:
    entries: tuple[MethodReport, ...]  # sorted by peak elevation, descending
    events: int
    span_micros: int
    errors: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "events": self.events,
            "span_us": self.span_micros,
            "errors": list(self.errors),
            "methods": [
                {
                    "id": e.method,
                    "method": e.method_name,
                    "class": e.class_name,
                    "package": list(e.package_path),
                    "peak_elevation": e.peak_elevation,
                    "total_self_us": e.total_self_micros,
                    "threads": e.thread_count,
                }
                for e in self.entries
            ],
        }


def analyze_trace(
    path: str | Path,
    window_micros: int = 3_000_000,
    tick_micros: int = 100_000,
    excluded_packages: tuple[tuple[str, ...], ...] = (),
) -> AnalysisReport:
    """Compute the report for one trace file.

    Corrupt lines are collected as errors (with their line numbers) rather
    than aborting, matching the live server's tolerance.
    """
    errors: list[str] = []
    session = Session(window_micros=window_micros, excluded_packages=excluded_packages)

    batches: list[EventBatch] = []
    for msg in read_trace_file(path, on_error=lambda exc: errors.append(str(exc))):
        if isinstance(msg, EventBatch):
            batches.append(msg)
        else:
            session.accept(msg)

    if not batches:
        return AnalysisReport(entries=(), events=0, span_micros=0, errors=tuple(errors))

    # Per-thread order is preserved: a stable sort on each batch's first
    # timestamp only interleaves threads, never reorders within one.
    batches.sort(key=lambda b: b.events[0].timestamp)

    start = batches[0].events[0].timestamp
    end = max(b.events[-1].timestamp for b in batches)

    peaks: dict[MethodId, float] = {}
    index = 0
    now = start
    while True:
        while index < len(batches) and batches[index].events[-1].timestamp <= now:
            session.accept(batches[index])
            index += 1
        for row in session.tick(now):
            if row.elevation > peaks.get(row.method, 0.0):
                peaks[row.method] = row.elevation
        if now >= end:
            break
        now = min(now + tick_micros, end)

    totals = session.engine.lifetime_self_times(end)
    entries = []
    for method, peak in peaks.items():
        desc = session.registry.lookup(method)
        entries.append(
            MethodReport(
                method=method,
                method_name=desc.method_name if desc else f"method#{method}",
                class_name=desc.class_name if desc else "?",
                package_path=desc.package_path if desc else (),
                peak_elevation=peak,
                total_self_micros=totals.get(method, 0),
                thread_count=session.engine.thread_count(method),
            )
        )
    entries.sort(key=lambda e: (-e.peak_elevation, e.method))
    return AnalysisReport(
        entries=tuple(entries),
        events=session.stats.events,
        span_micros=end - start,
        errors=tuple(errors),
    )


def format_table(report: AnalysisReport) -> str:
    """Aligned text rendering of a report."""
    if not report.entries:
        return "no events\n"
    headers = ("METHOD", "CLASS", "PACKAGE", "PEAK", "SELF TIME", "THREADS")
    rows = [
        (
            e.method_name,
            e.class_name,
            ".".join(e.package_path) or "(default)",
            f"{e.peak_elevation * 100:.2f}%",
            f"{e.total_self_micros / 1_000_000:.3f}s",
            str(e.thread_count),
        )
        for e in report.entries
    ]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    lines.append(
        f"\n{report.events} events over {report.span_micros / 1_000_000:.3f}s"
        + (f", {len(report.errors)} corrupt line(s) skipped" if report.errors else "")
    )
    return "\n".join(lines) + "\n"
