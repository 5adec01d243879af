"""Ingest wire format: newline-delimited JSON, one message per line.

The same encoding is used on the producer TCP socket and in ``.trace.ndjson``
files, so record and replay are byte-level round trips. Lines are UTF-8 with
LF terminators. Event actions travel as integers (0=enter, 1=exit) to keep
batches compact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Union

from .model import (
    MAX_METHOD_ID,
    MAX_U64,
    EventAction,
    MethodDescriptor,
    MethodId,
    ThreadId,
    TraceEvent,
)


class MalformedMessage(Exception):
    """Line cannot be decoded: bad syntax, unknown type, missing or invalid field.

    Carries ``line_number`` when raised by the trace-file reader.
    """

    def __init__(self, reason: str, line_number: int | None = None):
        self.reason = reason
        self.line_number = line_number
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"{reason}{where}")


@dataclass(frozen=True, slots=True)
class Register:
    """One-time transmission of a method's identity."""

    id: MethodId
    method_name: str
    class_name: str
    package_path: tuple[str, ...]

    def descriptor(self) -> MethodDescriptor:
        return MethodDescriptor(
            id=self.id,
            method_name=self.method_name,
            class_name=self.class_name,
            package_path=self.package_path,
        )


@dataclass(frozen=True, slots=True)
class EventBatch:
    """Timestamp-sorted events of a single producer thread."""

    thread: ThreadId
    events: tuple[TraceEvent, ...]


@dataclass(frozen=True, slots=True)
class SessionMeta:
    """Leads a session or trace file; names the profiled program."""

    program_name: str
    time_origin_micros: int = 0


IngestMessage = Union[Register, EventBatch, SessionMeta]


def _require(obj: dict, key: str, kind: str) -> object:
    try:
        return obj[key]
    except KeyError:
        raise MalformedMessage(f"{kind} message missing field '{key}'") from None


def _uint(value: object, bound: int, what: str) -> int:
    # bool is an int subclass; it is never a valid count or id on the wire.
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedMessage(f"{what} must be an integer, got {value!r}")
    if value < 0:
        raise MalformedMessage(f"{what} must be non-negative, got {value}")
    if value > bound:
        raise MalformedMessage(f"{what} overflows: {value}")
    return value


def _string(value: object, what: str) -> str:
    if not isinstance(value, str):
        raise MalformedMessage(f"{what} must be a string, got {value!r}")
    return value


def decode_line(line: str) -> IngestMessage:
    """Parse one complete record. Field order in the input is irrelevant."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedMessage(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedMessage("message must be a JSON object")

    tag = obj.get("type")
    if tag == "events":
        return _decode_events(obj)
    if tag == "register":
        return _decode_register(obj)
    if tag == "meta":
        return _decode_meta(obj)
    raise MalformedMessage(f"unknown message type {tag!r}")


def _decode_register(obj: dict) -> Register:
    method_id = _uint(_require(obj, "id", "register"), MAX_METHOD_ID, "method id")
    method = _string(_require(obj, "method", "register"), "method name")
    if not method:
        raise MalformedMessage("method name must be non-empty")
    cls = _string(_require(obj, "class", "register"), "class name")
    package = _require(obj, "package", "register")
    if not isinstance(package, list):
        raise MalformedMessage("package must be a list of strings")
    path = tuple(_string(seg, "package segment") for seg in package)
    return Register(id=method_id, method_name=method, class_name=cls, package_path=path)


def _decode_events(obj: dict) -> EventBatch:
    thread = _uint(_require(obj, "thread", "events"), MAX_U64, "thread id")
    raw = _require(obj, "events", "events")
    if not isinstance(raw, list) or not raw:
        raise MalformedMessage("events must be a non-empty list")
    events = []
    previous_ts = -1
    for entry in raw:
        if not isinstance(entry, list) or len(entry) != 3:
            raise MalformedMessage(f"event must be [timestamp, id, action], got {entry!r}")
        ts = _uint(entry[0], MAX_U64, "timestamp")
        method_id = _uint(entry[1], MAX_METHOD_ID, "method id")
        action_code = _uint(entry[2], 1, "action")
        if ts < previous_ts:
            raise MalformedMessage("events must be timestamp-sorted within a message")
        previous_ts = ts
        events.append(TraceEvent(timestamp=ts, method=method_id, action=EventAction(action_code)))
    return EventBatch(thread=thread, events=tuple(events))


def _decode_meta(obj: dict) -> SessionMeta:
    program = _string(_require(obj, "program", "meta"), "program name")
    origin = _uint(obj.get("time_origin_us", 0), MAX_U64, "time origin")
    return SessionMeta(program_name=program, time_origin_micros=origin)


def encode_message(msg: IngestMessage) -> str:
    """Render one message as its canonical single-line form (no newline)."""
    if isinstance(msg, EventBatch):
        body = {
            "type": "events",
            "thread": msg.thread,
            "events": [[e.timestamp, e.method, int(e.action)] for e in msg.events],
        }
    elif isinstance(msg, Register):
        body = {
            "type": "register",
            "id": msg.id,
            "method": msg.method_name,
            "class": msg.class_name,
            "package": list(msg.package_path),
        }
    elif isinstance(msg, SessionMeta):
        body = {
            "type": "meta",
            "program": msg.program_name,
            "time_origin_us": msg.time_origin_micros,
        }
    else:
        raise TypeError(f"not an ingest message: {msg!r}")
    return json.dumps(body, separators=(",", ":"))


def write_trace_file(path: str | Path, messages: Iterable[IngestMessage]) -> int:
    """Write messages as NDJSON; returns the number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for msg in messages:
            fh.write(encode_message(msg))
            fh.write("\n")
            count += 1
    return count


def read_trace_file(
    path: str | Path,
    on_error: Callable[[MalformedMessage], None] | None = None,
) -> Iterator[IngestMessage]:
    """Stream messages from an NDJSON trace file.

    Lines are independent: a corrupt line is reported (with its 1-based line
    number) via ``on_error`` and skipped, or raised when no handler is given.
    I/O errors propagate.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield decode_line(line)
            except MalformedMessage as exc:
                located = MalformedMessage(exc.reason, line_number=line_number)
                if on_error is None:
                    raise located from None
                on_error(located)
