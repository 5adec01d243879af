"""tracecity: real-time profiling server streaming a live software-city model.

Instrumented producers push method enter/exit events over TCP; the engine
reconstructs per-thread call stacks, attributes sliding-window self time, and
streams a city of fluctuating buildings (one per method) to interactive
clients over WebSocket.
"""

from .engine import ElevationEngine, ElevationRow, SelfTimeInterval, ThreadTimeline
from .layout import CityLayout, EmptyRegistry, StructureDelta, build_layout, diff_layout
from .model import (
    ConflictingRegistration,
    EventAction,
    MethodDescriptor,
    MethodRegistry,
    TraceEvent,
    Window,
)
from .protocol import (
    EventBatch,
    MalformedMessage,
    Register,
    SessionMeta,
    decode_line,
    encode_message,
    read_trace_file,
    write_trace_file,
)
from .session import OutOfOrderBatch, Session

__version__ = "0.1.0"

__all__ = [
    "CityLayout",
    "ConflictingRegistration",
    "ElevationEngine",
    "ElevationRow",
    "EmptyRegistry",
    "EventAction",
    "EventBatch",
    "MalformedMessage",
    "MethodDescriptor",
    "MethodRegistry",
    "OutOfOrderBatch",
    "Register",
    "SelfTimeInterval",
    "Session",
    "SessionMeta",
    "StructureDelta",
    "ThreadTimeline",
    "TraceEvent",
    "Window",
    "build_layout",
    "decode_line",
    "diff_layout",
    "encode_message",
    "read_trace_file",
    "write_trace_file",
    "__version__",
]
