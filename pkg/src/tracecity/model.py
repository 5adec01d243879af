"""Shared domain vocabulary: trace events, method identity, program structure.

Timestamps throughout are producer-supplied microseconds from a monotonic
source. The engine never mixes them with its own wall clock, so replay and
simulation are bit-reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

MethodId = int  # unsigned 32-bit, unique within a session, never reused
ThreadId = int  # unsigned 64-bit, unique per producer thread within a session

MAX_METHOD_ID = 2**32 - 1
MAX_U64 = 2**64 - 1


class EventAction(enum.IntEnum):
    """Wire encoding: 0 on method entry, 1 on method exit.

    Exceptional returns count as exits too; the producer is expected to emit
    an exit event on any control transfer out of the method.
    """

    ENTER = 0
    EXIT = 1


@dataclass(frozen=True, slots=True)
class MethodDescriptor:
    """Identity and structural placement of one method.

    ``package_path`` is a tuple of segments, outermost first; the default
    package is the empty tuple. Keeping it structural (not a dotted string)
    means sub-package nesting never depends on ad-hoc parsing.
    """

    id: MethodId
    method_name: str  # signature text, e.g. "run()"; opaque, non-empty
    class_name: str
    package_path: tuple[str, ...] = ()
    placeholder: bool = False  # auto-registered stand-in, replaceable

    def __post_init__(self) -> None:
        if not self.method_name:
            raise ValueError("method_name must be non-empty")
        if not 0 <= self.id <= MAX_METHOD_ID:
            raise ValueError(f"method id {self.id} outside unsigned 32-bit range")

    @property
    def structural_key(self) -> tuple[tuple[str, ...], str, str]:
        return (self.package_path, self.class_name, self.method_name)


def placeholder_descriptor(method_id: MethodId) -> MethodDescriptor:
    """Stand-in for an id seen in events before its registration arrived."""
    return MethodDescriptor(
        id=method_id,
        method_name=f"method#{method_id}",
        class_name="?",
        package_path=(),
        placeholder=True,
    )


@dataclass(frozen=True, slots=True)
class TraceEvent:
    """One timestamped enter/exit record for a method on a thread."""

    timestamp: int  # microseconds, non-decreasing within one thread's stream
    method: MethodId
    action: EventAction


@dataclass(frozen=True, slots=True)
class Window:
    """The sliding time frame of interest, covering [end - length, end]."""

    length_micros: int = 3_000_000
    end_micros: int = 0

    def __post_init__(self) -> None:
        if self.length_micros <= 0:
            raise ValueError("window length must be positive")

    @property
    def start_micros(self) -> int:
        # Timestamps are unsigned; a window reaching before the origin clips at 0.
        return max(0, self.end_micros - self.length_micros)


class ConflictingRegistration(Exception):
    """An id or structural name is already bound to a different method."""


@dataclass
class MethodRegistry:
    """All known methods of the session, keyed by id.

    Single-writer/multi-reader: the ingest side owns mutation, readers see a
    consistent snapshot. ``version`` increments on every accepted change so
    downstream layout rebuilds can cheaply detect staleness.
    """

    _by_id: dict[MethodId, MethodDescriptor] = field(default_factory=dict)
    _by_key: dict[tuple[tuple[str, ...], str, str], MethodId] = field(default_factory=dict)
    version: int = 0

    def register(self, desc: MethodDescriptor) -> None:
        """Store a descriptor.

        Re-registering identical content is a no-op. A real descriptor
        replaces a placeholder for the same id (late registration). Anything
        else that would rebind an id or reuse a structural name raises
        ConflictingRegistration.
        """
        existing = self._by_id.get(desc.id)
        if existing is not None:
            if existing == desc:
                return
            if not existing.placeholder:
                raise ConflictingRegistration(
                    f"id {desc.id} already bound to {existing.structural_key}"
                )
        owner = self._by_key.get(desc.structural_key)
        if owner is not None and owner != desc.id:
            raise ConflictingRegistration(
                f"{desc.structural_key} already registered under id {owner}"
            )
        if existing is not None:
            # Placeholder upgrade: same id keeps its attributed time.
            del self._by_key[existing.structural_key]
        self._by_id[desc.id] = desc
        self._by_key[desc.structural_key] = desc.id
        self.version += 1

    def lookup(self, method_id: MethodId) -> MethodDescriptor | None:
        return self._by_id.get(method_id)

    def __contains__(self, method_id: MethodId) -> bool:
        return method_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def descriptors(self) -> list[MethodDescriptor]:
        """Snapshot of all descriptors, ordered by id for determinism."""
        return [self._by_id[i] for i in sorted(self._by_id)]
