"""Client-facing messages: per-tick frames and self-contained structure snapshots.

Frames are idempotent snapshots: a client may skip any prefix and render
correctly from the latest one. Elevations travel rounded half-to-even to four
decimals; world-space height scaling is a client concern.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal

from .engine import ElevationRow
from .layout import CityLayout
from .model import MethodRegistry

PROTOCOL_VERSION = 1


def round_elevation(value: float) -> float:
    """Round to 4 decimals, ties to even (0.33335 -> 0.3334)."""
    return float(Decimal(repr(value)).quantize(Decimal("0.0001"), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True, slots=True)
class Frame:
    """One tick's elevations for every method worth drawing."""

    rev: int
    t_micros: int
    rows: tuple[tuple[int, float, int], ...]  # (method id, elevation, thread count)

    def to_wire(self) -> dict:
        return {
            "type": "frame",
            "rev": self.rev,
            "t_us": self.t_micros,
            "rows": [list(row) for row in self.rows],
        }


def compose_frame(rows: list[ElevationRow], rev: int, t_micros: int) -> Frame:
    wire_rows = tuple(
        (row.method, round_elevation(row.elevation), row.thread_count)
        for row in sorted(rows, key=lambda r: r.method)
    )
    return Frame(rev=rev, t_micros=t_micros, rows=wire_rows)


def hello_message(window_micros: int, tick_micros: int) -> dict:
    return {
        "type": "hello",
        "version": PROTOCOL_VERSION,
        "window_ms": window_micros // 1000,
        "tick_ms": tick_micros // 1000,
    }


def structure_message(rev: int, registry: MethodRegistry, layout: CityLayout | None) -> dict:
    """Full method table plus geometry; a client can render from this alone."""
    methods = [
        {
            "id": desc.id,
            "method": desc.method_name,
            "class": desc.class_name,
            "package": list(desc.package_path),
        }
        for desc in registry.descriptors()
    ]
    if layout is None:
        geometry = {"extent": [0, 0], "districts": [], "blocks": [], "plots": []}
    else:
        geometry = {
            "extent": list(layout.extent),
            "districts": [
                {
                    "path": list(d.package_path),
                    "origin": list(d.origin),
                    "extent": list(d.extent),
                    "depth": d.depth,
                }
                for d in layout.districts
            ],
            "blocks": [
                {
                    "class": b.class_name,
                    "package": list(b.package_path),
                    "origin": list(b.origin),
                    "extent": list(b.extent),
                }
                for b in layout.blocks
            ],
            "plots": [[mid, p.x, p.z] for mid, p in sorted(layout.index.items())],
        }
    return {"type": "structure", "rev": rev, "methods": methods, "layout": geometry}
