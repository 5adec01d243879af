"""Pydantic models for the HTTP status API and documented stream payloads."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    program: str = ""
    rev: int = 0
    methods: int = 0
    threads: int = 0
    clients: int = 0
    producer_connected: bool = False


class DropCounters(BaseModel):
    malformed: int = 0
    out_of_order: int = 0
    excluded: int = 0
    conflicts: int = 0
    unmatched_exits: int = 0

    @property
    def total(self) -> int:
        return (
            self.malformed
            + self.out_of_order
            + self.excluded
            + self.conflicts
            + self.unmatched_exits
        )


class StatsResponse(BaseModel):
    messages: int = 0
    events: int = 0
    resyncs: int = 0
    drops: DropCounters = Field(default_factory=DropCounters)
    drops_total: int = 0
    client_resyncs: int = 0
    rev: int = 0
    now_us: int = 0
    window_ms: int = 3000
    tick_ms: int = 100


class MethodEntry(BaseModel):
    id: int
    method: str
    class_: str = Field(alias="class")
    package: list[str]

    model_config = {"populate_by_name": True}


class DistrictEntry(BaseModel):
    path: list[str]
    origin: list[int]
    extent: list[int]
    depth: int


class BlockEntry(BaseModel):
    class_: str = Field(alias="class")
    package: list[str]
    origin: list[int]
    extent: list[int]

    model_config = {"populate_by_name": True}


class LayoutGeometry(BaseModel):
    extent: list[int] = Field(default_factory=lambda: [0, 0])
    districts: list[DistrictEntry] = Field(default_factory=list)
    blocks: list[BlockEntry] = Field(default_factory=list)
    plots: list[list[int]] = Field(default_factory=list)


class StructureResponse(BaseModel):
    type: str = "structure"
    rev: int
    methods: list[MethodEntry]
    layout: LayoutGeometry


class FrameResponse(BaseModel):
    type: str = "frame"
    rev: int
    t_us: int
    rows: list[list[float]]
