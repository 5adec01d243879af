"""Synthetic workload generators for demos, calibration, and regression tests.

Every scenario is a pure function of its parameters: equal parameters (and
seed) produce a byte-identical message sequence. Events are chunked into
batches of ~100 ms of simulated time per thread, mirroring how a real
instrumented producer would flush.

Scenarios:
  thread-leak      threads enter run() on every simulated restart and never
                   exit, so its building pins at 100% with a growing count
  duty-cycle       one method occupies the stack a fixed fraction of each
                   second; its elevation should settle at that fraction
  figure3          fixed four-method, six-second, single-thread trace used as
                   the canonical worked example
  refactor-before  identical method sets before/after a package re-parenting
  refactor-after   (game.* moved under main.*), same workload on both
"""

from __future__ import annotations

from .model import EventAction, TraceEvent
from .protocol import EventBatch, IngestMessage, Register, SessionMeta

SCENARIO_NAMES = (
    "thread-leak",
    "duty-cycle",
    "figure3",
    "refactor-before",
    "refactor-after",
)

BATCH_CHUNK_MICROS = 100_000

_ENTER = EventAction.ENTER
_EXIT = EventAction.EXIT


def chunk_batches(
    per_thread: dict[int, list[TraceEvent]],
    chunk_micros: int = BATCH_CHUNK_MICROS,
) -> list[EventBatch]:
    """Split per-thread event lists into time-ordered single-thread batches."""
    batches: list[EventBatch] = []
    for thread in sorted(per_thread):
        events = per_thread[thread]
        start = 0
        while start < len(events):
            chunk_end_ts = (events[start].timestamp // chunk_micros + 1) * chunk_micros
            end = start
            while end < len(events) and events[end].timestamp < chunk_end_ts:
                end += 1
            batches.append(EventBatch(thread=thread, events=tuple(events[start:end])))
            start = end
    # Interleave threads by batch start time; ties keep thread order stable.
    batches.sort(key=lambda b: (b.events[0].timestamp, b.thread))
    return batches


def build_scenario(
    name: str,
    restarts: int = 16,
    duty: float = 0.3,
    duration_micros: int | None = None,
    seed: int = 0,  # reserved; current scenarios are fully deterministic
) -> list[IngestMessage]:
    if name == "thread-leak":
        return thread_leak(restarts=restarts, duration_micros=duration_micros or 4_500_000)
    if name == "duty-cycle":
        return duty_cycle(duty=duty, duration_micros=duration_micros or 6_000_000)
    if name == "figure3":
        return figure3()
    if name == "refactor-before":
        return refactor(after=False, duration_micros=duration_micros or 5_000_000)
    if name == "refactor-after":
        return refactor(after=True, duration_micros=duration_micros or 5_000_000)
    raise ValueError(f"unknown scenario {name!r}")


def figure3() -> list[IngestMessage]:
    """Single thread, four methods, one event per second for six seconds."""
    second = 1_000_000
    registers = [
        Register(1, "main()", "Demo", ("demo",)),
        Register(2, "A()", "Demo", ("demo",)),
        Register(3, "C()", "Demo", ("demo",)),
        Register(4, "B()", "Demo", ("demo",)),
    ]
    events = [
        TraceEvent(0 * second, 1, _ENTER),
        TraceEvent(1 * second, 2, _ENTER),
        TraceEvent(2 * second, 3, _ENTER),
        TraceEvent(3 * second, 3, _EXIT),
        TraceEvent(4 * second, 2, _EXIT),
        TraceEvent(5 * second, 4, _ENTER),
        TraceEvent(6 * second, 4, _EXIT),
    ]
    meta = SessionMeta(program_name="figure3", time_origin_micros=0)
    return [meta, *registers, *chunk_batches({1: events})]


def thread_leak(
    restarts: int = 16,
    duration_micros: int = 4_500_000,
    restart_every_micros: int = 100_000,
) -> list[IngestMessage]:
    """Each simulated game restart spawns a thread stuck in run() forever.

    A clock thread runs a short tick() each 100 ms so producer time keeps
    advancing past the last restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    run_id, tick_id = 1, 2
    registers = [
        Register(run_id, "run()", "MainSinglePlayerThread", ("main",)),
        Register(tick_id, "tick()", "GameLoop", ("main",)),
    ]
    per_thread: dict[int, list[TraceEvent]] = {}
    for k in range(restarts):
        thread = k + 1
        per_thread[thread] = [TraceEvent(k * restart_every_micros, run_id, _ENTER)]
    clock_thread = restarts + 1
    clock: list[TraceEvent] = []
    for t in range(0, duration_micros, 100_000):
        clock.append(TraceEvent(t, tick_id, _ENTER))
        clock.append(TraceEvent(t + 1_000, tick_id, _EXIT))
    per_thread[clock_thread] = clock
    meta = SessionMeta(program_name="thread-leak", time_origin_micros=0)
    return [meta, *registers, *chunk_batches(per_thread)]


def duty_cycle(duty: float = 0.3, duration_micros: int = 6_000_000) -> list[IngestMessage]:
    """work() holds the stack for ``duty`` of every second on one thread."""
    if not 0.0 < duty < 1.0:
        raise ValueError("duty must be in (0, 1)")
    work_id = 1
    busy_micros = round(duty * 1_000_000)
    events: list[TraceEvent] = []
    for start in range(0, duration_micros, 1_000_000):
        events.append(TraceEvent(start, work_id, _ENTER))
        events.append(TraceEvent(start + busy_micros, work_id, _EXIT))
    meta = SessionMeta(program_name=f"duty-{duty:g}", time_origin_micros=0)
    register = Register(work_id, "work()", "Worker", ("app",))
    return [meta, register, *chunk_batches({1: events})]


# Refactor scenarios: one method table, two package mappings. Ids are shared
# so layouts and workloads line up across the before/after pair.
_REFACTOR_CLASSES: list[tuple[str, tuple[str, ...], tuple[str, ...], list[str]]] = [
    # (class, package before, package after, methods)
    ("Board", ("game",), ("main", "game"), ["update()", "render()", "clearRows()", "isFull()", "reset()"]),
    ("Game", ("game",), ("main", "game"), ["start()", "pause()", "step()", "score()", "level()", "stop()"]),
    ("Piece", ("game", "pieces"), ("main", "game", "pieces"), ["rotate()", "moveLeft()", "moveRight()", "drop()"]),
    ("PieceFactory", ("game", "pieces"), ("main", "game", "pieces"), ["next()", "peek()", "shuffle()"]),
    ("StartMenu", ("gui",), ("main", "gui"), ["show()", "hide()", "onSelect()", "render()", "focus()"]),
    ("GameGraphics", ("gui",), ("main", "gui"), ["paint()", "resize()", "redraw()", "sprite()", "flip()", "clear()"]),
    ("HighScore", ("highscore",), ("main", "highscore"), ["load()", "save()", "add()", "top()"]),
    ("Main", ("main",), ("main",), ["main()", "parseArgs()"]),
    ("MainSinglePlayerThread", ("main",), ("main",), ["run()", "interrupt()", "join()"]),
    ("Ini", ("org", "ini4j"), ("org", "ini4j"), ["load()", "store()", "get()", "put()", "remove()", "keys()", "sections()", "clear()"]),
    ("Config", ("org", "ini4j"), ("org", "ini4j"), ["read()", "write()", "merge()", "defaults()", "validate()", "path()"]),
    ("OptionMap", ("org", "ini4j"), ("org", "ini4j"), ["fetch()", "add()", "all()", "first()", "length()"]),
]


def refactor_registers(after: bool) -> list[Register]:
    registers = []
    next_id = 1
    for class_name, before_pkg, after_pkg, methods in _REFACTOR_CLASSES:
        package = after_pkg if after else before_pkg
        for method in methods:
            registers.append(Register(next_id, method, class_name, package))
            next_id += 1
    return registers


def refactor(after: bool, duration_micros: int = 5_000_000) -> list[IngestMessage]:
    """Same program before/after a package re-parenting, same workload."""
    registers = refactor_registers(after)
    by_name = {
        (reg.class_name, reg.method_name): reg.id for reg in registers
    }
    update_id = by_name[("Board", "update()")]
    paint_id = by_name[("GameGraphics", "paint()")]
    events: list[TraceEvent] = []
    for start in range(0, duration_micros, 1_000_000):
        events.append(TraceEvent(start, update_id, _ENTER))
        events.append(TraceEvent(start + 300_000, update_id, _EXIT))
        events.append(TraceEvent(start + 300_000, paint_id, _ENTER))
        events.append(TraceEvent(start + 500_000, paint_id, _EXIT))
    tag = "after" if after else "before"
    meta = SessionMeta(program_name=f"refactor-{tag}", time_origin_micros=0)
    return [meta, *registers, *chunk_batches({1: events})]
