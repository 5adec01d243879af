import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import evs
from oracle import oracle_elevations, oracle_thread_counts, random_balanced_trace
from tracecity.engine import ElevationEngine, ThreadTimeline
from tracecity.model import Window

SECOND = 1_000_000

# Single thread, one event per second: main enters, calls A, A calls C,
# C returns, A returns, main calls B, B returns. Self times over the full
# six seconds: main 2s, A 2s, C 1s, B 1s.
DEMO_TRACE = [
    (0 * SECOND, 1, 0),  # enter main
    (1 * SECOND, 2, 0),  # enter A
    (2 * SECOND, 3, 0),  # enter C
    (3 * SECOND, 3, 1),  # exit C
    (4 * SECOND, 2, 1),  # exit A
    (5 * SECOND, 4, 0),  # enter B
    (6 * SECOND, 4, 1),  # exit B
]


def demo_timeline() -> ThreadTimeline:
    tl = ThreadTimeline(1)
    tl.apply_batch(evs(*DEMO_TRACE))
    return tl


# -- apply_event ------------------------------------------------------------


def test_enter_attributes_gap_to_previous_top():
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0), (1000, 2, 0)))  # enter main, enter A
    assert [(i.start, i.end) for i in tl.intervals_for(1)] == [(0, 1000)]
    assert [f[0] for f in tl.stack] == [1, 2]


def test_exit_attributes_to_exiting_method():
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0), (1000, 2, 0), (2000, 3, 0), (3000, 3, 1)))
    assert [(i.start, i.end) for i in tl.intervals_for(3)] == [(2000, 3000)]
    assert [f[0] for f in tl.stack] == [1, 2]


def test_mismatched_exit_resyncs_by_popping():
    tl = ThreadTimeline(1)
    # stack [main, A, C]; exit(A) must pop C then A and count one resync
    tl.apply_batch(evs((0, 1, 0), (1000, 2, 0), (2000, 3, 0), (3000, 2, 1)))
    assert [f[0] for f in tl.stack] == [1]
    assert tl.resyncs == 1
    # the gap before the exit still went to the old top, C
    assert [(i.start, i.end) for i in tl.intervals_for(3)] == [(2000, 3000)]


def test_exit_of_method_not_on_stack_is_dropped():
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0), (1000, 9, 1)))
    assert [f[0] for f in tl.stack] == [1]
    assert tl.dropped_exits == 1
    assert tl.resyncs == 0


def test_no_interval_when_stack_was_empty():
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0), (1000, 1, 1), (5000, 2, 0)))
    assert tl.intervals_for(2) == []
    assert [(i.start, i.end) for i in tl.intervals_for(1)] == [(0, 1000)]


# -- self_time ---------------------------------------------------------------


def test_demo_trace_self_times_full_window():
    tl = demo_timeline()
    w = Window(length_micros=6 * SECOND, end_micros=6 * SECOND)
    assert tl.self_time(2, w) == 2 * SECOND  # (t2-t1) + (t4-t3)
    assert tl.self_time(3, w) == 1 * SECOND
    assert tl.self_time(1, w) == 2 * SECOND
    assert tl.self_time(4, w) == 1 * SECOND


def test_open_interval_clips_to_window():
    # entered 10s before the window, never exited: the whole window is theirs
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0)))
    w = Window(length_micros=3 * SECOND, end_micros=13 * SECOND)
    assert tl.self_time(1, w) == 3 * SECOND


def test_self_time_never_exceeds_window_length():
    tl = ThreadTimeline(1)
    tl.apply_batch(evs((0, 1, 0)))
    w = Window(length_micros=2 * SECOND, end_micros=100 * SECOND)
    assert tl.self_time(1, w) == 2 * SECOND


# -- elevation ----------------------------------------------------------------


def test_demo_trace_elevations():
    engine = ElevationEngine(window_micros=6 * SECOND)
    engine.ingest(1, evs(*DEMO_TRACE))
    w = Window(length_micros=6 * SECOND, end_micros=6 * SECOND)
    assert engine.elevation(2, w).elevation == pytest.approx(2 / 6, abs=1e-12)
    assert engine.elevation(3, w).elevation == pytest.approx(1 / 6, abs=1e-12)


def test_elevation_is_max_over_threads():
    engine = ElevationEngine(window_micros=3 * SECOND)
    engine.ingest(1, evs((0, 1, 0), (1_500_000, 1, 1)))
    engine.ingest(2, evs((0, 1, 0), (900_000, 1, 1)))
    w = Window(length_micros=3 * SECOND, end_micros=3 * SECOND)
    row = engine.elevation(1, w)
    assert row.elevation == pytest.approx(0.5, abs=1e-12)
    assert row.thread_count == 2


def test_never_exiting_method_pins_at_full_elevation():
    engine = ElevationEngine(window_micros=3 * SECOND)
    engine.ingest(1, evs((0, 1, 0)))
    for end in (3 * SECOND, 5 * SECOND, 60 * SECOND):
        w = Window(length_micros=3 * SECOND, end_micros=end)
        assert engine.elevation(1, w).elevation == 1.0


# -- tick ---------------------------------------------------------------------


def test_tick_with_no_events_is_empty():
    engine = ElevationEngine()
    assert engine.tick(1_000_000) == []


def test_demo_trace_tick_rows_sum_to_one():
    engine = ElevationEngine(window_micros=6 * SECOND)
    rows = engine.tick(6 * SECOND, [(1, evs(*DEMO_TRACE))])
    by_method = {r.method: r.elevation for r in rows}
    assert by_method[1] == pytest.approx(2 / 6, abs=1e-12)
    assert by_method[2] == pytest.approx(2 / 6, abs=1e-12)
    assert by_method[3] == pytest.approx(1 / 6, abs=1e-12)
    assert by_method[4] == pytest.approx(1 / 6, abs=1e-12)
    # the stack was never empty, so the thread's rows account for the window
    assert sum(by_method.values()) == pytest.approx(1.0, abs=1e-9)
    assert [r.method for r in rows] == sorted(by_method)


def test_methods_leaving_the_window_report_zero_once_then_disappear():
    engine = ElevationEngine(window_micros=1 * SECOND)
    rows = engine.tick(1 * SECOND, [(1, evs((0, 1, 0), (500_000, 1, 1)))])
    assert [(r.method, r.elevation > 0) for r in rows] == [(1, True)]
    rows = engine.tick(2 * SECOND)  # activity now fully outside the window
    assert [(r.method, r.elevation) for r in rows] == [(1, 0.0)]
    assert engine.tick(3 * SECOND) == []


def test_tick_rejects_time_moving_backwards():
    engine = ElevationEngine()
    engine.tick(5_000_000)
    with pytest.raises(ValueError):
        engine.tick(4_000_000)


def test_tick_prunes_stale_intervals():
    engine = ElevationEngine(window_micros=1 * SECOND)
    events = []
    ts = 0
    for _ in range(1000):
        events.append((ts, 1, 0))
        events.append((ts + 100, 1, 1))
        ts += 1000
    engine.tick(ts, [(1, evs(*events))])
    engine.tick(ts + 10 * SECOND)
    store = engine.threads[1]._stores
    assert not store  # everything fell out of the window


# -- oracle equivalence and properties ----------------------------------------


def _engine_rows_to_elevations(rows):
    return {r.method: r.elevation for r in rows if r.elevation > 0}


@pytest.mark.parametrize("seed", range(25))
def test_engine_matches_brute_force_oracle(seed):
    rng = random.Random(seed)
    per_thread = random_balanced_trace(rng, max_events=400)
    window_len = rng.randint(100_000, 5 * SECOND)
    end = max(e[0] for events in per_thread.values() for e in events)
    mid = rng.randint(0, end)

    engine = ElevationEngine(window_micros=window_len)
    early = {
        t: [e for e in events if e[0] <= mid] for t, events in per_thread.items()
    }
    engine.tick(mid, [(t, evs(*events)) for t, events in early.items() if events])
    got_mid = _engine_rows_to_elevations(engine.tick(mid))
    want_mid = {
        m: v for m, v in oracle_elevations(early, mid, window_len).items() if v > 0
    }
    assert got_mid.keys() == want_mid.keys()
    for method, want in want_mid.items():
        assert got_mid[method] == pytest.approx(want, rel=1e-9)

    late = {
        t: [e for e in events if e[0] > mid] for t, events in per_thread.items()
    }
    rows = engine.tick(end, [(t, evs(*events)) for t, events in late.items() if events])
    got = _engine_rows_to_elevations(rows)
    want = {m: v for m, v in oracle_elevations(per_thread, end, window_len).items() if v > 0}
    assert got.keys() == want.keys()
    for method, value in want.items():
        assert got[method] == pytest.approx(value, rel=1e-9)

    counts = oracle_thread_counts(per_thread)
    for row in rows:
        assert row.thread_count == counts.get(row.method, 0)


@given(st.integers(0, 10**6), st.data())
@settings(max_examples=60, deadline=None)
def test_window_shift_invariance(shift, data):
    rng = random.Random(data.draw(st.integers(0, 2**32)))
    per_thread = random_balanced_trace(rng, max_threads=3, max_events=60)
    window_len = rng.randint(100_000, 2 * SECOND)
    end = max(e[0] for events in per_thread.values() for e in events)

    base = ElevationEngine(window_micros=window_len)
    base.tick(end, [(t, evs(*events)) for t, events in per_thread.items()])
    moved = ElevationEngine(window_micros=window_len)
    shifted = {
        t: [(ts + shift, m, a) for ts, m, a in events]
        for t, events in per_thread.items()
    }
    moved.tick(end + shift, [(t, evs(*events)) for t, events in shifted.items()])

    a = _engine_rows_to_elevations(base.tick(end))
    b = _engine_rows_to_elevations(moved.tick(end + shift))
    assert a == b


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_per_thread_elevations_sum_to_at_most_one(data):
    rng = random.Random(data.draw(st.integers(0, 2**32)))
    per_thread = random_balanced_trace(rng, max_threads=1, max_events=80)
    window_len = rng.randint(100_000, 2 * SECOND)
    end = max(e[0] for events in per_thread.values() for e in events)
    engine = ElevationEngine(window_micros=window_len)
    rows = engine.tick(end, [(t, evs(*events)) for t, events in per_thread.items()])
    assert sum(r.elevation for r in rows) <= 1.0 + 1e-9
    for row in rows:
        assert 0.0 <= row.elevation <= 1.0


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_thread_self_times_cover_busy_window_exactly(data):
    """Per thread, summed self time equals the window time with a non-empty stack."""
    rng = random.Random(data.draw(st.integers(0, 2**32)))
    per_thread = random_balanced_trace(rng, max_threads=1, max_events=80)
    [(thread, events)] = per_thread.items()
    window_len = rng.randint(100_000, 2 * SECOND)
    end = max(e[0] for e in events)
    window_start = max(0, end - window_len)

    # busy time = union of (gap between consecutive events while stack non-empty)
    busy = 0
    stack = 0
    last = None
    for ts, _m, action in events:
        if stack and last is not None:
            lo, hi = max(last, window_start), min(ts, end)
            if hi > lo:
                busy += hi - lo
        stack += 1 if action == 0 else -1
        last = ts

    engine = ElevationEngine(window_micros=window_len)
    rows = engine.tick(end, [(thread, evs(*events))])
    total = round(sum(r.elevation for r in rows) * window_len)
    assert total == busy


def test_thread_count_is_cumulative_and_monotone():
    engine = ElevationEngine(window_micros=1 * SECOND)
    counts = []
    for k in range(5):
        engine.tick(k * 10 * SECOND, [(k, evs((k * 10 * SECOND, 1, 0)))])
        counts.append(engine.thread_count(1))
    assert counts == [1, 2, 3, 4, 5]
    # threads went dormant long ago but their contribution persists
    engine.tick(100 * SECOND)
    assert engine.thread_count(1) == 5
