import pytest

from conftest import evs
from tracecity.model import EventAction, TraceEvent
from tracecity.protocol import EventBatch, Register, SessionMeta
from tracecity.session import OutOfOrderBatch, Session, parse_exclude_flag


def batch(thread, *triples):
    return EventBatch(thread=thread, events=tuple(evs(*triples)))


def test_events_for_unregistered_id_create_placeholder():
    session = Session()
    session.accept_events(batch(1, (0, 7, 0)))
    assert session.registry.lookup(7).method_name == "method#7"
    pending = session.drain_pending()
    assert pending == [(1, tuple(evs((0, 7, 0))))]


def test_excluded_package_events_are_counted_and_discarded():
    session = Session(excluded_packages=(("org", "ini4j"),))
    session.accept(Register(5, "load()", "Ini", ("org", "ini4j", "impl")))
    accepted = session.accept_events(batch(1, (0, 5, 0), (10, 5, 1)))
    assert accepted == 0
    assert session.stats.dropped_excluded == 2
    assert session.drain_pending() == []
    # excluded methods never reach the engine
    assert session.tick(1_000_000) == []


def test_exclusion_is_prefix_scoped():
    session = Session(excluded_packages=(("org", "ini4j"),))
    session.accept(Register(5, "x()", "Other", ("org", "inixx")))
    assert session.accept_events(batch(1, (0, 5, 0))) == 1


def test_out_of_order_batch_dropped_and_counted():
    session = Session()
    session.accept_events(batch(1, (900, 1, 0)))
    with pytest.raises(OutOfOrderBatch):
        session.accept_events(batch(1, (500, 1, 1)))
    assert session.stats.dropped_out_of_order == 1
    # the earlier-accepted events are still there; nothing was reordered
    assert len(session.drain_pending()) == 1


def test_fully_excluded_batch_still_advances_last_seen():
    session = Session(excluded_packages=(("noisy",),))
    session.accept(Register(5, "spam()", "Noise", ("noisy",)))
    session.accept_events(batch(1, (900, 5, 0)))  # all filtered, but seen
    with pytest.raises(OutOfOrderBatch):
        session.accept_events(batch(1, (100, 5, 1)))


def test_out_of_order_is_per_thread():
    session = Session()
    session.accept_events(batch(1, (900, 1, 0)))
    session.accept_events(batch(2, (100, 1, 0)))  # other thread: fine
    assert session.stats.dropped_out_of_order == 0


def test_conflicting_registration_is_counted_not_fatal():
    session = Session()
    session.accept(Register(7, "run()", "C", ("p",)))
    session.accept(Register(7, "stop()", "C", ("p",)))
    assert session.stats.dropped_conflicts == 1
    assert session.registry.lookup(7).method_name == "run()"


def test_meta_sets_program_name():
    session = Session()
    session.accept(SessionMeta("tetris", 1234))
    assert session.program_name == "tetris"
    assert session.time_origin_micros == 1234


def test_late_registration_replaces_placeholder_and_keeps_time():
    session = Session(window_micros=1_000_000)
    session.accept_events(batch(1, (0, 7, 0)))
    session.tick(500_000)
    session.accept(Register(7, "run()", "Main", ("main",)))
    row = [r for r in session.tick(1_000_000) if r.method == 7]
    assert row and row[0].elevation == 1.0  # attributed time survived
    assert session.registry.lookup(7).method_name == "run()"


def test_late_registration_into_excluded_package_filters_future_events():
    session = Session(excluded_packages=(("noisy",),))
    session.accept_events(batch(1, (0, 7, 0)))  # placeholder, not excluded yet
    session.accept(Register(7, "spam()", "Noise", ("noisy",)))
    assert session.accept_events(batch(1, (100, 7, 1))) == 0
    assert session.stats.dropped_excluded == 1


def test_parse_exclude_flag():
    assert parse_exclude_flag("org.ini4j") == ("org", "ini4j")
    assert parse_exclude_flag("main") == ("main",)
    with pytest.raises(ValueError):
        parse_exclude_flag("")


def test_stats_totals():
    session = Session()
    session.accept(Register(1, "a()", "A", ()))
    session.accept(batch(1, (0, 1, 0), (50, 1, 1)))
    assert session.stats.messages == 2
    assert session.stats.events == 2
    assert session.stats.drops == 0
