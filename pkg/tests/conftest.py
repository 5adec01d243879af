import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from tracecity.model import EventAction, TraceEvent
from tracecity.protocol import EventBatch
from tracecity.session import Session


def ev(ts: int, method: int, action: int) -> TraceEvent:
    return TraceEvent(timestamp=ts, method=method, action=EventAction(action))


def evs(*triples: tuple[int, int, int]) -> list[TraceEvent]:
    return [ev(*t) for t in triples]


def sweep(messages, nows, session: Session | None = None):
    """Tick a session across ``nows``, feeding batches as producer time reaches them."""
    session = session or Session()
    batches = []
    for msg in messages:
        if isinstance(msg, EventBatch):
            batches.append(msg)
        else:
            session.accept(msg)
    batches.sort(key=lambda b: b.events[0].timestamp)
    index = 0
    for now in nows:
        while index < len(batches) and batches[index].events[-1].timestamp <= now:
            session.accept(batches[index])
            index += 1
        yield now, session.tick(now), session
