"""Shared factories for building consistent sessions and events in tests."""

from __future__ import annotations

from logcompass.events import LogEvent, Session


def make_events(spec):
    """spec: iterable of (ts_seconds, user, item[, tag]) tuples."""
    out = []
    for row in spec:
        t, u, i = row[:3]
        tag = row[3] if len(row) > 3 else None
        out.append(LogEvent(int(t * 1000), u, i, tag))
    return out


def make_session(session_id: int, k: int, user: str = "u1", start_s: int = 0) -> Session:
    events = tuple(
        LogEvent((start_s + j) * 1000, user, f"item{j}") for j in range(k)
    )
    return Session(
        session_id=session_id,
        user_hash=user,
        events=events,
        start_ms=start_s * 1000,
        end_ms=(start_s + k - 1) * 1000,
        k_items=k,
    )
