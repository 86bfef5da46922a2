"""Events, log traces and event logs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from dpnalign.values import Value, canonical, format_value


@dataclass(frozen=True)
class Event:
    activity: str
    assignment: Mapping[str, Value] = field(default_factory=dict)

    def key(self) -> tuple:
        return (self.activity, tuple(sorted((v, canonical(x)) for v, x in self.assignment.items())))

    def __str__(self) -> str:
        data = ", ".join(f"{v}={format_value(x)}" for v, x in sorted(self.assignment.items()))
        return f"{self.activity}({data})" if data else self.activity


@dataclass(frozen=True)
class LogTrace:
    events: tuple = ()
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, i):
        return self.events[i]

    def key(self) -> tuple:
        """Identity used for deduplication: activities and exact data values."""
        return tuple(e.key() for e in self.events)

    @property
    def activities(self) -> tuple:
        return tuple(e.activity for e in self.events)

    def __str__(self) -> str:
        return "<" + ", ".join(map(str, self.events)) + ">"


def trace(*events, id: str = "") -> LogTrace:
    """Shorthand: ``trace(("a", {"x": 2}), "b")``."""
    evs = []
    for e in events:
        if isinstance(e, Event):
            evs.append(e)
        elif isinstance(e, str):
            evs.append(Event(e))
        else:
            evs.append(Event(e[0], dict(e[1]) if len(e) > 1 else {}))
    return LogTrace(tuple(evs), id)


class EventLog:
    """A multiset of traces, kept in input order."""

    def __init__(self, traces: Iterable[LogTrace] = ()):
        self.traces = list(traces)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def multiplicity(self) -> Counter:
        return Counter(t.key() for t in self.traces)


def dedupe(log: EventLog | Iterable[LogTrace]) -> list:
    """Unique traces with their counts; the first occurrence is the representative."""
    reps: dict = {}
    counts: Counter = Counter()
    for t in log:
        k = t.key()
        reps.setdefault(k, t)
        counts[k] += 1
    return [(reps[k], counts[k]) for k in reps]
