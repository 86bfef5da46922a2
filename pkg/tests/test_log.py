from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from dpnalign.log import Event, EventLog, LogTrace, dedupe, trace


def test_trace_shorthand():
    t = trace(("a", {"x": 2}), "b", id="t1")
    assert t.activities == ("a", "b")
    assert t[0].assignment == {"x": 2} and t[1].assignment == {}
    assert str(t) == "<a(x=2), b>"


def test_keys_use_canonical_values():
    assert trace(("a", {"x": 2})).key() == trace(("a", {"x": Fraction(2)})).key()
    assert trace(("a", {"x": 1})).key() != trace(("a", {"x": True})).key()
    assert Event("a", {"x": 1, "y": 2}).key() == Event("a", {"y": 2, "x": 1}).key()


def test_dedupe_keeps_first_occurrence():
    t1, t2, t3 = trace("a", id="1"), trace("b", id="2"), trace("a", id="3")
    out = dedupe(EventLog([t1, t2, t3]))
    assert [(t.id, n) for t, n in out] == [("1", 2), ("2", 1)]


events = st.builds(
    lambda a, x: Event(a, {"x": x} if x is not None else {}),
    st.sampled_from("abc"), st.none() | st.integers(0, 2),
)
traces = st.lists(events, max_size=3).map(lambda evs: LogTrace(tuple(evs)))


@given(st.lists(traces, max_size=15))
def test_dedupe_properties(ts):
    out = dedupe(ts)
    assert sum(n for _, n in out) == len(ts)
    keys = [t.key() for t, _ in out]
    assert len(keys) == len(set(keys))
    assert set(keys) == {t.key() for t in ts}
    assert dict(zip(keys, (n for _, n in out))) == EventLog(ts).multiplicity
