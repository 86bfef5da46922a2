from fractions import Fraction
from pathlib import Path

import pytest

from dpnalign.dpn import DPN, Transition
from dpnalign.log import EventLog, dedupe, trace
from dpnalign.pnml import ParseError, parse_pnml
from dpnalign.values import Sort
from dpnalign.xes import parse_xes, write_xes

DATA = Path(__file__).parent / "data"
NET = DPN(["p"], [Transition("t", "t")], {},
          {"i": Sort.INT, "r": Sort.RAT, "b": Sort.BOOL, "s": Sort.STRING})


def _log(events):
    return f'<log><trace><string key="concept:name" value="t1"/>{events}</trace></log>'


def test_running_log():
    net, _ = parse_pnml(DATA / "running.pnml", strict_labels=False)
    log, diag = parse_xes(DATA / "running.xes", net)
    assert [t.id for t in log] == ["e1", "e2", "e3", "e4", "e1-again"]
    assert diag.warnings == ["attribute org:resource: not a net variable; ignored"]
    assert len(dedupe(log)) == 4


def test_typed_attributes():
    log, _ = parse_xes(_log('<event><string key="concept:name" value="t"/><int key="i" value="3"/>'
                            '<float key="r" value="0.1"/><boolean key="b" value="true"/>'
                            '<string key="s" value="x y"/></event>'), NET)
    e = next(iter(log))[0]
    assert e.assignment == {"i": 3, "r": Fraction(1, 10), "b": True, "s": "x y"}


def test_int_attribute_feeds_rational_variable():
    log, _ = parse_xes(_log('<event><string key="concept:name" value="t"/><int key="r" value="2"/></event>'), NET)
    assert next(iter(log))[0].assignment["r"] == Fraction(2)


def test_empty_log():
    log, diag = parse_xes("<log/>", NET)
    assert len(log) == 0 and diag.ok


def test_sort_mismatch_names_the_event():
    with pytest.raises(ParseError) as err:
        parse_xes(_log('<event><string key="concept:name" value="t"/><float key="i" value="1.5"/></event>'), NET)
    assert "trace t1, event 1" in str(err.value)


def test_missing_activity():
    with pytest.raises(ParseError):
        parse_xes(_log('<event><int key="i" value="1"/></event>'), NET)


def test_round_trip():
    log = EventLog([trace(("t", {"i": -2, "r": Fraction(5, 4), "b": False, "s": "<&>"}), "t", id="x")])
    back, _ = parse_xes(write_xes(log), NET)
    assert [t.key() for t in back] == [t.key() for t in log]
