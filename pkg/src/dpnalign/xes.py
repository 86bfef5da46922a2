"""XES event logs, read against the variables of a net."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from decimal import Decimal, localcontext
from typing import IO
from xml.sax.saxutils import quoteattr

from dpnalign.dpn import DPN
from dpnalign.log import Event, EventLog, LogTrace
from dpnalign.pnml import ParseDiagnostics, ParseError, _load, _local
from dpnalign.values import Sort, parse_decimal

NAME_KEY = "concept:name"


def _typed(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return parse_decimal(raw)
    if kind == "boolean":
        if raw.strip().lower() not in ("true", "false"):
            raise ValueError(f"not a boolean: {raw!r}")
        return raw.strip().lower() == "true"
    return raw


def _attributes(elem) -> dict:
    """Top-level typed attributes of an element: key -> (xes type, raw text)."""
    return {a.get("key"): (_local(a.tag), a.get("value", "")) for a in elem if a.get("key") is not None}


def parse_xes(document: bytes | str | IO, dpn: DPN) -> tuple:
    """Read a log. Returns ``(EventLog, diagnostics)``; raises :class:`ParseError`.

    Event attributes named like a net variable become event data; integer
    attributes may feed rational variables. Other attributes are ignored (one
    warning per attribute key).
    """
    diag = ParseDiagnostics()
    try:
        root = _load(document)
    except ET.ParseError as exc:
        diag.error("document", f"malformed XML ({exc})")
        raise ParseError(diag) from None
    ignored = set()
    traces = []
    for k, t in enumerate(e for e in root.iter() if _local(e.tag) == "trace"):
        tattrs = _attributes(t)
        tid = tattrs.get(NAME_KEY, (None, str(k)))[1]
        events = []
        for j, ev in enumerate(e for e in t if _local(e.tag) == "event"):
            attrs = _attributes(ev)
            where = f"trace {tid}, event {j + 1}"
            if NAME_KEY not in attrs:
                diag.error(where, f"missing {NAME_KEY}")
                continue
            activity = attrs.pop(NAME_KEY)[1]
            data = {}
            for key, (kind, raw) in attrs.items():
                sort = dpn.variables.get(key)
                if sort is None:
                    if key not in ignored:
                        ignored.add(key)
                        diag.warn(f"attribute {key}", "not a net variable; ignored")
                    continue
                try:
                    value = _typed(kind, raw)
                except ValueError as exc:
                    diag.error(where, f"attribute {key}: {exc}")
                    continue
                expected = {"int": (Sort.INT, Sort.RAT), "float": (Sort.RAT,), "boolean": (Sort.BOOL,),
                            "string": (Sort.STRING,)}.get(kind, ())
                if sort not in expected:
                    diag.error(where, f"attribute {key} of type {kind} does not fit variable sort {sort.name.lower()}")
                    continue
                data[key] = sort.coerce(value)
            events.append(Event(activity, data))
        traces.append(LogTrace(tuple(events), tid))
    if diag.errors:
        raise ParseError(diag)
    return EventLog(traces), diag


def write_xes(log) -> str:
    """Minimal XES serialisation of traces with their event data."""
    def attr(key, value) -> str:
        if isinstance(value, bool):
            return f"<boolean key={quoteattr(key)} value=\"{'true' if value else 'false'}\"/>"
        if isinstance(value, int):
            return f"<int key={quoteattr(key)} value=\"{value}\"/>"
        if not isinstance(value, str):
            # exact rationals are written as decimals when they terminate
            with localcontext() as ctx:
                ctx.prec = 50
                text = str(Decimal(value.numerator) / Decimal(value.denominator))
            return f"<float key={quoteattr(key)} value=\"{text}\"/>"
        return f"<string key={quoteattr(key)} value={quoteattr(value)}/>"

    out = ['<?xml version="1.0" encoding="UTF-8"?>', '<log xes.version="1.0">']
    for t in log:
        out.append("<trace>" + attr(NAME_KEY, t.id))
        for e in t:
            out.append("<event>" + attr(NAME_KEY, e.activity)
                       + "".join(attr(k, v) for k, v in sorted(e.assignment.items())) + "</event>")
        out.append("</trace>")
    out.append("</log>")
    return "\n".join(out) + "\n"
