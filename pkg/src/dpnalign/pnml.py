"""Data-aware PNML: the dialect written by ProM's data Petri net plug-ins.

Variables live in a ``<variables>`` section (``type`` attribute, ``<name>``
child, optional ``<initialValue>``). A transition carries its guard in a
``guard`` attribute (or ``<guard>`` child) where ``x'`` denotes the written
copy and plain ``x`` the read copy, and may declare ``<readVariable>`` /
``<writeVariable>`` lists. Final markings come from ``<finalmarkings>``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import IO
from xml.sax.saxutils import escape, quoteattr

from dpnalign import guards as g
from dpnalign.dpn import DPN, NetError, Transition
from dpnalign.values import Sort, SortError, format_value, parse_decimal, sort_from_name

INVISIBLE = "$invisible$"

_JAVA_TYPE = {
    Sort.BOOL: "java.lang.Boolean",
    Sort.INT: "java.lang.Integer",
    Sort.RAT: "java.lang.Double",
    Sort.STRING: "java.lang.String",
}


@dataclass
class ParseDiagnostics:
    warnings: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def warn(self, where: str, msg: str):
        self.warnings.append(f"{where}: {msg}")

    def error(self, where: str, msg: str):
        self.errors.append(f"{where}: {msg}")


class ParseError(ValueError):
    def __init__(self, diagnostics: ParseDiagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics.errors))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(elem, name: str) -> list:
    return [c for c in elem if _local(c.tag) == name]


def _child(elem, name: str):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _descendants(elem, name: str):
    return (e for e in elem.iter() if _local(e.tag) == name)


def _text(elem, default=None):
    """Text of ``<x><text>..</text></x>`` or of ``<x>..</x>``."""
    if elem is None:
        return default
    t = _child(elem, "text")
    raw = t.text if t is not None else elem.text
    return raw.strip() if raw is not None and raw.strip() else default


def _load(document) -> ET.Element:
    if isinstance(document, (bytes, str)) and not _looks_like_path(document):
        return ET.fromstring(document)
    return ET.parse(document).getroot()


def _looks_like_path(doc) -> bool:
    if isinstance(doc, bytes):
        return False
    return not doc.lstrip().startswith("<")


def _initial_value(raw: str, sort: Sort):
    if sort is Sort.BOOL:
        if raw.lower() not in ("true", "false"):
            raise SortError(f"not a boolean: {raw!r}")
        return raw.lower() == "true"
    if sort is Sort.INT:
        value = parse_decimal(raw)
        if value.denominator != 1:
            raise SortError(f"not an integer: {raw!r}")
        return int(value)
    if sort is Sort.RAT:
        return parse_decimal(raw)
    return raw


def parse_pnml(document: bytes | str | IO, *, strict_labels: bool = True) -> tuple:
    """Read a net. Returns ``(dpn, diagnostics)``; raises :class:`ParseError`.

    `document` may be XML bytes/text, a path, or a binary file object.
    """
    diag = ParseDiagnostics()
    try:
        root = _load(document)
    except ET.ParseError as exc:
        diag.error("document", f"malformed XML ({exc})")
        raise ParseError(diag) from None
    net = root if _local(root.tag) == "net" else next(_descendants(root, "net"), None)
    if net is None:
        diag.error("document", "no <net> element")
        raise ParseError(diag)
    net_name = _text(_child(net, "name"), net.get("id", "net"))

    sorts, alpha0 = {}, {}
    for var in _descendants(net, "variable"):
        name = _text(_child(var, "name"))
        where = f"variable {name or '?'}"
        if not name:
            diag.error(where, "missing <name>")
            continue
        try:
            sort = sort_from_name(var.get("type", ""))
        except SortError as exc:
            diag.error(where, str(exc))
            continue
        sorts[name] = sort
        init = _text(_child(var, "initialValue")) or var.get("initialValue")
        if init is not None:
            try:
                alpha0[name] = _initial_value(init, sort)
            except (SortError, ValueError) as exc:
                diag.error(where, f"initial value: {exc}")
    if not sorts:
        diag.warn("net", "no variables declared")

    fm = next(_descendants(net, "finalmarkings"), None)
    in_final = set(fm.iter()) if fm is not None else set()
    places, initial = [], {}
    for p in _descendants(net, "place"):
        if p in in_final:
            continue
        pid = p.get("id")
        if not pid:
            diag.error("place", "missing id attribute")
            continue
        places.append(pid)
        tokens = _text(_child(p, "initialMarking"))
        if tokens:
            try:
                initial[pid] = int(tokens)
            except ValueError:
                diag.error(f"place {pid}", f"bad initial marking {tokens!r}")

    transitions = []
    for t in _descendants(net, "transition"):
        tid = t.get("id")
        label = _text(_child(t, "name"), tid)
        where = f"transition {tid} ({label})"
        invisible = t.get("invisible", "").lower() == "true"
        for ts in _children(t, "toolspecific"):
            if ts.get("activity") == INVISIBLE:
                invisible = True
        guard_text = t.get("guard")
        if guard_text is None:
            guard_text = _text(_child(t, "guard"), "")
        try:
            guard = g.parse_guard(guard_text, sorts)
        except g.GuardError as exc:
            diag.error(where, f"guard {guard_text!r}: {exc}")
            continue
        writes = frozenset(_text(e) for e in _children(t, "writeVariable") if _text(e))
        reads = frozenset(_text(e) for e in _children(t, "readVariable") if _text(e))
        unknown = (writes | reads) - sorts.keys()
        if unknown:
            diag.error(where, f"undeclared variables {sorted(unknown)}")
            continue
        transitions.append(Transition(tid, None if invisible else label, guard, writes, reads))

    arcs = {}
    for a in _descendants(net, "arc"):
        src, dst = a.get("source"), a.get("target")
        raw = _text(_child(a, "inscription"), "1")
        try:
            weight = int(raw)
        except ValueError:
            diag.error(f"arc {a.get('id', src + '->' + dst)}", f"bad inscription {raw!r}")
            continue
        arcs[(src, dst)] = arcs.get((src, dst), 0) + weight

    final = None
    if fm is None:
        diag.error("net", "missing <finalmarkings> section")
    else:
        marking = _child(fm, "marking")
        final = {}
        for pl in _children(marking, "place") if marking is not None else ():
            count = int(_text(pl, "0"))
            if count:
                final[pl.get("idref")] = count

    if diag.errors:
        raise ParseError(diag)
    try:
        dpn = DPN(places, transitions, arcs, sorts, initial, final, alpha0,
                  strict_labels=strict_labels, name=net_name)
    except NetError as exc:
        diag.error("net", str(exc))
        raise ParseError(diag) from None
    return dpn, diag


def write_pnml(dpn: DPN) -> str:
    """Serialise in the dialect read by :func:`parse_pnml`."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>', "<pnml>",
           f'<net id={quoteattr(dpn.name)} type="http://www.pnml.org/version-2009/grammar/pnmlcoremodel">',
           f"<name><text>{escape(dpn.name)}</text></name>", '<page id="page0">']
    for p in dpn.places:
        out.append(f"<place id={quoteattr(p)}><name><text>{escape(p)}</text></name>")
        if dpn.initial_marking[p]:
            out.append(f"<initialMarking><text>{dpn.initial_marking[p]}</text></initialMarking>")
        out.append("</place>")
    for t in dpn.transitions:
        guard = "" if t.guard == g.TRUE else g.to_text(t.guard, prime_writes=True)
        attrs = f" guard={quoteattr(guard)}" if guard else ""
        out.append(f"<transition id={quoteattr(t.id)}{attrs}>")
        out.append(f"<name><text>{escape(t.label if t.label is not None else t.id)}</text></name>")
        if t.silent:
            out.append(f'<toolspecific tool="ProM" version="6.4" activity="{INVISIBLE}"/>')
        out += [f"<writeVariable>{escape(v)}</writeVariable>" for v in sorted(t.declared_writes)]
        out += [f"<readVariable>{escape(v)}</readVariable>" for v in sorted(t.declared_reads)]
        out.append("</transition>")
    n = 0
    for t in dpn.transitions:
        for src, dst, w in [(p, t.id, w) for p, w in dpn.pre[t.id].items()] + \
                           [(t.id, p, w) for p, w in dpn.post[t.id].items()]:
            out.append(f"<arc id=\"a{n}\" source={quoteattr(src)} target={quoteattr(dst)}>"
                       f"<inscription><text>{w}</text></inscription></arc>")
            n += 1
    out.append("</page>")
    out.append("<finalmarkings><marking>")
    out += [f"<place idref={quoteattr(p)}><text>{c}</text></place>" for p, c in dpn.final_marking.items()]
    out.append("</marking></finalmarkings>")
    out.append("<variables>")
    for v, s in dpn.variables.items():
        init = format_value(dpn.initial_assignment[v])
        if s is Sort.STRING:
            init = dpn.initial_assignment[v]
        out.append(f"<variable type=\"{_JAVA_TYPE[s]}\"><name>{escape(v)}</name>"
                   f"<initialValue>{escape(init)}</initialValue></variable>")
    out.append("</variables>")
    out += ["</net>", "</pnml>"]
    return "\n".join(out) + "\n"
