"""Trace equivalence up to constant comparison, and log partitioning.

A variable is *restricted* when every guard atom mentioning it compares it
with a constant. Values of such a variable only matter through the set of
those atoms they satisfy, so traces whose events agree on activities, on the
values of unrestricted variables and on the atom truth vectors of restricted
ones have the same optimal alignment cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from dpnalign import guards as g
from dpnalign.dpn import DPN
from dpnalign.log import LogTrace
from dpnalign.values import Value, canonical, format_value

# x < k is the negation of x >= k, and so on: same region structure
_BASE = {">=": ">=", ">": ">", "=": "=", "<": ">=", "<=": ">", "!=": "="}


@dataclass(frozen=True)
class Atom:
    var: str
    op: str
    const: Value

    @property
    def base(self) -> tuple:
        return (_BASE[self.op], self.const)

    def holds(self, value: Value) -> bool:
        try:
            return g.compare(self.op, value, self.const)
        except TypeError:
            return False

    def __str__(self) -> str:
        return f"{self.var} {self.op} {format_value(self.const)}"


@dataclass(frozen=True)
class AtomSet:
    ats: Mapping[str, frozenset]
    restricted: frozenset

    def base_atoms(self, var: str) -> tuple:
        """Normalised ``(op, k)`` predicates over which truth vectors are taken."""
        bases = {a.base for a in self.ats.get(var, ())}
        return tuple(sorted(bases, key=lambda b: (b[0], canonical(b[1]))))

    def bits(self, var: str, value: Value) -> tuple:
        out = []
        for op, k in self.base_atoms(var):
            try:
                out.append(g.compare(op, value, k))
            except TypeError:
                out.append(False)
        return tuple(out)


def _constant(expr: g.Expr):
    """Value of a variable-free term, or None."""
    if g.annotated_vars(expr):
        return None
    try:
        return g.evaluate(expr, {})
    except (g.GuardError, TypeError):
        return None


def _classify(atom) -> tuple:
    """(Atom or None, variables of the atom)."""
    names = {n for n, _ in g.annotated_vars(atom)}
    if isinstance(atom, g.Var):
        return Atom(atom.name, "=", True), names
    if not isinstance(atom, g.Cmp):
        return None, names
    left, right = atom.left, atom.right
    if isinstance(left, g.Var):
        k = _constant(right)
        if k is not None:
            return Atom(left.name, atom.op, k), names
    if isinstance(right, g.Var):
        k = _constant(left)
        if k is not None:
            return Atom(right.name, g.FLIPPED[atom.op], k), names
    return None, names


def extract_atoms(dpn: DPN) -> AtomSet:
    found: dict = {v: set() for v in dpn.variables}
    unrestricted = set()
    for guard in dpn.guards:
        for atom in g.atoms(guard):
            vc, names = _classify(atom)
            if vc is None:
                unrestricted |= names
            else:
                found.setdefault(vc.var, set()).add(vc)
    restricted = frozenset(v for v in dpn.variables if v not in unrestricted)
    return AtomSet({v: frozenset(found[v]) for v in restricted}, restricted)


def value_equiv(u1: Value, u2: Value, ats_v: Iterable[Atom]) -> bool:
    return all(a.holds(u1) == a.holds(u2) for a in ats_v)


def signature(trace: LogTrace, atoms: AtomSet) -> tuple:
    sig = []
    for e in trace:
        tokens = []
        for v, value in sorted(e.assignment.items()):
            if v in atoms.restricted:
                tokens.append((v, "cc", atoms.bits(v, value)))
            else:
                tokens.append((v, "eq", canonical(value)))
        sig.append((e.activity, tuple(tokens)))
    return tuple(sig)


def equivalent(t1: LogTrace, t2: LogTrace, atoms: AtomSet) -> bool:
    return signature(t1, atoms) == signature(t2, atoms)


@dataclass
class Cluster:
    representative: LogTrace
    members: list = field(default_factory=list)
    counts: list = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return sum(self.counts)

    @property
    def member_ids(self) -> list:
        return [t.id for t in self.members]


@dataclass
class Clustering:
    clusters: list

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)


def cluster_log(traces: Iterable, atoms: AtomSet) -> Clustering:
    """Partition unique traces by signature; first trace seen represents its class.

    Accepts plain traces or ``(trace, count)`` pairs as produced by ``dedupe``.
    """
    by_sig: dict = {}
    for item in traces:
        t, count = item if isinstance(item, tuple) else (item, 1)
        sig = signature(t, atoms)
        c = by_sig.get(sig)
        if c is None:
            c = by_sig[sig] = Cluster(t)
        c.members.append(t)
        c.counts.append(count)
    return Clustering(list(by_sig.values()))


def singleton_clusters(traces: Iterable) -> Clustering:
    clusters = []
    for item in traces:
        t, count = item if isinstance(item, tuple) else (item, 1)
        clusters.append(Cluster(t, [t], [count]))
    return Clustering(clusters)
