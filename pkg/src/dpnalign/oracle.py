"""Brute-force reference for optimal alignment costs.

Enumerates every process run up to a length bound, drawing written values from
explicit finite domains, and takes the minimum edit distance to the trace.
Exponential; meant for nets with a handful of transitions and tiny domains.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from dpnalign import guards as g
from dpnalign.cost import PenaltyFunctions, edit_distance, reconstruct_alignment
from dpnalign.dpn import DPN, State, TransitionFiring, enabled, fire
from dpnalign.log import LogTrace
from dpnalign.values import canonical

MAX_NODES = 2_000_000


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class FiniteDomains:
    """Candidate write values per variable, in a fixed order."""

    values: Mapping[str, tuple]

    def __getitem__(self, var: str) -> tuple:
        return self.values[var]

    @classmethod
    def covering(cls, dpn: DPN, traces: Iterable[LogTrace] = (), extra: Mapping[str, Iterable] | None = None):
        """Domains holding the initial values, every guard constant of a
        matching sort, every value in `traces`, plus `extra`."""
        found: dict = {v: {} for v in dpn.variables}

        def add(v, x):
            if v in found and dpn.variables[v].accepts(x):
                x = dpn.variables[v].coerce(x)
                found[v].setdefault(canonical(x), x)

        for v, x in dpn.initial_assignment.items():
            add(v, x)
        for t in dpn.transitions:
            consts = [n.value for n in g._walk(t.guard) if isinstance(n, g.Const) and not isinstance(n.value, bool)]
            for v in t.write_set:
                for k in consts:
                    add(v, k)
        for tr in traces:
            for e in tr:
                for v, x in e.assignment.items():
                    add(v, x)
        for v, xs in (extra or {}).items():
            for x in xs:
                add(v, x)
        return cls({v: tuple(d.values()) for v, d in found.items()})


def _firings(dpn: DPN, state: State, domains: FiniteDomains) -> Iterator[TransitionFiring]:
    for t in dpn.transitions:
        if any(state.marking[p] < w for p, w in dpn.pre[t.id].items()):
            continue
        ws = sorted(t.write_set)
        for combo in itertools.product(*(domains[v] for v in ws)):
            f = TransitionFiring(t, dict(zip(ws, combo)))
            if enabled(dpn, state, f):
                yield f


def enumerate_runs(dpn: DPN, domains: FiniteDomains, max_len: int, max_nodes: int = MAX_NODES) -> Iterator[tuple]:
    """Every process run of length at most `max_len` over the given domains."""
    final = dict(dpn.final_marking)
    nodes = 0
    stack = [(dpn.initial_state, ())]
    while stack:
        state, prefix = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            raise OracleError(f"more than {max_nodes} search nodes; shrink the domains or the bound")
        if dict(state.marking) == final:
            yield prefix
        if len(prefix) < max_len:
            for f in _firings(dpn, state, domains):
                stack.append((fire(dpn, state, f), prefix + (f,)))


@dataclass
class OracleResult:
    cost: float
    run: tuple | None
    alignment: tuple | None
    runs_seen: int


def brute_force_optimal(dpn: DPN, trace: LogTrace, pf: PenaltyFunctions, domains: FiniteDomains,
                        max_len: int, max_nodes: int = MAX_NODES) -> OracleResult:
    best, best_run, best_D, seen = math.inf, None, None, 0
    for run in enumerate_runs(dpn, domains, max_len, max_nodes):
        seen += 1
        cost, D = edit_distance(trace, run, pf)
        if cost < best:
            best, best_run, best_D = cost, run, D
    alignment = None if best_run is None else reconstruct_alignment(trace, best_run, best_D, pf)
    return OracleResult(best, best_run, alignment, seen)
