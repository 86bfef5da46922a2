"""Data Petri nets: model, token game with data, and control-flow exploration."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from dpnalign import guards as g
from dpnalign.values import Sort, SortError, Value

# exploration limits for control-flow-only analyses
MAX_MARKINGS = 100_000


class NetError(ValueError):
    """Structurally invalid net."""


class FiringError(RuntimeError):
    """A firing was applied in a state where it is not enabled."""


class ExplorationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Transition:
    """A net transition. ``label=None`` marks a silent (tau) transition.

    ``declared_writes`` lists variables written without any constraint on the
    new value (the PNML dialect can declare such writes explicitly).
    """

    id: str
    label: str | None
    guard: g.Expr = g.TRUE
    declared_writes: frozenset = frozenset()
    declared_reads: frozenset = frozenset()

    @property
    def silent(self) -> bool:
        return self.label is None

    @cached_property
    def read_set(self) -> frozenset:
        return frozenset(n for n, m in g.annotated_vars(self.guard) if m == g.READ) | self.declared_reads

    @cached_property
    def write_set(self) -> frozenset:
        return frozenset(n for n, m in g.annotated_vars(self.guard) if m == g.WRITE) | self.declared_writes

    def __str__(self) -> str:
        return "τ" if self.silent else self.label


@dataclass(frozen=True)
class TransitionFiring:
    """A transition together with its write values (and optionally read values).

    Reads may be omitted: enabledness forces them to equal the current state.
    """

    transition: Transition
    writes: Mapping[str, Value] = field(default_factory=dict)
    reads: Mapping[str, Value] | None = None

    @property
    def beta(self) -> dict:
        env = {(v, g.WRITE): val for v, val in self.writes.items()}
        if self.reads:
            env.update({(v, g.READ): val for v, val in self.reads.items()})
        return env

    def __str__(self) -> str:
        ws = ", ".join(f"{v}^w={val}" for v, val in sorted(self.writes.items()))
        return f"({self.transition}, {{{ws}}})"


@dataclass(frozen=True)
class State:
    marking: Mapping[str, int]
    assignment: Mapping[str, Value]


class DPN:
    """A data Petri net with initial and final markings and initial assignment.

    `arcs` maps ``(source, target)`` pairs (place→transition or
    transition→place, by id) to multiplicities. Instances are treated as
    immutable after construction.
    """

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[Transition],
        arcs: Mapping[tuple, int],
        variables: Mapping[str, Sort] | None = None,
        initial_marking: Mapping[str, int] | None = None,
        final_marking: Mapping[str, int] | None = None,
        initial_assignment: Mapping[str, Value] | None = None,
        strict_labels: bool = True,
        name: str = "net",
    ):
        self.name = name
        self.strict_labels = strict_labels
        self.places: tuple = tuple(dict.fromkeys(places))
        self.transitions: tuple = tuple(transitions)
        self.variables = MappingProxyType(dict(variables or {}))
        if not self.places or not self.transitions:
            raise NetError("places and transitions must be non-empty")
        place_set = set(self.places)
        self._by_id = {t.id: t for t in self.transitions}
        if len(self._by_id) != len(self.transitions):
            raise NetError("duplicate transition ids")
        if place_set & self._by_id.keys():
            raise NetError("places and transitions must be disjoint")

        labels = [t.label for t in self.transitions if strict_labels or not t.silent]
        dupes = {lab for lab in labels if labels.count(lab) > 1}
        if dupes:
            shown = ", ".join("τ" if d is None else d for d in sorted(dupes, key=str))
            raise NetError(f"labelling is not injective (repeated: {shown})")

        self.pre: dict = {t.id: {} for t in self.transitions}
        self.post: dict = {t.id: {} for t in self.transitions}
        for (src, dst), weight in arcs.items():
            if weight < 0:
                raise NetError(f"negative multiplicity on arc {src}->{dst}")
            if weight == 0:
                continue
            if src in place_set and dst in self._by_id:
                self.pre[dst][src] = self.pre[dst].get(src, 0) + weight
            elif src in self._by_id and dst in place_set:
                self.post[src][dst] = self.post[src].get(dst, 0) + weight
            else:
                raise NetError(f"arc {src}->{dst} does not connect a place and a transition")

        for t in self.transitions:
            used = {n for n, _ in g.annotated_vars(t.guard)} | t.declared_writes | t.declared_reads
            unknown = used - self.variables.keys()
            if unknown:
                raise NetError(f"transition {t.id}: undeclared variables {sorted(unknown)}")
            try:
                g.check_sorts(t.guard, self.variables)
            except g.GuardError as exc:
                raise NetError(f"transition {t.id}: {exc}") from None

        self.initial_marking = self._marking(initial_marking or {}, "initial")
        self.final_marking = self._marking(final_marking or {}, "final")
        alpha = dict(initial_assignment or {})
        unknown = alpha.keys() - self.variables.keys()
        if unknown:
            raise NetError(f"initial assignment for undeclared variables {sorted(unknown)}")
        try:
            self.initial_assignment = MappingProxyType(
                {v: s.coerce(alpha[v]) if v in alpha else s.default for v, s in self.variables.items()}
            )
        except SortError as exc:
            raise NetError(f"initial assignment: {exc}") from None

    def _marking(self, marking: Mapping[str, int], what: str):
        unknown = set(marking) - set(self.places)
        if unknown:
            raise NetError(f"{what} marking mentions unknown places {sorted(unknown)}")
        if any(c < 0 for c in marking.values()):
            raise NetError(f"{what} marking has negative counts")
        return MappingProxyType({p: int(marking.get(p, 0)) for p in self.places})

    def transition(self, tid: str) -> Transition:
        return self._by_id[tid]

    def transitions_labelled(self, label: str) -> list:
        return [t for t in self.transitions if t.label == label]

    @property
    def initial_state(self) -> State:
        return State(self.initial_marking, self.initial_assignment)

    @property
    def guards(self) -> list:
        return [t.guard for t in self.transitions]

    @property
    def arcs(self) -> dict:
        out = {}
        for t in self.transitions:
            out.update({(p, t.id): w for p, w in self.pre[t.id].items()})
            out.update({(t.id, p): w for p, w in self.post[t.id].items()})
        return out

    def with_initial_assignment(self, overrides: Mapping[str, Value]) -> "DPN":
        """Copy of the net with some initial values replaced."""
        alpha = {**self.initial_assignment, **overrides}
        return DPN(self.places, self.transitions, self.arcs, self.variables, self.initial_marking,
                   self.final_marking, alpha, strict_labels=self.strict_labels, name=self.name)

    def __repr__(self) -> str:
        return f"DPN({self.name!r}, |P|={len(self.places)}, |T|={len(self.transitions)}, V={list(self.variables)})"


# --- firing semantics ------------------------------------------------------

def eval_guard(guard: g.Expr, beta: Mapping) -> bool:
    """Truth value of `guard` under a transition assignment keyed by ``(name, mode)``."""
    return bool(g.evaluate(guard, beta))


def _full_beta(dpn: DPN, state: State, firing: TransitionFiring):
    """β with reads filled from the state, or None if β is malformed."""
    t = firing.transition
    if set(firing.writes) != t.write_set:
        return None
    beta = {}
    for v in t.read_set:
        if firing.reads is not None and v in firing.reads:
            if not _equal(firing.reads[v], state.assignment[v]):
                return None
        beta[(v, g.READ)] = state.assignment[v]
    for v, val in firing.writes.items():
        if not dpn.variables[v].accepts(val):
            return None
        beta[(v, g.WRITE)] = dpn.variables[v].coerce(val)
    return beta


def _equal(a: Value, b: Value) -> bool:
    return g.compare("=", a, b)


def enabled(dpn: DPN, state: State, firing: TransitionFiring) -> bool:
    t = firing.transition
    if dpn._by_id.get(t.id) != t:
        return False
    if any(state.marking[p] < w for p, w in dpn.pre[t.id].items()):
        return False
    beta = _full_beta(dpn, state, firing)
    if beta is None:
        return False
    return eval_guard(t.guard, beta)


def fire(dpn: DPN, state: State, firing: TransitionFiring) -> State:
    if not enabled(dpn, state, firing):
        raise FiringError(f"{firing} is not enabled")
    t = firing.transition
    marking = dict(state.marking)
    for p, w in dpn.pre[t.id].items():
        marking[p] -= w
    for p, w in dpn.post[t.id].items():
        marking[p] += w
    assignment = dict(state.assignment)
    for v, val in firing.writes.items():
        assignment[v] = dpn.variables[v].coerce(val)
    return State(MappingProxyType(marking), MappingProxyType(assignment))


def replay(dpn: DPN, run: Sequence[TransitionFiring]) -> list:
    """States visited by `run` from the initial state; raises FiringError."""
    states = [dpn.initial_state]
    for f in run:
        states.append(fire(dpn, states[-1], f))
    return states


def validate_run(dpn: DPN, run: Sequence[TransitionFiring]) -> bool:
    try:
        states = replay(dpn, run)
    except FiringError:
        return False
    return dict(states[-1].marking) == dict(dpn.final_marking)


# --- control-flow exploration ----------------------------------------------

def _cf_net(dpn: DPN):
    index = {p: i for i, p in enumerate(dpn.places)}
    trans = []
    for t in dpn.transitions:
        pre = tuple((index[p], w) for p, w in dpn.pre[t.id].items())
        delta = [0] * len(dpn.places)
        for p, w in dpn.pre[t.id].items():
            delta[index[p]] -= w
        for p, w in dpn.post[t.id].items():
            delta[index[p]] += w
        trans.append((t, pre, tuple(delta)))
    m0 = tuple(dpn.initial_marking[p] for p in dpn.places)
    mf = tuple(dpn.final_marking[p] for p in dpn.places)
    weights = [w for t in dpn.transitions for w in (*dpn.pre[t.id].values(), *dpn.post[t.id].values())]
    cap = 2 * max([1, *m0, *mf, *weights])
    return trans, m0, mf, cap


def _successors(trans, marking):
    for t, pre, delta in trans:
        if all(marking[i] >= w for i, w in pre):
            yield t, tuple(c + d for c, d in zip(marking, delta))


@dataclass
class StepReachability:
    """Per-step over-approximation of fireable transitions (step 1 first)."""

    transitions: list
    writes: list
    exact: bool


def reachable_transition_sets(dpn: DPN, horizon: int, max_markings: int = MAX_MARKINGS) -> StepReachability:
    """Transitions possibly fired at steps ``1..horizon`` ignoring guards.

    Falls back to all transitions at every step when the exploration leaves the
    marking budget or the per-place token cap.
    """
    trans, m0, _, cap = _cf_net(dpn)
    layer = {m0}
    seen = 1
    steps = []
    for _ in range(horizon):
        fired = set()
        nxt = set()
        for m in layer:
            for t, m2 in _successors(trans, m):
                fired.add(t.id)
                nxt.add(m2)
        seen += len(nxt)
        if seen > max_markings or any(c > cap for m in nxt for c in m):
            return _everything(dpn, horizon)
        steps.append(frozenset(fired))
        layer = nxt
    writes = [frozenset(v for tid in s for v in dpn.transition(tid).write_set) for s in steps]
    return StepReachability(steps, writes, exact=True)


def _everything(dpn: DPN, horizon: int) -> StepReachability:
    every = frozenset(t.id for t in dpn.transitions)
    vs = frozenset(v for t in dpn.transitions for v in t.write_set)
    return StepReachability([every] * horizon, [vs] * horizon, exact=False)


def explore(dpn: DPN, max_markings: int = MAX_MARKINGS):
    """All control-flow reachable markings, or None if the budget is exceeded."""
    trans, m0, _, cap = _cf_net(dpn)
    seen = {m0}
    queue = deque([m0])
    while queue:
        m = queue.popleft()
        for _, m2 in _successors(trans, m):
            if m2 in seen:
                continue
            if len(seen) >= max_markings or any(c > cap for c in m2):
                return None
            seen.add(m2)
            queue.append(m2)
    return seen


def is_one_bounded(dpn: DPN, max_markings: int = MAX_MARKINGS) -> bool:
    markings = explore(dpn, max_markings)
    return markings is not None and all(c <= 1 for m in markings for c in m)


def shortest_final_distance(dpn: DPN, max_markings: int = MAX_MARKINGS) -> int:
    """Fewest control-flow steps from the initial to the final marking."""
    trans, m0, mf, cap = _cf_net(dpn)
    if m0 == mf:
        return 0
    dist = {m0: 0}
    queue = deque([m0])
    while queue:
        m = queue.popleft()
        for _, m2 in _successors(trans, m):
            if m2 in dist:
                continue
            if m2 == mf:
                return dist[m] + 1
            if len(dist) >= max_markings or any(c > cap for c in m2):
                raise ExplorationError(
                    "final marking not found within the exploration budget; pass an explicit bound"
                )
            dist[m2] = dist[m] + 1
            queue.append(m2)
    raise ExplorationError("final marking is unreachable in the control flow; pass an explicit bound")
