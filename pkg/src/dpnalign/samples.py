"""Ready-made nets and traces, and random instance generators for testing."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from dpnalign import guards as g
from dpnalign.dpn import DPN, Transition, _cf_net, _successors
from dpnalign.guards import parse_guard
from dpnalign.log import LogTrace, trace
from dpnalign.oracle import FiniteDomains
from dpnalign.values import Sort

# --- the running example ---------------------------------------------------------


def running_example() -> DPN:
    """Four places, two paths to the final place, and a self-loop on it.

    The silent step into p3 can be taken from either p1 or p2, so it is
    modelled as two silent transitions sharing the same guard.
    """
    sorts = {"x": Sort.INT, "y": Sort.INT}
    tau_guard = parse_guard("x^r <= 3 && y^r < 4", sorts)
    ts = [
        Transition("a", "a", parse_guard("x^w >= 0", sorts)),
        Transition("b", "b", parse_guard("y^w > 0", sorts)),
        Transition("tau", None, tau_guard),
        Transition("tau1", None, tau_guard),
        Transition("d", "d", parse_guard("y^w = y^r + 1", sorts)),
    ]
    arcs = {
        ("p0", "a"): 1, ("a", "p1"): 1,
        ("p1", "b"): 1, ("b", "p2"): 1,
        ("p2", "tau"): 1, ("tau", "p3"): 1,
        ("p1", "tau1"): 1, ("tau1", "p3"): 1,
        ("p3", "d"): 1, ("d", "p3"): 1,
    }
    return DPN(["p0", "p1", "p2", "p3"], ts, arcs, sorts, {"p0": 1}, {"p3": 1},
               {"x": 0, "y": 0}, strict_labels=False, name="running-example")


def clustering_traces() -> list:
    """Four traces over the running example: the first two are equivalent."""
    return [
        trace(("a", {"x": 2}), ("b", {"y": 1}), id="e1"),
        trace(("a", {"x": 3}), ("b", {"y": 1}), id="e2"),
        trace(("a", {"x": 4}), ("b", {"y": 1}), id="e3"),
        trace(("a", {"x": 3}), ("b", {"y": 2}), id="e4"),
    ]


# --- SAT gadget -------------------------------------------------------------------


def sat_gadget(formula: g.Expr, variables) -> DPN:
    """Net with two parallel transitions; ``phi`` can only fire if `formula` is satisfiable."""
    sorts = {v: Sort.BOOL for v in variables}
    ts = [Transition("t_top", "top"), Transition("t_phi", "phi", formula, declared_writes=frozenset(sorts))]
    arcs = {("p0", "t_top"): 1, ("p0", "t_phi"): 1, ("t_top", "p1"): 1, ("t_phi", "p1"): 1}
    return DPN(["p0", "p1"], ts, arcs, sorts, {"p0": 1}, {"p1": 1}, name="sat-gadget")


def sat_gadget_trace() -> LogTrace:
    return trace("phi", id="phi")


def random_cnf(rng: random.Random, variables=("v0", "v1", "v2"), clauses: int | None = None,
               width: int | None = None) -> list:
    """Clauses as lists of ``(variable, polarity)``; mixed widths unless `width` is given."""
    if clauses is None:
        clauses = rng.randint(2, 10)
    out = []
    for _ in range(clauses):
        k = width or rng.choice((1, 2, 2, 3))
        vs = rng.sample(list(variables), min(k, len(variables)))
        out.append([(v, rng.random() < 0.5) for v in vs])
    return out


def cnf_formula(cnf: list) -> g.Expr:
    """Guard over written copies of the variables."""
    def lit(v, pos):
        x = g.Var(v, g.WRITE)
        return x if pos else g.Not(x)
    return g.And(tuple(g.Or(tuple(lit(v, p) for v, p in clause)) for clause in cnf))


# --- random instances ---------------------------------------------------------------


@dataclass
class Instance:
    dpn: DPN
    trace: LogTrace
    domains: FiniteDomains
    bound: int
    seed: int


_LABELS = "abcde"


def _domain_guard(v: str, sort: Sort, dom: tuple) -> g.Expr:
    w = g.Var(v, g.WRITE)
    if sort is Sort.INT:
        return g.And((g.Cmp(">=", w, g.Const(min(dom))), g.Cmp("<=", w, g.Const(max(dom)))))
    if sort is Sort.RAT:
        return g.Or(tuple(g.Cmp("=", w, g.Const(k)) for k in dom))
    return g.TRUE


def _random_atom(rng: random.Random, v: str, sort: Sort, dom: tuple, writes: bool, others: list) -> g.Expr:
    mode = g.WRITE if writes and rng.random() < 0.7 else g.READ
    x = g.Var(v, mode)
    if sort is Sort.BOOL:
        return x if rng.random() < 0.5 else g.Not(x)
    kind = rng.random()
    if kind < 0.6 or not others:
        op = rng.choice(("<", "<=", "=", "!=", ">=", ">"))
        return g.Cmp(op, x, g.Const(rng.choice(dom)))
    if kind < 0.8 and writes:
        # increments make the variable unrestricted
        return g.Cmp("=", g.Var(v, g.WRITE), g.Add(g.Var(v, g.READ), g.Const(rng.choice((-1, 1)))))
    u = rng.choice(others)
    return g.Cmp(rng.choice(("<", "<=", "=", "!=")), x, g.Var(u, g.READ))


def random_instance(seed: int, *, max_places: int = 5, max_transitions: int = 5, max_vars: int = 2,
                    max_domain: int = 5, max_trace: int = 4, max_bound: int = 6) -> Instance:
    """A small random net, trace and bound. Not guaranteed to admit a run.

    Every written variable is confined to its finite domain by the guard, so
    brute-force enumeration over the domains sees exactly the runs the
    symbolic engine can choose from.
    """
    rng = random.Random(seed)
    n_places = rng.randint(2, max_places)
    n_trans = rng.randint(2, max_transitions)
    places = [f"p{i}" for i in range(n_places)]

    sorts, doms = {}, {}
    for k in range(rng.randint(0, max_vars)):
        v = f"v{k}"
        s = rng.choice((Sort.INT, Sort.INT, Sort.RAT, Sort.BOOL))
        size = rng.randint(2, max_domain)
        if s is Sort.INT:
            lo = rng.randint(-1, 1)
            dom = tuple(range(lo, lo + size))
        elif s is Sort.RAT:
            dom = tuple(sorted({Fraction(rng.randint(-2, 6), 2) for _ in range(size)} | {Fraction(0)}))[:max_domain]
        else:
            dom = (False, True)
        sorts[v], doms[v] = s, dom
    init = {v: (0 if sorts[v] is not Sort.BOOL else False) for v in sorts}
    for v in sorts:
        if init[v] not in doms[v]:
            doms[v] = tuple(sorted(set(doms[v][: max_domain - 1]) | {init[v]}))

    labels = rng.sample(_LABELS, min(n_trans, len(_LABELS)))
    transitions, arcs = [], {}
    for k in range(n_trans):
        tid = f"t{k}"
        label = None if rng.random() < 0.2 else labels[k]
        writes = [v for v in sorts if rng.random() < 0.5]
        parts = [_domain_guard(v, sorts[v], doms[v]) for v in writes]
        for _ in range(rng.randint(0, 2)):
            if not sorts:
                break
            v = rng.choice(list(sorts))
            others = [u for u in sorts if u != v and sorts[u] is sorts[v] and sorts[v] is not Sort.BOOL]
            atom = _random_atom(rng, v, sorts[v], doms[v], v in writes, others)
            if any(m == g.WRITE and n not in writes for n, m in g.annotated_vars(atom)):
                continue
            if rng.random() < 0.25:
                atom = g.Not(atom)
            parts.append(atom)
        guard = g.conj(*parts)
        transitions.append(Transition(tid, label, guard, declared_writes=frozenset(
            v for v in writes if sorts[v] is Sort.BOOL)))
        # chain-ish structure: mostly forward, sometimes back or branching
        src = rng.choice(places[:-1]) if k else places[0]
        dst = rng.choice(places[places.index(src):]) if rng.random() < 0.8 else rng.choice(places)
        arcs[(src, tid)] = 1
        arcs[(tid, dst)] = arcs.get((tid, dst), 0) + (2 if rng.random() < 0.05 else 1)
        if rng.random() < 0.15:
            extra = rng.choice(places)
            arcs[(extra, tid)] = arcs.get((extra, tid), 0) + 1
    skeleton = DPN(places, transitions, arcs, sorts, {places[0]: 1}, {}, init, strict_labels=False)
    final = _pick_final(rng, skeleton, max_bound)
    dpn = DPN(places, transitions, arcs, sorts, {places[0]: 1}, final, init,
              strict_labels=False, name=f"random-{seed}")

    visible = [t for t in transitions if not t.silent]
    events = []
    for _ in range(rng.randint(0, max_trace)):
        if visible and rng.random() < 0.85:
            t = rng.choice(visible)
            label, wr = t.label, sorted(t.write_set)
        else:
            label, wr = "z", []
        data = {}
        for v in wr:
            if rng.random() < 0.85:
                data[v] = _trace_value(rng, sorts[v], doms[v])
        if sorts and rng.random() < 0.1:
            v = rng.choice(list(sorts))
            data[v] = _trace_value(rng, sorts[v], doms[v])
        events.append((label, data))
    tr = trace(*events, id=f"r{seed}")
    bound = rng.randint(max(1, len(events)), max_bound)
    return Instance(dpn, tr, FiniteDomains(doms), bound, seed)


def _pick_final(rng: random.Random, net: DPN, horizon: int) -> dict:
    """A marking the control flow reaches in at most `horizon` steps (guards ignored)."""
    trans, m0, _, _ = _cf_net(net)
    seen, layer = {m0}, {m0}
    for _ in range(horizon):
        layer = {m2 for m in layer for _, m2 in _successors(trans, m)} - seen
        seen |= layer
    chosen = rng.choice(sorted(seen - {m0}) or [m0])
    return {p: c for p, c in zip(net.places, chosen) if c}


def _trace_value(rng: random.Random, sort: Sort, dom: tuple):
    if sort is Sort.BOOL:
        return rng.random() < 0.5
    if rng.random() < 0.8:
        return rng.choice(dom)
    out = max(dom) + 1
    return Fraction(out) if sort is Sort.RAT else out


def random_dataless_instance(seed: int, *, max_places: int = 5, max_transitions: int = 5,
                             max_trace: int = 5, max_bound: int = 6) -> Instance:
    """Plain Petri net (no variables, all transitions visible) with a random trace."""
    rng = random.Random(seed)
    inst = random_instance(seed, max_places=max_places, max_transitions=max_transitions, max_vars=0,
                           max_trace=0, max_bound=max_bound)
    net = inst.dpn
    names = rng.sample(_LABELS, len(net.transitions))
    ts = [Transition(t.id, names[k]) for k, t in enumerate(net.transitions)]
    arcs = {}
    for t in net.transitions:
        for p, w in net.pre[t.id].items():
            arcs[(p, t.id)] = w
        for p, w in net.post[t.id].items():
            arcs[(t.id, p)] = w
    labels = sorted({t.label for t in ts})
    dpn = DPN(net.places, ts, arcs, {}, net.initial_marking, net.final_marking, name=f"plain-{seed}")
    alphabet = labels + ["z"]
    tr = trace(*(rng.choice(alphabet) for _ in range(rng.randint(0, max_trace))), id=f"s{seed}")
    return Instance(dpn, tr, FiniteDomains({}), max(inst.bound, len(tr)), seed)
