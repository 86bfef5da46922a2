"""Symbolic encoding of optimal alignment search for one trace.

For a bound ``n`` the encoding describes a process run of at most ``n``
transition firings (steps may be *idle* once the run is over) together with
the edit-distance matrix between the trace and that run. Minimising the
bottom-right distance cell yields an optimal alignment.

Step variable ``S_i`` holds the 1-based index of the transition fired at step
``i``; the value 0 marks an idle step. Idle steps form a suffix, keep marking
and data unchanged, cost nothing as model moves and can never be matched
with a log event.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from dpnalign import guards as g
from dpnalign import smt
from dpnalign.cost import PenaltyFunctions, write_cost
from dpnalign.dpn import DPN, Transition, is_one_bounded, reachable_transition_sets, shortest_final_distance
from dpnalign.log import LogTrace
from dpnalign.smt import BOOL, INT, REAL, SymVar
from dpnalign.values import Sort

IDLE = 0

GROUPS = ("init", "final", "trans", "idle", "enabled", "mark", "data", "aux", "delta")


class EncodeError(ValueError):
    pass


@dataclass(frozen=True)
class EncodingOptions:
    """Toggles for the encoding optimisations (all on by default)."""

    reachability: bool = True
    boolean_markings: bool = True
    inequality_distance: bool = True
    auxiliary_vars: bool = True


@dataclass
class EncodingArtifact:
    dpn: DPN
    trace: LogTrace
    n: int
    m: int
    profile: str
    options: EncodingOptions
    steps: list                 # S_1..S_n
    markings: list              # per instant 0..n: place -> SymVar
    data: list                  # per instant 0..n: variable -> SymVar (shared when frozen)
    delta: list                 # (m+1) x (n+1)
    aux: list
    groups: dict
    big_m: int
    upper: int
    index_of: dict              # transition id -> step value
    transition_at: list         # step value -> Transition (None for idle)
    candidates: list            # per step: tuple of allowed non-idle step values
    string_codes: dict
    boolean_markings: bool
    model_penalty: list         # per step j (1-based, slot 0 unused)
    sync_penalty: dict          # (i, j) -> term
    log_penalty: list = field(default_factory=list)

    @property
    def objective(self) -> SymVar:
        return self.delta[self.m][self.n]

    @property
    def assertions(self) -> list:
        return [a for name in GROUPS for a in self.groups.get(name, [])]

    @property
    def variables(self) -> list:
        seen = {}
        for s in self.steps:
            seen[s.name] = s
        for layer in self.markings:
            for v in layer.values():
                seen[v.name] = v
        for layer in self.data:
            for v in layer.values():
                seen[v.name] = v
        for row in self.delta:
            for v in row:
                seen[v.name] = v
        for v in self.aux:
            seen[v.name] = v
        return list(seen.values())

    @property
    def logic(self) -> str:
        return "QF_LIRA" if any(v.sort == REAL for v in self.variables) else "QF_LIA"

    def decode_string(self, code: int) -> str:
        for s, c in self.string_codes.items():
            if c == code:
                return s
        return f"\x00str{code}"

    def to_smtlib(self, check: bool = True) -> str:
        """Standalone SMT-LIB 2 script: declarations, assertions and a check."""
        lines = [
            f"; alignment encoding: trace {self.trace.id or '<anonymous>'}, m={self.m}, n={self.n}, profile={self.profile}",
            "(set-option :produce-models true)",
            f"(set-logic {self.logic})",
        ]
        lines += [f"(declare-fun {smt.quote(v.name)} () {v.sort})" for v in self.variables]
        for name in GROUPS:
            group = self.groups.get(name, [])
            if group:
                lines.append(f"; {name}")
            lines += [f"(assert {smt.to_smt(a)})" for a in group]
        if check:
            lines.append("(check-sat)")
        return "\n".join(lines) + "\n"


def compute_bound(dpn: DPN, trace: LogTrace, override: int | None = None) -> int:
    """Number of model steps to encode: trace length plus the shortest run."""
    if override is not None:
        if override < 0:
            raise ValueError("bound must be non-negative")
        return override
    return len(trace) + shortest_final_distance(dpn)


_SMT_SORT = {Sort.INT: INT, Sort.RAT: REAL, Sort.BOOL: BOOL, Sort.STRING: INT}


def _intern_strings(dpn: DPN, trace: LogTrace) -> dict:
    found = set()
    for v, s in dpn.variables.items():
        if s is Sort.STRING:
            found.add(dpn.initial_assignment[v])
    for t in dpn.transitions:
        for node in g._walk(t.guard):
            if isinstance(node, g.Const) and isinstance(node.value, str):
                found.add(node.value)
    for e in trace:
        for v, val in e.assignment.items():
            if isinstance(val, str):
                found.add(val)
    return {s: i for i, s in enumerate(sorted(found))}


class _Builder:
    def __init__(self, dpn: DPN, trace: LogTrace, n: int, pf: PenaltyFunctions, opts: EncodingOptions):
        if pf.name not in ("standard", "levenshtein"):
            raise EncodeError(f"no symbolic encoding for cost profile {pf.name!r}")
        self.dpn, self.trace, self.n, self.pf, self.opts = dpn, trace, n, pf, opts
        self.m = len(trace)
        self.codes = _intern_strings(dpn, trace)
        self.index_of = {t.id: k + 1 for k, t in enumerate(dpn.transitions)}
        self.transition_at = [None, *dpn.transitions]
        self.groups = {name: [] for name in GROUPS}
        self.aux = []

    # constants ----------------------------------------------------------
    def const(self, value, sort: Sort):
        if sort is Sort.STRING:
            return self.codes[value]
        if sort is Sort.RAT:
            return Fraction(value)
        if sort is Sort.INT:
            return int(value)
        return bool(value)

    # variables ----------------------------------------------------------
    def build(self) -> EncodingArtifact:
        dpn, n, m = self.dpn, self.n, self.m
        T = len(dpn.transitions)

        if self.opts.reachability:
            reach = reachable_transition_sets(dpn, n)
            cands = [tuple(sorted(self.index_of[tid] for tid in step)) for step in reach.transitions]
            writable = reach.writes
        else:
            cands = [tuple(range(1, T + 1))] * n
            writable = [frozenset(dpn.variables)] * n
        self.cands = cands

        self.steps = [SymVar(f"S_{i}", INT, "step") for i in range(1, n + 1)]
        self.boolean_markings = self.opts.boolean_markings and is_one_bounded(dpn)
        msort = BOOL if self.boolean_markings else INT
        self.markings = [
            {p: SymVar(f"M_{i}_{k}", msort, "marking") for k, p in enumerate(dpn.places)}
            for i in range(n + 1)
        ]
        var_names = list(dpn.variables)
        self.data = [{v: SymVar(f"X_0_{k}", _SMT_SORT[dpn.variables[v]], "data") for k, v in enumerate(var_names)}]
        for i in range(1, n + 1):
            layer = {}
            for k, v in enumerate(var_names):
                if v in writable[i - 1]:
                    layer[v] = SymVar(f"X_{i}_{k}", _SMT_SORT[dpn.variables[v]], "data")
                else:
                    layer[v] = self.data[i - 1][v]
            self.data.append(layer)
        self.delta = [[SymVar(f"d_{i}_{j}", INT, "distance") for j in range(n + 1)] for i in range(m + 1)]

        self.encode_run()
        self.encode_distance()
        return EncodingArtifact(
            dpn=dpn, trace=self.trace, n=n, m=m, profile=self.pf.name, options=self.opts,
            steps=self.steps, markings=self.markings, data=self.data, delta=self.delta,
            aux=self.aux, groups=self.groups, big_m=self.big_m, upper=self.upper,
            index_of=self.index_of, transition_at=self.transition_at, candidates=cands,
            string_codes=self.codes, boolean_markings=self.boolean_markings,
            model_penalty=self.pm, sync_penalty=self.pe, log_penalty=[1] * (m + 1),
        )

    def is_step(self, i: int, k: int):
        return smt.eq(self.steps[i - 1], k)

    # run constraints ----------------------------------------------------
    def encode_run(self):
        dpn, n, G = self.dpn, self.n, self.groups
        M, X, S = self.markings, self.data, self.steps
        T = len(dpn.transitions)

        for p in dpn.places:
            G["init"].append(self.marking_is(M[0][p], dpn.initial_marking[p]))
        for v, s in dpn.variables.items():
            G["init"].append(smt.eq(X[0][v], self.const(dpn.initial_assignment[v], s)))
        for p in dpn.places:
            G["final"].append(self.marking_is(M[n][p], dpn.final_marking[p]))

        for i in range(1, n + 1):
            if self.opts.reachability:
                G["trans"].append(smt.or_(*(self.is_step(i, k) for k in (IDLE, *self.cands[i - 1]))))
            else:
                G["trans"].append(smt.and_(smt.le(IDLE, S[i - 1]), smt.le(S[i - 1], T)))
            if i < n:
                G["idle"].append(smt.implies(self.is_step(i, IDLE), self.is_step(i + 1, IDLE)))

        for i in range(1, n + 1):
            for k in (IDLE, *self.cands[i - 1]):
                t = self.transition_at[k]
                if t is not None and dpn.pre[t.id]:
                    G["enabled"].append(self.enabled(i, t))
                G["mark"].append(smt.implies(self.is_step(i, k), self.token_game(i, t)))
                data = self.data_constraint(i, t)
                if data is not True:
                    G["data"].append(smt.implies(self.is_step(i, k), data))

    def marking_is(self, var: SymVar, count: int):
        if self.boolean_markings:
            return var if count else smt.not_(var)
        return smt.eq(var, count)

    def enabled(self, i: int, t: Transition):
        pre = self.dpn.pre[t.id]
        before = self.markings[i - 1]
        if self.boolean_markings:
            if any(w > 1 for w in pre.values()):
                return smt.not_(self.is_step(i, self.index_of[t.id]))
            cond = smt.and_(*(before[p] for p in pre))
        else:
            cond = smt.and_(*(smt.ge(before[p], w) for p, w in pre.items()))
        return smt.implies(self.is_step(i, self.index_of[t.id]), cond)

    def token_game(self, i: int, t: Transition | None):
        before, after = self.markings[i - 1], self.markings[i]
        parts = []
        for p in self.dpn.places:
            w_in = self.dpn.pre[t.id].get(p, 0) if t else 0
            w_out = self.dpn.post[t.id].get(p, 0) if t else 0
            if self.boolean_markings:
                if w_out > 1:
                    return False  # would exceed one token
                if w_out == 1:
                    parts.append(after[p])
                    if w_in == 0:
                        parts.append(smt.not_(before[p]))
                elif w_in > 0:
                    parts.append(smt.not_(after[p]))
                else:
                    parts.append(smt.eq(after[p], before[p]))
            else:
                parts.append(smt.eq(after[p], smt.add(before[p], w_out - w_in)))
        return smt.and_(*parts)

    def data_constraint(self, i: int, t: Transition | None):
        X0, X1 = self.data[i - 1], self.data[i]
        written = t.write_set if t else frozenset()
        parts = []
        if t is not None:
            try:
                parts.append(self.guard(t.guard, X0, X1))
            except (KeyError, TypeError) as exc:
                raise EncodeError(f"cannot encode guard of transition {t.id}: {exc}") from None
        for v in self.dpn.variables:
            if v not in written and X1[v] is not X0[v]:
                parts.append(smt.eq(X1[v], X0[v]))
        return smt.and_(*parts)

    def guard(self, expr: g.Expr, X0: Mapping, X1: Mapping, sort: Sort = Sort.BOOL):
        sorts = self.dpn.variables
        if isinstance(expr, g.Var):
            return (X1 if expr.mode == g.WRITE else X0)[expr.name]
        if isinstance(expr, g.Const):
            return self.const(expr.value, sort)
        if isinstance(expr, g.Add):
            return smt.app("+", self.guard(expr.left, X0, X1, sort), self.guard(expr.right, X0, X1, sort))
        if isinstance(expr, g.Neg):
            return smt.app("-", self.guard(expr.arg, X0, X1, sort))
        if isinstance(expr, g.Cmp):
            inner = g.term_sort(expr.left, sorts)
            if inner is Sort.INT:
                inner = g.term_sort(expr.right, sorts)
            lhs = self.guard(expr.left, X0, X1, inner)
            rhs = self.guard(expr.right, X0, X1, inner)
            if expr.op == "!=":
                return smt.not_(smt.eq(lhs, rhs))
            return smt.app(expr.op, lhs, rhs)
        if isinstance(expr, g.And):
            return smt.and_(*(self.guard(a, X0, X1) for a in expr.args))
        if isinstance(expr, g.Or):
            return smt.or_(*(self.guard(a, X0, X1) for a in expr.args))
        if isinstance(expr, g.Not):
            return smt.not_(self.guard(expr.arg, X0, X1))
        raise EncodeError(f"unsupported guard construct {expr!r}")

    # distance -----------------------------------------------------------
    def model_cost(self, t: Transition) -> int:
        return write_cost(t) if self.pf.name == "standard" else 1

    def name(self, term, label: str):
        """Bind `term` to a fresh auxiliary variable when that option is on."""
        if not self.opts.auxiliary_vars or not isinstance(term, smt.App):
            return term
        var = SymVar(label, INT, "aux")
        self.aux.append(var)
        self.groups["aux"].append(smt.eq(var, term))
        return var

    def model_penalty_term(self, j: int):
        options = [(k, self.model_cost(self.transition_at[k])) for k in self.cands[j - 1]]
        options.insert(0, (IDLE, 0))
        term = options[-1][1]
        for k, c in reversed(options[:-1]):
            term = smt.ite(self.is_step(j, k), c, term)
        return term

    def sync_penalty_term(self, i: int, j: int):
        event = self.trace[i - 1]
        cand = set(self.cands[j - 1])
        term = self.big_m
        for t in self.dpn.transitions_labelled(event.activity):
            k = self.index_of[t.id]
            if k not in cand:
                continue
            if self.pf.name == "standard":
                cost = 0
                for v, value in sorted(event.assignment.items()):
                    if v not in t.write_set:
                        continue
                    sort = self.dpn.variables[v]
                    if not sort.accepts(value) or (sort is Sort.STRING and value not in self.codes):
                        cost = smt.add(cost, 1)
                        continue
                    same = smt.eq(self.data[j][v], self.const(value, sort))
                    cost = smt.add(cost, smt.ite(same, 0, 1))
            else:
                cost = 0
            term = smt.ite(self.is_step(j, k), cost, term)
        return term

    def encode_distance(self):
        n, m, d, G = self.n, self.m, self.delta, self.groups
        max_pm = max(self.model_cost(t) for t in self.dpn.transitions)
        self.upper = m + n * max_pm
        self.big_m = self.upper + 1

        self.pm = [None] + [self.name(self.model_penalty_term(j), f"pm_{j}") for j in range(1, n + 1)]
        self.pe = {}
        for i in range(1, m + 1):
            for j in range(1, n + 1):
                self.pe[i, j] = self.name(self.sync_penalty_term(i, j), f"pe_{i}_{j}")

        G["delta"].append(smt.eq(d[0][0], 0))
        for i in range(m):
            G["delta"].append(smt.eq(d[i + 1][0], smt.add(1, d[i][0])))
        for j in range(n):
            G["delta"].append(smt.eq(d[0][j + 1], smt.add(self.pm[j + 1], d[0][j])))
        for i in range(m):
            for j in range(n):
                e_sync = smt.add(self.pe[i + 1, j + 1], d[i][j])
                e_log = smt.add(1, d[i][j + 1])
                e_model = smt.add(self.pm[j + 1], d[i + 1][j])
                cell = d[i + 1][j + 1]
                if self.opts.inequality_distance:
                    G["delta"].append(smt.or_(smt.ge(cell, e_sync), smt.ge(cell, e_log), smt.ge(cell, e_model)))
                else:
                    G["delta"].append(smt.eq(cell, _min3(e_sync, e_log, e_model)))


def _min3(a, b, c):
    ab = smt.ite(smt.le(a, b), a, b)
    return smt.ite(smt.le(ab, c), ab, c)


def encode(dpn: DPN, trace: LogTrace, n: int, pf: PenaltyFunctions,
           opts: EncodingOptions | None = None) -> EncodingArtifact:
    """Build the constraint problem for `trace` with at most `n` model steps."""
    return _Builder(dpn, trace, n, pf, opts or EncodingOptions()).build()
