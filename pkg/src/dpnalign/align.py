"""Optimal alignments: solving, decoding, and transfer between equivalent traces."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from dpnalign import smt
from dpnalign.cluster import AtomSet, extract_atoms, signature
from dpnalign.cost import (
    LOG, MODEL, Move, PenaltyFunctions, alignment_cost, edit_distance, log_move, model_move,
    reconstruct_alignment, sync_move,
)
from dpnalign.dpn import DPN, TransitionFiring, validate_run
from dpnalign.encoder import IDLE, EncodingArtifact, EncodingOptions, compute_bound, encode
from dpnalign.log import LogTrace
from dpnalign.solver import DEFAULT_TIMEOUT, SolverSession, minimize
from dpnalign.values import Sort, canonical

DEFAULT_RETRY = 3


class DecodeError(RuntimeError):
    """The solver model does not describe a valid run or alignment."""


class NoAlignmentError(RuntimeError):
    """No run reaches the final marking within the explored bounds."""


# --- decoding ----------------------------------------------------------------

def _py_value(raw, sort: Sort, artifact: EncodingArtifact):
    if sort is Sort.STRING:
        return artifact.decode_string(int(raw))
    if sort is Sort.RAT:
        return Fraction(raw)
    if sort is Sort.INT:
        return int(raw)
    return bool(raw)


def step_values(valuation: dict, artifact: EncodingArtifact) -> list:
    try:
        return [valuation[s.name] for s in artifact.steps]
    except KeyError as exc:
        raise DecodeError(f"model lacks step variable {exc}") from None


def decode_run(valuation: dict, artifact: EncodingArtifact) -> tuple:
    """The process run described by a model, idle steps dropped."""
    dpn = artifact.dpn
    run = []
    steps = step_values(valuation, artifact)
    for i, k in enumerate(steps, start=1):
        if k == IDLE:
            continue
        if not 0 < k < len(artifact.transition_at):
            raise DecodeError(f"step {i} has out-of-range value {k}")
        if run and steps[i - 2] == IDLE:
            raise DecodeError(f"step {i} fires after an idle step")
        t = artifact.transition_at[k]
        before, after = artifact.data[i - 1], artifact.data[i]
        try:
            reads = {v: _py_value(valuation[before[v].name], dpn.variables[v], artifact) for v in t.read_set}
            writes = {v: _py_value(valuation[after[v].name], dpn.variables[v], artifact) for v in t.write_set}
        except KeyError as exc:
            raise DecodeError(f"model lacks data variable {exc}") from None
        run.append(TransitionFiring(t, writes, reads))
    run = tuple(run)
    if not validate_run(dpn, run):
        raise DecodeError("decoded run is not a valid process run of the net")
    return run


def decode_alignment(valuation: dict, artifact: EncodingArtifact, run: Sequence[TransitionFiring]) -> tuple:
    """Walk the distance matrix back from the objective cell.

    At every cell some predecessor realises the cell value exactly; its
    direction gives the move. Log moves are preferred, then model moves.
    """
    events = list(artifact.trace)
    val = lambda term: smt.evaluate(term, valuation)  # noqa: E731
    d = artifact.delta
    steps = step_values(valuation, artifact)
    i, j = artifact.m, artifact.n
    moves = []
    while i > 0 or j > 0:
        here = val(d[i][j])
        if i > 0 and (j == 0 or val(d[i - 1][j]) + 1 == here):
            moves.append(log_move(events[i - 1]))
            i -= 1
        elif j > 0 and (i == 0 or val(d[i][j - 1]) + val(artifact.model_penalty[j]) == here):
            if steps[j - 1] != IDLE:  # idle steps cost nothing and leave no move
                moves.append(model_move(run[j - 1]))
            j -= 1
        elif i > 0 and j > 0 and steps[j - 1] != IDLE and val(d[i - 1][j - 1]) + val(artifact.sync_penalty[i, j]) == here:
            moves.append(sync_move(events[i - 1], run[j - 1]))
            i -= 1
            j -= 1
        else:
            raise DecodeError(f"no predecessor of distance cell ({i},{j}) matches its value {here}")
    return tuple(reversed(moves))


# --- conformance ---------------------------------------------------------------

@dataclass
class ConformanceResult:
    trace: LogTrace
    cost: int | None
    alignment: tuple = ()
    run: tuple = ()
    bound: int = 0
    timed_out: bool = False
    checks: int = 0
    encode_time: float = 0.0
    solve_time: float = 0.0
    options: EncodingOptions = field(default_factory=EncodingOptions)

    @property
    def optimal(self) -> bool:
        return self.cost is not None and not self.timed_out


def _dump(directory: str, trace: LogTrace, n: int, artifact: EncodingArtifact):
    os.makedirs(directory, exist_ok=True)
    stem = "".join(c if c.isalnum() or c in "-_." else "_" for c in (trace.id or "trace"))
    with open(os.path.join(directory, f"{stem}.n{n}.smt2"), "w", encoding="utf-8") as fh:
        fh.write(artifact.to_smtlib())


def conformance(
    dpn: DPN,
    trace: LogTrace,
    pf: PenaltyFunctions,
    *,
    bound: int | None = None,
    retry: int = DEFAULT_RETRY,
    options: EncodingOptions | None = None,
    solver=None,
    timeout: float = DEFAULT_TIMEOUT,
    dump_smt: str | None = None,
) -> ConformanceResult:
    """Optimal alignment of `trace` against `dpn` under `pf`.

    The model-step bound defaults to the trace length plus the shortest
    control-flow path to the final marking. If the problem is unsatisfiable
    at that bound, up to `retry` larger bounds are tried.
    """
    options = options or EncodingOptions()
    n0 = compute_bound(dpn, trace, bound)
    enc_t = solve_t = 0.0
    checks = 0
    for n in range(n0, n0 + retry + 1):
        t0 = time.perf_counter()
        art = encode(dpn, trace, n, pf, options)
        enc_t += time.perf_counter() - t0
        if dump_smt:
            _dump(dump_smt, trace, n, art)
        t0 = time.perf_counter()
        with SolverSession(solver, timeout) as session:
            res = minimize(session, art, art.upper)
        solve_t += time.perf_counter() - t0
        checks += res.checks
        if res.value is None and not res.timed_out:
            continue
        result = ConformanceResult(trace, res.value, bound=n, timed_out=res.timed_out, checks=checks,
                                   encode_time=enc_t, solve_time=solve_t, options=options)
        if res.value is None:
            return result
        run = decode_run(res.model, art)
        if res.optimal:
            result.alignment = decode_alignment(res.model, art, run)
            if alignment_cost(result.alignment, pf) != res.value:
                raise DecodeError(f"decoded alignment does not cost the optimum {res.value}")
        else:
            # best model so far: its run, aligned optimally, is still an upper bound
            dist, D = edit_distance(trace, run, pf)
            result.alignment = reconstruct_alignment(trace, run, D, pf)
            result.cost = min(res.value, dist)
        result.run = run
        return result
    raise NoAlignmentError(
        f"trace {trace.id or '<anonymous>'}: no run reaches the final marking within {n0 + retry} steps"
    )


# --- transfer between equivalent traces ----------------------------------------

def transfer_alignment(
    gamma: Sequence[Move],
    source: LogTrace,
    target: LogTrace,
    dpn: DPN,
    atoms: AtomSet | None = None,
) -> tuple:
    """Rewrite an alignment of `source` into one of `target` with the same cost.

    The traces must agree up to constant comparison. Written values of
    restricted variables are swapped where they coincide with a log value;
    everything else is kept, and reads follow the rewritten run.
    """
    atoms = atoms or extract_atoms(dpn)
    if signature(source, atoms) != signature(target, atoms):
        raise ValueError("traces are not equivalent up to constant comparison")
    assignment = dict(dpn.initial_assignment)
    k = 0
    out = []
    for mv in gamma:
        if mv.kind == LOG:
            out.append(log_move(target[k]))
            k += 1
            continue
        f1 = mv.firing
        t = f1.transition
        writes = {}
        for v, b1 in f1.writes.items():
            b2 = b1
            if mv.kind != MODEL and v in atoms.restricted:
                a1 = source[k].assignment
                a2 = target[k].assignment
                if v in a1 and canonical(a1[v]) == canonical(b1):
                    b2 = a2[v]
                elif v in a2 and canonical(a2[v]) == canonical(b1):
                    b2 = a1[v]
            writes[v] = b2
        reads = {v: assignment[v] for v in t.read_set}
        f2 = TransitionFiring(t, writes, reads)
        assignment.update({v: dpn.variables[v].coerce(x) for v, x in writes.items()})
        if mv.kind == MODEL:
            out.append(model_move(f2))
        else:
            out.append(sync_move(target[k], f2))
            k += 1
    return tuple(out)
