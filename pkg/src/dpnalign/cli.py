"""Command line: align every trace of an XES log against a data-aware PNML net.

Pipeline: parse, deduplicate, cluster, solve one representative per cluster,
transfer its alignment to the other members, write the report.
"""

from __future__ import annotations

import argparse
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from dpnalign.align import DEFAULT_RETRY, DecodeError, NoAlignmentError, conformance, transfer_alignment
from dpnalign.cluster import cluster_log, extract_atoms, singleton_clusters
from dpnalign.cost import PROFILES, alignment_cost, profile, render_alignment
from dpnalign.dpn import ExplorationError, NetError
from dpnalign.encoder import EncodeError
from dpnalign.log import dedupe
from dpnalign.pnml import ParseError, parse_pnml
from dpnalign.report import TraceOutcome, write_report
from dpnalign.solver import DEFAULT_TIMEOUT, SOLVER_ENV, SolverError, SolverNotFound, solver_command
from dpnalign.values import Sort, SortError, parse_decimal
from dpnalign.xes import parse_xes

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NO_SOLVER = 4
EXIT_TIMEOUT = 5
EXIT_INTERNAL = 6
EXIT_NO_RUN = 7


class InternalError(RuntimeError):
    pass


@dataclass
class RunConfig:
    model: str
    log: str
    cost: str = "standard"
    solver: str | None = None
    timeout: float = DEFAULT_TIMEOUT
    bound: int | None = None
    retry: int = DEFAULT_RETRY
    jobs: int = 1
    cluster: bool = True
    verbose: bool = False
    format: str = "csv"
    out: str | None = None
    dump_smt: str | None = None
    verify_transfer: bool = False
    relaxed_labels: bool = False
    initial: dict = field(default_factory=dict)

    def validate(self):
        if self.cost not in PROFILES:
            raise ValueError(f"unknown cost profile {self.cost!r}")
        if self.timeout <= 0:
            raise ValueError("--timeout must be positive")
        if self.bound is not None and self.bound < 0:
            raise ValueError("--bound must be non-negative")
        if self.retry < 0:
            raise ValueError("--retry must be non-negative")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dpnalign",
        description="Optimal data-aware alignments of an XES log against a data Petri net (PNML).",
    )
    p.add_argument("--model", required=True, help="data-aware PNML net")
    p.add_argument("--log", required=True, help="XES event log")
    p.add_argument("--cost", choices=sorted(PROFILES), default="standard", help="cost profile (default: standard)")
    p.add_argument("--solver", help=f"SMT solver command (default: ${SOLVER_ENV} or z3 on PATH)")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds per satisfiability check (default: 600)")
    p.add_argument("--bound", type=int, help="number of model steps to encode (default: trace length + shortest run)")
    p.add_argument("--retry", type=int, default=DEFAULT_RETRY, help="extra bounds to try when unsatisfiable (default: 3)")
    p.add_argument("--jobs", type=int, default=1, help="parallel solver processes (default: 1)")
    p.add_argument("--no-cluster", action="store_true", help="solve every unique trace separately")
    p.add_argument("--verbose", action="store_true", help="print alignments; embed them in JSON reports")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format (default: csv)")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--dump-smt", metavar="DIR", help="write each encoding as an SMT-LIB 2 file into DIR")
    p.add_argument("--verify-transfer", action="store_true",
                   help="also solve cluster members and check their cost equals the transferred one")
    p.add_argument("--relaxed-labels", action="store_true", help="allow several silent transitions")
    p.add_argument("--initial", action="append", default=[], metavar="VAR=VALUE",
                   help="override the initial value of a variable (repeatable)")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    initial = {}
    for item in ns.initial:
        name, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"--initial expects VAR=VALUE, got {item!r}")
        initial[name.strip()] = raw.strip()
    cfg = RunConfig(
        model=ns.model, log=ns.log, cost=ns.cost, solver=ns.solver, timeout=ns.timeout, bound=ns.bound,
        retry=ns.retry, jobs=ns.jobs, cluster=not ns.no_cluster, verbose=ns.verbose, format=ns.format,
        out=ns.out, dump_smt=ns.dump_smt, verify_transfer=ns.verify_transfer,
        relaxed_labels=ns.relaxed_labels, initial=initial,
    )
    cfg.validate()
    return cfg


def _initial_values(dpn, raw: dict) -> dict:
    out = {}
    for v, text in raw.items():
        if v not in dpn.variables:
            raise ValueError(f"--initial: unknown variable {v!r}")
        sort = dpn.variables[v]
        if sort is Sort.BOOL:
            if text.lower() not in ("true", "false"):
                raise ValueError(f"--initial: {v} expects true or false")
            out[v] = text.lower() == "true"
        elif sort is Sort.STRING:
            out[v] = text
        else:
            out[v] = sort.coerce(parse_decimal(text))
    return out


@dataclass
class Summary:
    total: int = 0
    unique: int = 0
    clusters: int = 0
    solver_runs: int = 0
    solved: int = 0
    timed_out: int = 0
    parse_time: float = 0.0
    encode_time: float = 0.0
    solve_time: float = 0.0
    costs: list = field(default_factory=list)

    def line(self) -> str:
        if self.costs:
            stats = f"cost min={min(self.costs)} mean={statistics.fmean(self.costs):.3f} max={max(self.costs)}"
        else:
            stats = "cost n/a"
        busy = self.parse_time + self.encode_time + self.solve_time or 1.0
        pct = lambda x: f"{100 * x / busy:.0f}%"  # noqa: E731
        return (
            f"traces={self.total} unique={self.unique} clusters={self.clusters} solver_runs={self.solver_runs} "
            f"solved={self.solved} timeouts={self.timed_out} | {stats} | "
            f"time parse={self.parse_time:.2f}s ({pct(self.parse_time)}) "
            f"encode={self.encode_time:.2f}s ({pct(self.encode_time)}) "
            f"solve={self.solve_time:.2f}s ({pct(self.solve_time)})"
        )


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    summary = Summary()

    try:
        solver_command(cfg.solver)
    except SolverNotFound as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NO_SOLVER

    t0 = time.perf_counter()
    try:
        dpn, mdiag = parse_pnml(cfg.model, strict_labels=not cfg.relaxed_labels)
        if cfg.initial:
            dpn = dpn.with_initial_assignment(_initial_values(dpn, cfg.initial))
        log, ldiag = parse_xes(cfg.log, dpn)
    except ParseError as exc:
        for e in exc.diagnostics.errors:
            print(f"parse error: {e}", file=stderr)
        if any("not injective" in e for e in exc.diagnostics.errors):
            print("hint: --relaxed-labels allows several silent transitions", file=stderr)
        return EXIT_PARSE
    except (OSError, ValueError, NetError, SortError) as exc:
        print(f"parse error: {exc}", file=stderr)
        return EXIT_PARSE
    if cfg.verbose:
        for w in mdiag.warnings + ldiag.warnings:
            print(f"warning: {w}", file=stderr)
    summary.parse_time = time.perf_counter() - t0

    unique = dedupe(log)
    atoms = extract_atoms(dpn)
    clustering = cluster_log(unique, atoms) if cfg.cluster else singleton_clusters(unique)
    summary.total, summary.unique, summary.clusters = len(log), len(unique), len(clustering)
    pf = profile(cfg.cost)

    def solve(trace):
        return conformance(dpn, trace, pf, bound=cfg.bound, retry=cfg.retry, solver=cfg.solver,
                           timeout=cfg.timeout, dump_smt=cfg.dump_smt)

    try:
        reps = [c.representative for c in clustering]
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(solve, reps))
        summary.solver_runs = len(results)

        outcomes = {}
        for cid, (cluster, res) in enumerate(zip(clustering, results)):
            summary.encode_time += res.encode_time
            summary.solve_time += res.solve_time
            for member, count in zip(cluster.members, cluster.counts):
                is_rep = member is cluster.representative
                o = TraceOutcome(member.id, count, cid, None, timed_out=res.timed_out, representative=is_rep)
                if is_rep:
                    o.cost, o.alignment = res.cost, res.alignment
                    o.solve_time, o.encode_time = res.solve_time, res.encode_time
                elif not res.timed_out:
                    o.alignment = transfer_alignment(res.alignment, cluster.representative, member, dpn, atoms)
                    o.cost = alignment_cost(o.alignment, pf)
                    if o.cost != res.cost:
                        raise InternalError(f"transferred alignment of {member.id} costs {o.cost}, expected {res.cost}")
                    if cfg.verify_transfer:
                        check = solve(member)
                        summary.solver_runs += 1
                        if check.optimal and check.cost != o.cost:
                            raise InternalError(
                                f"trace {member.id}: solved cost {check.cost} differs from transferred {o.cost}")
                outcomes[member.key()] = o
    except SolverNotFound as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NO_SOLVER
    except (NoAlignmentError, ExplorationError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NO_RUN
    except (DecodeError, EncodeError, SolverError, InternalError) as exc:
        print(f"internal error: {exc}", file=stderr)
        return EXIT_INTERNAL

    ordered = [outcomes[t.key()] for t, _ in unique]
    for o in ordered:
        if o.timed_out or o.cost is None:
            summary.timed_out += o.multiplicity
        else:
            summary.solved += o.multiplicity
            summary.costs += [o.cost] * o.multiplicity
        if cfg.verbose and o.alignment:
            print(f"trace {o.trace_id} (cost {o.cost_field}):", file=stderr)
            print(render_alignment(o.alignment), file=stderr)

    try:
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                write_report(ordered, cfg.format, fh, cfg.verbose)
        else:
            write_report(ordered, cfg.format, stdout, cfg.verbose)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=stderr)
        return EXIT_INTERNAL

    print(summary.line(), file=stderr)
    return EXIT_TIMEOUT if summary.timed_out else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        parser.error(str(exc))
    if cfg.dump_smt:
        os.makedirs(cfg.dump_smt, exist_ok=True)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
