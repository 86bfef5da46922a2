"""SMT-LIB 2 sessions with an external solver process.

One :class:`SolverSession` wraps one child process speaking SMT-LIB 2 over
stdin/stdout. Every ``check-sat`` is bounded by a wall-clock timeout enforced
on the Python side, so any compliant solver works (the process is killed
when a check overruns).
"""

from __future__ import annotations

import os
import queue
import re
import shlex
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from dpnalign import smt
from dpnalign.encoder import EncodingArtifact
from dpnalign.smt import BOOL, REAL, SymVar

SOLVER_ENV = "DPNALIGN_SOLVER"
DEFAULT_TIMEOUT = 600.0

SAT, UNSAT, UNKNOWN, TIMEOUT = "sat", "unsat", "unknown", "timeout"


class SolverError(RuntimeError):
    """Protocol failure: dead child process, error reply or unreadable output."""


class SolverNotFound(SolverError):
    pass


class SolverTimeout(SolverError):
    pass


def solver_command(command: str | Sequence[str] | None = None) -> list:
    """Resolve the solver command line (explicit, environment, or z3 on PATH)."""
    if command is None:
        command = os.environ.get(SOLVER_ENV) or "z3"
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    exe = shutil.which(argv[0])
    if exe is None:
        raise SolverNotFound(f"SMT solver {argv[0]!r} not found (set {SOLVER_ENV} or pass --solver)")
    base = os.path.basename(exe)
    if len(argv) == 1:
        if base.startswith("z3"):
            argv += ["-in", "-smt2"]
        elif base.startswith("yices"):
            argv += ["--incremental"]
        elif base.startswith("cvc"):
            argv += ["--incremental", "--lang=smt2"]
    return [exe, *argv[1:]]


@dataclass
class Verdict:
    status: str
    model: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == SAT


class SolverSession:
    """A live solver process. Use as a context manager."""

    def __init__(self, command=None, timeout: float = DEFAULT_TIMEOUT):
        self.argv = solver_command(command)
        self.timeout = timeout
        self.depth = 0
        self.checks = 0
        self.proc = None
        self._lines: queue.Queue = queue.Queue()
        self.broken = False

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.close()

    def start(self):
        self.proc = subprocess.Popen(
            self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
            text=True, bufsize=1,
        )
        threading.Thread(target=self._pump, daemon=True).start()
        self.send("(set-option :print-success false)")
        self.send("(set-option :produce-models true)")

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def close(self):
        if self.proc is None:
            return
        try:
            if self.proc.poll() is None and not self.broken:
                self.proc.stdin.write("(exit)\n")
                self.proc.stdin.flush()
                self.proc.wait(timeout=2)
        except (OSError, subprocess.TimeoutExpired):
            pass
        finally:
            if self.proc.poll() is None:
                self.proc.kill()
                self.proc.wait()
            self.proc = None

    def _kill(self):
        self.broken = True
        if self.proc is not None and self.proc.poll() is None:
            self.proc.kill()

    # protocol -----------------------------------------------------------
    def send(self, command: str):
        if self.broken or self.proc is None:
            raise SolverError("solver session is not usable")
        try:
            self.proc.stdin.write(command + "\n")
            self.proc.stdin.flush()
        except OSError as exc:
            self.broken = True
            raise SolverError(f"solver process died: {exc}") from None

    def read_response(self, timeout: float | None) -> str:
        """Next complete S-expression or atom, skipping comment lines."""
        deadline = None if timeout is None else time.monotonic() + timeout
        buf = ""
        depth = 0
        while True:
            remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
            try:
                line = self._lines.get(timeout=remaining)
            except queue.Empty:
                self._kill()
                raise SolverTimeout(f"no answer within {timeout:g}s") from None
            if line is None:
                self.broken = True
                raise SolverError(f"solver process terminated unexpectedly{': ' + buf if buf else ''}")
            stripped = line.strip()
            if not buf and (not stripped or stripped.startswith(";")):
                continue
            buf += line
            depth += _paren_balance(line)
            if depth <= 0:
                reply = buf.strip()
                if reply.startswith("(error"):
                    self.broken = True
                    raise SolverError(f"solver reported {reply}")
                if reply == "unsupported":
                    raise SolverError("solver does not support a command that was sent")
                return reply

    def declare(self, variables: Iterable[SymVar]):
        for v in variables:
            self.send(f"(declare-fun {smt.quote(v.name)} () {v.sort})")

    def assert_(self, term):
        self.send(f"(assert {smt.to_smt(term)})")

    def push(self):
        self.send("(push 1)")
        self.depth += 1

    def pop(self):
        if self.depth == 0:
            raise SolverError("pop without matching push")
        self.send("(pop 1)")
        self.depth -= 1

    def check_sat(self) -> str:
        self.send("(check-sat)")
        self.checks += 1
        reply = self.read_response(self.timeout)
        if reply not in (SAT, UNSAT, UNKNOWN):
            self.broken = True
            raise SolverError(f"unexpected check-sat reply {reply!r}")
        return reply

    def get_values(self, variables: Sequence[SymVar]) -> dict:
        out = {}
        for chunk in range(0, len(variables), 500):
            part = variables[chunk:chunk + 500]
            if not part:
                continue
            self.send("(get-value (" + " ".join(smt.quote(v.name) for v in part) + "))")
            reply = self.read_response(self.timeout)
            try:
                pairs = parse_sexpr(reply)
                by_name = {v.name: v for v in part}
                for name, raw in pairs:
                    name = name[1:-1] if name.startswith("|") else name
                    out[name] = _value(raw, by_name[name].sort)
            except (ValueError, KeyError, TypeError) as exc:
                self.broken = True
                raise SolverError(f"malformed get-value reply {reply[:200]!r}: {exc}") from None
        return out


def _paren_balance(line: str) -> int:
    # ignore parentheses inside |quoted| symbols and "strings"
    line = re.sub(r'\|[^|]*\||"(?:[^"]|"")*"', "", line)
    return line.count("(") - line.count(")")


_SEXPR_TOKEN = re.compile(r'\s*(\(|\)|\|[^|]*\||"(?:[^"]|"")*"|[^\s()]+)')


def parse_sexpr(text: str):
    """Parse one S-expression into nested lists of atom strings."""
    tokens = _SEXPR_TOKEN.findall(text)
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of S-expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise ValueError("unbalanced S-expression")
            pos += 1
            return items
        if tok == ")":
            raise ValueError("unexpected ')'")
        return tok

    return parse()


def _number(raw) -> Fraction:
    if isinstance(raw, str):
        return Fraction(raw)
    op, *args = raw
    if op == "-" and len(args) == 1:
        return -_number(args[0])
    if op == "/" and len(args) == 2:
        return _number(args[0]) / _number(args[1])
    if op == "to_real" and len(args) == 1:
        return _number(args[0])
    raise ValueError(f"not a numeric literal: {raw!r}")


def _value(raw, sort: str):
    if sort == BOOL:
        if raw not in ("true", "false"):
            raise ValueError(f"not a boolean: {raw!r}")
        return raw == "true"
    num = _number(raw)
    if sort == REAL:
        return num
    if num.denominator != 1:
        raise ValueError(f"non-integral value {raw!r} for Int")
    return int(num)


# --- high-level operations -------------------------------------------------

def load(session: SolverSession, artifact: EncodingArtifact):
    session.send(f"(set-logic {artifact.logic})")
    session.declare(artifact.variables)
    for a in artifact.assertions:
        session.assert_(a)


def check(session: SolverSession, artifact: EncodingArtifact, extra: Sequence = (), *, loaded: bool = False) -> Verdict:
    """Satisfiability of the encoding (plus `extra` assertions, scoped by push/pop)."""
    if not loaded:
        load(session, artifact)
    if extra:
        session.push()
        for a in extra:
            session.assert_(a)
    try:
        status = session.check_sat()
        model = session.get_values(artifact.variables) if status == SAT else {}
    except SolverTimeout:
        return Verdict(TIMEOUT)
    if extra:
        session.pop()
    return Verdict(status, model)


@dataclass
class MinimizeResult:
    value: int | None
    model: dict
    timed_out: bool = False
    checks: int = 0

    @property
    def optimal(self) -> bool:
        return self.value is not None and not self.timed_out


def minimize(session: SolverSession, artifact: EncodingArtifact, upper: int | None = None,
             *, loaded: bool = False) -> MinimizeResult:
    """Minimum of the objective by binary search over ``objective <= k`` checks.

    Returns ``value=None`` when the encoding is unsatisfiable. On a timeout the
    best model found so far is returned with ``timed_out`` set; its value is
    then only an upper bound.
    """
    if not loaded:
        load(session, artifact)
    obj = artifact.objective
    first = check(session, artifact, loaded=True)
    if first.status == TIMEOUT or first.status == UNKNOWN:
        return MinimizeResult(None, {}, timed_out=True, checks=session.checks)
    if first.status == UNSAT:
        return MinimizeResult(None, {}, checks=session.checks)
    best = first.model
    lo, hi = 0, best[obj.name]
    if upper is not None and hi > upper:
        # the first model is often far from optimal; jump straight to the known bound
        verdict = check(session, artifact, [smt.le(obj, upper)], loaded=True)
        if verdict.status == SAT:
            best = verdict.model
            hi = best[obj.name]
        elif verdict.status == UNSAT:
            lo = upper + 1
        else:
            return MinimizeResult(best[obj.name], best, timed_out=True, checks=session.checks)
    while lo < hi:
        mid = (lo + hi) // 2
        verdict = check(session, artifact, [smt.le(obj, mid)], loaded=True)
        if verdict.status == SAT:
            best = verdict.model
            hi = best[obj.name]
        elif verdict.status == UNSAT:
            lo = mid + 1
        else:
            return MinimizeResult(best[obj.name], best, timed_out=True, checks=session.checks)
    return MinimizeResult(hi, best, checks=session.checks)


def minimize_linear(session: SolverSession, artifact: EncodingArtifact, *, loaded: bool = False) -> MinimizeResult:
    """Minimum by strict descent: ask for ``objective < best`` until unsat."""
    if not loaded:
        load(session, artifact)
    obj = artifact.objective
    verdict = check(session, artifact, loaded=True)
    if verdict.status != SAT:
        return MinimizeResult(None, {}, timed_out=verdict.status != UNSAT, checks=session.checks)
    best = verdict.model
    while True:
        verdict = check(session, artifact, [smt.le(obj, best[obj.name] - 1)], loaded=True)
        if verdict.status == UNSAT:
            return MinimizeResult(best[obj.name], best, checks=session.checks)
        if verdict.status != SAT:
            return MinimizeResult(best[obj.name], best, timed_out=True, checks=session.checks)
        best = verdict.model


def minimize_native(session: SolverSession, artifact: EncodingArtifact) -> MinimizeResult:
    """Single optimisation query for solvers with a ``minimize`` command (z3)."""
    # no set-logic: z3 rejects optimisation commands under some fixed logics
    session.declare(artifact.variables)
    for a in artifact.assertions:
        session.assert_(a)
    session.send(f"(minimize {smt.quote(artifact.objective.name)})")
    verdict = check(session, artifact, loaded=True)
    if verdict.status != SAT:
        return MinimizeResult(None, {}, timed_out=verdict.status != UNSAT, checks=session.checks)
    return MinimizeResult(verdict.model[artifact.objective.name], verdict.model, checks=session.checks)
