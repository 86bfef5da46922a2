"""Distance-based alignment costs.

A cost is parameterised by three penalties: for log moves, model moves and
synchronous moves. Infinite penalties are represented by ``math.inf``; all
finite costs stay Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from dpnalign.dpn import TransitionFiring
from dpnalign.log import Event, LogTrace
from dpnalign.values import canonical

INF = math.inf


@dataclass(frozen=True)
class PenaltyFunctions:
    name: str
    log_move: Callable[[Event], int]
    model_move: Callable[[TransitionFiring], int]
    sync_move: Callable[[Event, TransitionFiring], float]
    comparison_based: bool = True


def write_cost(firing_or_transition) -> int:
    t = getattr(firing_or_transition, "transition", firing_or_transition)
    return 0 if t.silent else len(t.write_set) + 1


def mismatched_writes(event: Event, firing: TransitionFiring) -> int:
    """Event variables written by the firing with a different value."""
    n = 0
    for v, value in event.assignment.items():
        if v in firing.writes and canonical(value) != canonical(firing.writes[v]):
            n += 1
    return n


def _std_sync(event: Event, firing: TransitionFiring):
    if firing.transition.label != event.activity:
        return INF
    return mismatched_writes(event, firing)


def _lev_sync(event: Event, firing: TransitionFiring):
    return 0 if firing.transition.label == event.activity else INF


def standard_profile() -> PenaltyFunctions:
    """Unit log moves, write-count model moves, data mismatches on sync moves."""
    return PenaltyFunctions("standard", lambda e: 1, write_cost, _std_sync)


def levenshtein_profile() -> PenaltyFunctions:
    """Label-only edit distance: data values are ignored."""
    return PenaltyFunctions("levenshtein", lambda e: 1, lambda f: 1, _lev_sync)


PROFILES = {"standard": standard_profile, "levenshtein": levenshtein_profile}


def profile(name: str) -> PenaltyFunctions:
    try:
        return PROFILES[name]()
    except KeyError:
        raise ValueError(f"unknown cost profile {name!r}; choose from {sorted(PROFILES)}") from None


# --- moves and alignments --------------------------------------------------

LOG, MODEL, SYNC = "log", "model", "sync"


@dataclass(frozen=True)
class Move:
    event: Event | None = None
    firing: TransitionFiring | None = None

    def __post_init__(self):
        if self.event is None and self.firing is None:
            raise ValueError("a move needs an event, a firing, or both")

    @property
    def kind(self) -> str:
        if self.firing is None:
            return LOG
        if self.event is None:
            return MODEL
        return SYNC


def log_move(e: Event) -> Move:
    return Move(e, None)


def model_move(f: TransitionFiring) -> Move:
    return Move(None, f)


def sync_move(e: Event, f: TransitionFiring) -> Move:
    return Move(e, f)


def log_projection(alignment: Sequence[Move]) -> tuple:
    return tuple(m.event for m in alignment if m.event is not None)


def model_projection(alignment: Sequence[Move]) -> tuple:
    return tuple(m.firing for m in alignment if m.firing is not None)


def move_cost(move: Move, pf: PenaltyFunctions):
    if move.kind == LOG:
        return pf.log_move(move.event)
    if move.kind == MODEL:
        return pf.model_move(move.firing)
    return pf.sync_move(move.event, move.firing)


def alignment_cost(alignment: Sequence[Move], pf: PenaltyFunctions):
    return sum((move_cost(m, pf) for m in alignment), 0)


# --- edit distance ---------------------------------------------------------

def edit_distance(trace: LogTrace | Sequence[Event], run: Sequence[TransitionFiring], pf: PenaltyFunctions):
    """Return ``(distance, D)`` where ``D[i][j]`` is the distance of the prefixes."""
    events = list(trace)
    m, n = len(events), len(run)
    D = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        D[i][0] = D[i - 1][0] + pf.log_move(events[i - 1])
    for j in range(1, n + 1):
        D[0][j] = D[0][j - 1] + pf.model_move(run[j - 1])
    for i in range(1, m + 1):
        e = events[i - 1]
        pl = pf.log_move(e)
        for j in range(1, n + 1):
            f = run[j - 1]
            D[i][j] = min(
                D[i - 1][j - 1] + pf.sync_move(e, f),
                pl + D[i - 1][j],
                pf.model_move(f) + D[i][j - 1],
            )
    return D[m][n], D


def reconstruct_alignment(trace, run, D, pf: PenaltyFunctions) -> tuple:
    """Backtrace through `D`, preferring log moves, then model moves, then sync."""
    events = list(trace)
    i, j = len(events), len(run)
    moves = []
    while i > 0 or j > 0:
        if j == 0 or (i > 0 and D[i][j] == pf.log_move(events[i - 1]) + D[i - 1][j]):
            moves.append(log_move(events[i - 1]))
            i -= 1
        elif i == 0 or D[i][j] == pf.model_move(run[j - 1]) + D[i][j - 1]:
            moves.append(model_move(run[j - 1]))
            j -= 1
        else:
            moves.append(sync_move(events[i - 1], run[j - 1]))
            i -= 1
            j -= 1
    return tuple(reversed(moves))


def render_alignment(alignment: Sequence[Move]) -> str:
    """Three-column text table: log event | model firing | move kind."""
    rows = [("log", "model", "kind")]
    for mv in alignment:
        rows.append((
            str(mv.event) if mv.event is not None else "≫",
            str(mv.firing) if mv.firing is not None else "≫",
            mv.kind,
        ))
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    return "\n".join(f"{a:<{w0}} | {b:<{w1}} | {c}" for a, b, c in rows)
