"""Per-trace result tables (CSV or JSON)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import IO, Sequence

from dpnalign.cost import Move
from dpnalign.values import format_value

TIMEOUT_MARK = "TIMEOUT"
COLUMNS = ("trace_id", "multiplicity", "cluster_id", "cost", "solve_time", "encode_time")


@dataclass
class TraceOutcome:
    trace_id: str
    multiplicity: int
    cluster_id: int
    cost: int | None
    timed_out: bool = False
    solve_time: float = 0.0
    encode_time: float = 0.0
    alignment: tuple = ()
    representative: bool = True

    @property
    def cost_field(self):
        return TIMEOUT_MARK if self.timed_out or self.cost is None else self.cost


def _value_map(mapping) -> dict:
    return {k: format_value(v) for k, v in sorted(mapping.items())}


def alignment_rows(alignment: Sequence[Move]) -> list:
    """(log event | model firing | move kind) rows with plain-JSON values."""
    rows = []
    for mv in alignment:
        rows.append({
            "log": None if mv.event is None else {"activity": mv.event.activity,
                                                  "data": _value_map(mv.event.assignment)},
            "model": None if mv.firing is None else {"transition": mv.firing.transition.id,
                                                     "label": mv.firing.transition.label,
                                                     "writes": _value_map(mv.firing.writes)},
            "kind": mv.kind,
        })
    return rows


def write_report(outcomes: Sequence[TraceOutcome], fmt: str, sink: IO[str], verbose: bool = False):
    if fmt == "csv":
        w = csv.writer(sink, lineterminator="\n")
        w.writerow(COLUMNS)
        for o in outcomes:
            w.writerow([o.trace_id, o.multiplicity, o.cluster_id, o.cost_field,
                        f"{o.solve_time:.4f}", f"{o.encode_time:.4f}"])
    elif fmt == "json":
        rows = []
        for o in outcomes:
            row = {"trace_id": o.trace_id, "multiplicity": o.multiplicity, "cluster_id": o.cluster_id,
                   "cost": o.cost_field, "solve_time": round(o.solve_time, 4),
                   "encode_time": round(o.encode_time, 4), "representative": o.representative}
            if verbose and not o.timed_out and o.cost is not None:
                row["alignment"] = alignment_rows(o.alignment)
            rows.append(row)
        json.dump({"traces": rows}, sink, indent=2, ensure_ascii=False)
        sink.write("\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
