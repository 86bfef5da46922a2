"""Optimal data-aware alignments of event logs against data Petri nets."""

from dpnalign.align import ConformanceResult, conformance, decode_alignment, decode_run, transfer_alignment
from dpnalign.cluster import AtomSet, cluster_log, extract_atoms, signature
from dpnalign.cost import (
    Move, PenaltyFunctions, alignment_cost, edit_distance, levenshtein_profile, log_move, model_move,
    profile, standard_profile, sync_move,
)
from dpnalign.dpn import DPN, State, Transition, TransitionFiring, enabled, fire, validate_run
from dpnalign.encoder import EncodingOptions, encode
from dpnalign.guards import parse_guard
from dpnalign.log import Event, EventLog, LogTrace, dedupe, trace
from dpnalign.values import Sort

__version__ = "0.1.0"

__all__ = [
    "AtomSet", "ConformanceResult", "DPN", "EncodingOptions", "Event", "EventLog", "LogTrace", "Move",
    "PenaltyFunctions", "Sort", "State", "Transition", "TransitionFiring", "alignment_cost", "cluster_log",
    "conformance", "decode_alignment", "decode_run", "dedupe", "edit_distance", "enabled", "encode",
    "extract_atoms", "fire", "levenshtein_profile", "log_move", "model_move", "parse_guard", "profile",
    "signature", "standard_profile", "sync_move", "trace", "transfer_alignment", "validate_run",
]
