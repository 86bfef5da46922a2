import stat
import sys

import pytest

from dpnalign.align import NoAlignmentError, conformance, transfer_alignment
from dpnalign.cost import alignment_cost, levenshtein_profile, log_projection, model_projection, standard_profile
from dpnalign.dpn import DPN, Transition, validate_run
from dpnalign.guards import parse_guard
from dpnalign.log import trace
from dpnalign.samples import clustering_traces, running_example
from dpnalign.values import Sort

pytestmark = pytest.mark.solver
NET = running_example()


def test_decoded_alignment_is_consistent():
    tr = trace(("a", {"x": 4}), ("b", {"y": 1}), id="t")
    res = conformance(NET, tr, standard_profile())
    assert res.optimal and res.cost == 1 and res.bound == 4
    assert log_projection(res.alignment) == tuple(tr)
    assert model_projection(res.alignment) == res.run
    assert validate_run(NET, res.run)
    assert alignment_cost(res.alignment, standard_profile()) == 1
    assert res.checks >= 1 and res.solve_time > 0


def test_levenshtein_counts_silent_steps():
    tr = trace(("a", {"x": 2}), ("b", {"y": 1}))
    assert conformance(NET, tr, levenshtein_profile()).cost == 1


def test_bound_retry():
    tr = trace(("a", {"x": 2}), ("b", {"y": 1}))
    res = conformance(NET, tr, standard_profile(), bound=1, retry=2)
    assert res.bound == 2 and res.optimal
    with pytest.raises(NoAlignmentError):
        conformance(NET, tr, standard_profile(), bound=1, retry=0)


def test_strings_and_rationals_round_trip():
    sorts = {"s": Sort.STRING, "r": Sort.RAT}
    ts = [Transition("t", "t", parse_guard("s' != \"bad\" && r' > 1/2", sorts))]
    net = DPN(["p", "q"], ts, {("p", "t"): 1, ("t", "q"): 1}, sorts,
              initial_marking={"p": 1}, final_marking={"q": 1})
    ok = conformance(net, trace(("t", {"s": "fine", "r": 1})), standard_profile())
    assert ok.cost == 0 and ok.run[0].writes["s"] == "fine"
    bad = conformance(net, trace(("t", {"s": "bad", "r": 0})), standard_profile())
    assert bad.cost == 2
    assert bad.run[0].writes["s"] != "bad" and bad.run[0].writes["r"] > 0.5


def test_dump_smt(tmp_path):
    conformance(NET, trace(("a", {"x": 4}), id="t/1"), standard_profile(), dump_smt=str(tmp_path))
    files = [p.name for p in tmp_path.iterdir()]
    assert files == ["t_1.n3.smt2"]
    assert "(check-sat)" in (tmp_path / files[0]).read_text()


def test_timeout_without_model(tmp_path):
    path = tmp_path / "sleepy"
    path.write_text(f"#!{sys.executable}\nimport sys, time\n"
                    "for line in sys.stdin:\n    if 'check-sat' in line: time.sleep(30)\n")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    res = conformance(NET, trace("a"), standard_profile(), solver=str(path), timeout=0.3)
    assert res.timed_out and res.cost is None and not res.optimal


def test_transfer_alignment():
    e1, e2, e3, _ = clustering_traces()
    pf = standard_profile()
    res = conformance(NET, e1, pf)
    moved = transfer_alignment(res.alignment, e1, e2, NET)
    assert log_projection(moved) == tuple(e2)
    assert validate_run(NET, model_projection(moved))
    assert alignment_cost(moved, pf) == res.cost
    with pytest.raises(ValueError):
        transfer_alignment(res.alignment, e1, e3, NET)


def test_empty_trace_costs_the_cheapest_run():
    res = conformance(NET, trace(), standard_profile())
    assert res.cost == 2 and [m.kind for m in res.alignment] == ["model", "model"]   # a writes x, tau1 is free


def test_zero_bound_when_already_final():
    net = DPN(["p"], [Transition("t", "t")], {("p", "t"): 1, ("t", "p"): 1},
              initial_marking={"p": 1}, final_marking={"p": 1})
    res = conformance(net, trace(), standard_profile())
    assert res.bound == 0 and res.run == () and res.cost == 0


def test_unmatched_labels_give_only_log_and_model_moves():
    res = conformance(NET, trace("z", "z"), levenshtein_profile(), bound=2, retry=0)
    kinds = [m.kind for m in res.alignment]
    assert res.cost == 4 and kinds.count("log") == 2 and kinds.count("model") == 2


def test_transfer_to_itself_is_identity():
    e1 = clustering_traces()[0]
    res = conformance(NET, e1, standard_profile())
    assert transfer_alignment(res.alignment, e1, e1, NET) == res.alignment
