import pytest

from dpnalign.cost import alignment_cost, levenshtein_profile, standard_profile
from dpnalign.dpn import validate_run
from dpnalign.log import trace
from dpnalign.oracle import FiniteDomains, OracleError, brute_force_optimal, enumerate_runs
from dpnalign.guards import parse_guard
from dpnalign.samples import random_instance, running_example, sat_gadget, sat_gadget_trace
from dpnalign.values import Sort

NET = running_example()


def test_domains_cover_constants_and_trace_values():
    tr = trace(("a", {"x": 7}), ("b", {"y": 2}))
    d = FiniteDomains.covering(NET, [tr], {"y": [9]})
    assert set(d["x"]) == {0, 7}   # only constants of guards on transitions writing x
    assert set(d["y"]) >= {0, 2, 9}


def test_enumerated_runs_are_valid_and_bounded():
    d = FiniteDomains({"x": (0, 3, 4), "y": (0, 1)})
    runs = list(enumerate_runs(NET, d, 3))
    assert runs and all(validate_run(NET, r) and len(r) <= 3 for r in runs)
    # a with x in {0, 3} (4 breaks the later guards), then b (y = 1) and tau, or tau1 and optionally d
    assert len(runs) == 2 + 2 + 2


def test_example_optima():
    d = FiniteDomains.covering(NET, extra={"x": range(0, 5), "y": range(0, 3)})
    fit = trace(("a", {"x": 2}), ("b", {"y": 1}))
    off = trace(("a", {"x": 4}), ("b", {"y": 1}))
    assert brute_force_optimal(NET, fit, standard_profile(), d, 4).cost == 0
    res = brute_force_optimal(NET, off, standard_profile(), d, 4)
    assert res.cost == 1 and alignment_cost(res.alignment, standard_profile()) == 1
    assert brute_force_optimal(NET, off, levenshtein_profile(), d, 4).cost == 1   # tau still costs 1


def test_node_cap():
    inst = random_instance(0)
    with pytest.raises(OracleError):
        brute_force_optimal(inst.dpn, inst.trace, standard_profile(), inst.domains, 50, max_nodes=1)


def test_unreachable_within_bound_is_infinite():
    d = FiniteDomains({"x": (0,), "y": (0,)})
    assert brute_force_optimal(NET, trace("a"), standard_profile(), d, 1).cost == float("inf")


def test_optimum_is_stable_under_larger_domains():
    checked = 0
    for seed in range(40):
        inst = random_instance(seed)
        try:
            base = brute_force_optimal(inst.dpn, inst.trace, standard_profile(), inst.domains, inst.bound, 30_000)
        except OracleError:
            continue
        wider = FiniteDomains({v: tuple(xs) + tuple(_extra(xs)) for v, xs in inst.domains.values.items()})
        try:
            big = brute_force_optimal(inst.dpn, inst.trace, standard_profile(), wider, inst.bound, 300_000)
        except OracleError:
            continue
        assert big.cost == base.cost, seed
        checked += 1
    assert checked >= 10


def _extra(xs):
    nums = [x for x in xs if not isinstance(x, (bool, str))]
    if not nums:
        return ()
    return tuple(v for v in (min(nums) - 7, max(nums) + 7) if v not in xs)


def test_zero_length_runs():
    d = FiniteDomains({"x": (0,), "y": (0,)})
    assert list(enumerate_runs(NET, d, 0)) == []


def test_gadget_runs():
    sorts = {"p": Sort.BOOL, "q": Sort.BOOL}
    net = sat_gadget(parse_guard("p' && !q'", sorts), ("p", "q"))
    runs = list(enumerate_runs(net, FiniteDomains({"p": (False, True), "q": (False, True)}), 1))
    shapes = sorted((r[0].transition.label, tuple(sorted(r[0].writes.items()))) for r in runs)
    assert shapes == [("phi", (("p", True), ("q", False))), ("top", ())]
    contradiction = sat_gadget(parse_guard("p' && !p'", sorts), ("p",))
    res = brute_force_optimal(contradiction, sat_gadget_trace(), standard_profile(),
                              FiniteDomains({"p": (False, True)}), 1)
    assert res.cost == 2
