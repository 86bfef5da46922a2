import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpnalign.dpn import (
    DPN, ExplorationError, FiringError, NetError, State, Transition, TransitionFiring, enabled, explore, fire,
    is_one_bounded, reachable_transition_sets, replay, shortest_final_distance, validate_run,
)
from dpnalign.guards import parse_guard
from dpnalign.oracle import OracleError, _firings, enumerate_runs
from dpnalign.samples import random_instance, running_example, sat_gadget
from dpnalign.values import Sort


def f(net, tid, **writes):
    return TransitionFiring(net.transition(tid), writes)


def test_example_runs_are_valid():
    net = running_example()
    assert validate_run(net, [f(net, "a", x=2), f(net, "b", y=1), f(net, "tau")])
    assert validate_run(net, [f(net, "a", x=1), f(net, "tau1"), f(net, "d", y=1)])


def test_guard_and_write_set_checks():
    net = running_example()
    assert not validate_run(net, [f(net, "a", x=-1), f(net, "tau1")])       # x^w >= 0 fails
    assert not validate_run(net, [f(net, "a", x=4), f(net, "tau1")])        # x^r <= 3 fails later
    assert not validate_run(net, [f(net, "a", x=1), f(net, "tau1"), f(net, "d", y=2)])  # y^w = y^r + 1
    assert not validate_run(net, [f(net, "a", x=1, y=3), f(net, "tau1")])   # writes outside write(t)
    assert not validate_run(net, [f(net, "a", x=1)])                        # final marking not reached


def test_explicit_reads_must_match_state():
    net = running_example()
    s1 = fire(net, net.initial_state, f(net, "a", x=1))
    assert enabled(net, s1, TransitionFiring(net.transition("tau1"), {}, {"x": 1, "y": 0}))
    assert not enabled(net, s1, TransitionFiring(net.transition("tau1"), {}, {"x": 2, "y": 0}))


def test_fire_rejects_disabled_and_updates_state():
    net = running_example()
    with pytest.raises(FiringError):
        fire(net, net.initial_state, f(net, "b", y=1))
    s = fire(net, net.initial_state, f(net, "a", x=3))
    assert s.marking["p1"] == 1 and s.marking["p0"] == 0
    assert s.assignment == {"x": 3, "y": 0}
    states = replay(net, [f(net, "a", x=3), f(net, "tau1"), f(net, "d", y=1), f(net, "d", y=2)])
    assert states[-1].assignment["y"] == 2


def weighted_net():
    ts = [Transition("t", "t"), Transition("u", "u")]
    return DPN(["p", "q"], ts, {("p", "t"): 2, ("t", "q"): 1, ("q", "u"): 1, ("u", "p"): 1},
               initial_marking={"p": 2}, final_marking={"q": 1})


def test_enabledness_uses_at_least_semantics():
    net = weighted_net()
    # exactly as many tokens as the arc weight is enough
    assert enabled(net, net.initial_state, TransitionFiring(net.transition("t")))
    assert validate_run(net, [TransitionFiring(net.transition("t"))])


def test_structure_errors():
    t = Transition("t", "a")
    with pytest.raises(NetError):
        DPN(["p"], [t, Transition("u", "a")], {})                # labels not injective
    with pytest.raises(NetError):
        DPN(["p"], [t], {("p", "p"): 1})                           # arc between places
    with pytest.raises(NetError):
        DPN(["p"], [Transition("t", "a", parse_guard("z > 0"))], {})  # undeclared variable
    with pytest.raises(NetError):
        DPN(["p"], [t], {}, {"x": Sort.INT}, initial_assignment={"x": "no"})
    with pytest.raises(NetError):
        DPN(["t"], [t], {})                                        # places and transitions overlap


def test_silent_labels_may_repeat_when_relaxed():
    ts = [Transition("t1", None), Transition("t2", None)]
    with pytest.raises(NetError):
        DPN(["p"], ts, {})
    DPN(["p"], ts, {}, strict_labels=False)


def test_initial_assignment_defaults_per_sort():
    net = DPN(["p"], [Transition("t", "a")], {},
              {"b": Sort.BOOL, "i": Sort.INT, "r": Sort.RAT, "s": Sort.STRING})
    assert dict(net.initial_assignment) == {"b": False, "i": 0, "r": 0, "s": ""}
    net2 = net.with_initial_assignment({"i": 5})
    assert net2.initial_assignment["i"] == 5 and net2.arcs == net.arcs


def test_control_flow_exploration():
    net = running_example()
    assert shortest_final_distance(net) == 2
    assert is_one_bounded(net)
    assert len(explore(net)) == 4
    reach = reachable_transition_sets(net, 3)
    assert reach.exact
    assert reach.transitions[0] == {"a"}
    assert reach.transitions[1] == {"b", "tau1"}
    assert reach.transitions[2] == {"tau", "d"}
    assert reach.writes[0] == {"x"}


def test_unbounded_net_falls_back():
    ts = [Transition("gen", "g"), Transition("end", "e")]
    net = DPN(["p", "q", "f"], ts, {("p", "gen"): 1, ("gen", "p"): 1, ("gen", "q"): 1, ("p", "end"): 1,
                                     ("end", "f"): 1}, initial_marking={"p": 1}, final_marking={"f": 1})
    assert not is_one_bounded(net)
    reach = reachable_transition_sets(net, 6)
    assert not reach.exact and reach.transitions[5] == {"gen", "end"}


def test_unreachable_final_marking():
    net = DPN(["p", "q"], [Transition("t", "t")], {("p", "t"): 1}, initial_marking={"p": 1},
              final_marking={"q": 1})
    with pytest.raises(ExplorationError):
        shortest_final_distance(net)


def test_guard_examples():
    net = running_example()
    s0 = net.initial_state
    assert enabled(net, s0, f(net, "a", x=2))
    assert not enabled(net, s0, f(net, "b", y=1))
    s = replay(net, [f(net, "a", x=2), f(net, "b", y=1)])[-1]
    assert enabled(net, s, f(net, "tau"))


def test_self_loop_keeps_marking():
    net = running_example()
    s = replay(net, [f(net, "a", x=1), f(net, "tau1"), f(net, "d", y=1)])[-1]
    s2 = fire(net, s, TransitionFiring(net.transition("d"), {"y": 2}, {"y": 1}))
    assert s2.marking == s.marking and s2.assignment["y"] == 2


def test_trivial_distances():
    net = DPN(["p"], [Transition("t", "t")], {("p", "t"): 1, ("t", "p"): 1},
              initial_marking={"p": 1}, final_marking={"p": 1})
    assert shortest_final_distance(net) == 0
    assert validate_run(net, [])
    assert reachable_transition_sets(net, 0).transitions == []
    gadget = sat_gadget(parse_guard("v0'", {"v0": Sort.BOOL}), ("v0",))
    assert shortest_final_distance(gadget) == 1


# --- properties over random nets -------------------------------------------------------

@st.composite
def random_runs(draw):
    inst = random_instance(draw(st.integers(0, 300)))
    state = inst.dpn.initial_state
    run = []
    for _ in range(draw(st.integers(0, 5))):
        options = list(_firings(inst.dpn, state, inst.domains))
        if not options:
            break
        fi = draw(st.sampled_from(options))
        run.append((state, fi))
        state = fire(inst.dpn, state, fi)
    return inst, run


@settings(max_examples=80, deadline=None)
@given(random_runs())
def test_firing_obeys_the_flow_equation(case):
    inst, run = case
    net = inst.dpn
    for state, fi in run:
        after = fire(net, state, fi)
        t = fi.transition.id
        for p in net.places:
            assert after.marking[p] - state.marking[p] == net.post[t].get(p, 0) - net.pre[t].get(p, 0)
        for v in net.variables:
            if v not in fi.writes:
                assert after.assignment[v] == state.assignment[v]


@settings(max_examples=80, deadline=None)
@given(random_runs(), st.integers(1, 3))
def test_extra_tokens_never_disable(case, extra):
    inst, run = case
    net = inst.dpn
    for state, fi in run:
        for p in net.places:
            if p in net.pre[fi.transition.id]:
                continue
            more = dict(state.marking)
            more[p] += extra
            assert enabled(net, State(more, state.assignment), fi)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 300))
def test_step_sets_cover_every_run(seed):
    inst = random_instance(seed)
    reach = reachable_transition_sets(inst.dpn, inst.bound)
    try:
        for r in enumerate_runs(inst.dpn, inst.domains, inst.bound, max_nodes=20_000):
            for i, fi in enumerate(r):
                assert fi.transition.id in reach.transitions[i]
    except OracleError:
        pass
