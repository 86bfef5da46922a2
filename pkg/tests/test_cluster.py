from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from dpnalign.cluster import Atom, cluster_log, equivalent, extract_atoms, signature, value_equiv
from dpnalign.cost import standard_profile
from dpnalign.dpn import DPN, Transition
from dpnalign.guards import parse_guard
from dpnalign.log import dedupe, trace
from dpnalign.oracle import FiniteDomains, brute_force_optimal
from dpnalign.samples import clustering_traces, running_example
from dpnalign.values import Sort

NET = running_example()
ATOMS = extract_atoms(NET)


def test_normalisation_merges_negated_atoms():
    assert Atom("x", "<=", 3).base == Atom("x", ">", 3).base
    assert Atom("x", "<", 0).base == (">=", 0)
    assert Atom("x", "!=", 1).base == ("=", 1)
    assert ATOMS.base_atoms("x") == ((">", 3), (">=", 0))


def test_bits_and_value_equivalence():
    assert ATOMS.bits("x", 2) == ATOMS.bits("x", 3) == (False, True)
    assert ATOMS.bits("x", 4) == (True, True)
    assert ATOMS.bits("x", -1) == (False, False)
    assert value_equiv(2, Fraction(5, 2), ATOMS.ats["x"])
    assert not value_equiv(3, 4, ATOMS.ats["x"])


def test_variable_comparisons_make_variables_unrestricted():
    sorts = {"x": Sort.INT, "y": Sort.INT, "b": Sort.BOOL, "s": Sort.STRING}
    ts = [
        Transition("t", "t", parse_guard("x' > y && b && s' = \"ok\"", sorts)),
        Transition("u", "u", parse_guard("3 < x", sorts)),
    ]
    atoms = extract_atoms(DPN(["p"], ts, {}, sorts))
    assert atoms.restricted == {"b", "s"}
    assert {str(a) for a in atoms.ats["s"]} == {'s = "ok"'}
    assert {str(a) for a in atoms.ats["b"]} == {"b = true"}


def test_partition_of_the_example_log():
    e1, e2, e3, e4 = clustering_traces()
    assert equivalent(e1, e2, ATOMS)
    assert not equivalent(e1, e3, ATOMS) and not equivalent(e2, e4, ATOMS)
    clusters = cluster_log(dedupe([e1, e2, e1, e3, e4]), ATOMS)
    assert [c.multiplicity for c in clusters] == [3, 1, 1]
    assert clusters.clusters[0].representative is e1


small_events = st.one_of(
    st.integers(-2, 6).map(lambda x: ("a", {"x": x})),
    st.integers(0, 3).map(lambda y: ("b", {"y": y})),
    st.integers(0, 3).map(lambda y: ("d", {"y": y})),
)
small_traces = st.lists(small_events, min_size=1, max_size=3).map(lambda evs: trace(*evs))


def _shift(x):
    """Another value in the same region of x >= 0, x <= 3."""
    if x < 0:
        return x - 1
    if x > 3:
        return x + 1
    return 3 - x


def region_shift(t):
    return trace(*[(e.activity, {v: _shift(x) if v == "x" else x for v, x in e.assignment.items()}) for e in t])


@given(small_traces)
def test_signature_ignores_values_inside_a_region(t):
    assert signature(t, ATOMS) == signature(region_shift(t), ATOMS)


@settings(max_examples=40, deadline=None)
@given(small_traces)
def test_equivalent_traces_have_equal_brute_force_cost(t1):
    t2 = region_shift(t1)
    domains = FiniteDomains.covering(NET, [t1, t2], {"x": range(-1, 5), "y": range(0, 5)})
    pf = standard_profile()
    assert brute_force_optimal(NET, t1, pf, domains, 5).cost == brute_force_optimal(NET, t2, pf, domains, 5).cost


def test_guard_free_net_restricts_everything():
    atoms = extract_atoms(DPN(["p"], [Transition("t", "t")], {}, {"x": Sort.INT}))
    assert atoms.restricted == {"x"} and atoms.ats["x"] == frozenset()
    assert equivalent(trace(("t", {"x": 1})), trace(("t", {"x": 99})), atoms)


def test_defined_variables_must_agree():
    assert not equivalent(trace(("a", {"x": 2})), trace("a"), ATOMS)
    assert not equivalent(trace(("b", {"y": 1})), trace(("b", {"y": 1, "x": 0})), ATOMS)


@given(st.lists(small_traces, min_size=3, max_size=12))
def test_equivalence_relation(ts):
    for a in ts:
        assert equivalent(a, a, ATOMS)
        for b in ts:
            assert equivalent(a, b, ATOMS) == equivalent(b, a, ATOMS)
            for c in ts:
                if equivalent(a, b, ATOMS) and equivalent(b, c, ATOMS):
                    assert equivalent(a, c, ATOMS)
    clusters = cluster_log(ts, ATOMS)
    assert sum(len(c.members) for c in clusters) == len(ts)
