import random

from hypothesis import given, settings
from hypothesis import strategies as st

from umisim.digraph import Digraph, generate
from umisim.protocols.prefix import (
    MergedTopology,
    PrefixProtocol,
    PrefixState,
    Record,
    drop_prefixes,
    is_prefix,
    prefix_mis_output,
    prefix_related,
    prefix_update,
)
from umisim.runtime import SYNC, SchedulerKind, run

F = frozenset


def test_prefix_relations():
    assert is_prefix("", "01")
    assert is_prefix("01", "01")
    assert not is_prefix("01", "0")
    assert prefix_related("0", "011") and prefix_related("011", "0")
    assert not prefix_related("01", "00")


def test_lone_process_first_activation():
    g = Digraph(1)
    p = PrefixProtocol(g)
    s = p.execute(0, PrefixState(), (), random.Random(0))
    assert len(s.id) == 1
    assert s.topology == {Record(s.id, F())}


def test_shorter_prefix_record_dropped():
    by_id = drop_prefixes({Record("10", F({"0"})), Record("1", F({"11"}))})
    assert set(by_id) == {"10"}


def test_fake_prefix_of_live_id_outgrown():
    # a record naming "01" disappears once its owner's id is "011..."
    topo = prefix_update("0110", F(), [F({Record("01", F())})])
    assert {r.id for r in topo} == {"0110"}


def test_two_cycle_larger_id_wins():
    topo = {Record("10", F({"01"})), Record("01", F({"10"}))}
    assert prefix_mis_output("10", topo)
    assert not prefix_mis_output("01", topo)


def test_mis_invariant_under_extension():
    topo = {Record("10", F({"01"})), Record("01", F({"10"}))}
    grown = {Record("101", F({"01"})), Record("01", F({"1011"}))}
    assert prefix_mis_output("10", topo) == prefix_mis_output("101", grown)
    assert prefix_mis_output("01", topo) == prefix_mis_output("01", grown)


def test_self_only_topology_outputs_true():
    assert prefix_mis_output("0", {Record("0", F())})


def test_pred_ids_map_to_extensions():
    m = MergedTopology(drop_prefixes({Record("0110", F({"1"})), Record("10", F()), Record("11", F())}))
    assert sorted(m.canon("1")) == ["10", "11"]
    assert m.canon("01101") == ["0110"]
    assert m.canon("000") == ["000"]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_identifier_growth(seed):
    g = generate("random:6:0.4", seed)
    p = PrefixProtocol(g)
    t = run(p, g, p.zero_configuration(), SchedulerKind.parse("dist"), seed, 6)
    for before, after, act in zip(t.configurations, t.configurations[1:], t.activations):
        for i in range(g.n):
            if i in act:
                assert len(after[i].id) == len(before[i].id) + 1
                assert after[i].id.startswith(before[i].id)
            else:
                assert after[i] == before[i]


def test_state_invariants_after_update():
    g = generate("scc:6:4", 2)
    p = PrefixProtocol(g)
    t = run(p, g, p.zero_configuration(), SchedulerKind(SYNC), 1, 12)
    for s in t.configurations[-1]:
        ids = sorted(r.id for r in s.topology)
        assert s.id in ids
        assert all(not b.startswith(a) for a, b in zip(ids, ids[1:]))
