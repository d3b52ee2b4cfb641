import pytest

from umisim.digraph import diameter, generate
from umisim.protocols.det import DetProtocol, TopoTuple, det_mis_output, det_update
from umisim.runtime import SYNC, SchedulerKind, run
from umisim.umis import check_umis, greedy_mis_vector

F = frozenset


def test_lone_process():
    assert det_update(5, F(), []) == {TopoTuple(5, F(), 0)}


def test_path_two_steps():
    # ids 1 -> 2, both activated twice from empty states
    s1 = s2 = F()
    for _ in range(2):
        s1, s2 = det_update(1, F(), []), det_update(2, F({1}), [s1])
    assert s2 == {TopoTuple(1, F(), 1), TopoTuple(2, F({1}), 0)}


def test_min_distance_wins():
    pred = F({TopoTuple(1, F(), 4)})
    pred2 = F({TopoTuple(1, F({3}), 0)})
    out = det_update(2, F({1}), [pred, pred2])
    assert TopoTuple(1, F({3}), 1) in out
    assert not any(t.id == 1 and t.dist == 5 for t in out)


def test_equal_distance_conflict_keeps_least_preds():
    a = F({TopoTuple(1, F({7}), 0)})
    b = F({TopoTuple(1, F({3, 9}), 0)})
    out = det_update(2, F({1}), [a, b])
    assert {t for t in out if t.id == 1} == {TopoTuple(1, F({3, 9}), 1)}


def test_unreachable_record_is_pruned():
    # 9 claims own id 2 as its predecessor, but nothing links 9 back to 2
    corrupted = F({TopoTuple(9, F({2}), 3), TopoTuple(1, F(), 0)})
    out = det_update(2, F({1}), [corrupted])
    assert all(t.id != 9 for t in out)


def test_mis_examples():
    assert det_mis_output(4, {TopoTuple(4, F(), 0)})
    cycle = {TopoTuple(1, F({3}), 2), TopoTuple(2, F({1}), 1), TopoTuple(3, F({2}), 0)}
    assert det_mis_output(3, cycle)
    assert not det_mis_output(1, cycle) and not det_mis_output(2, cycle)
    path = {TopoTuple(1, F(), 1), TopoTuple(2, F({1}), 0)}
    assert not det_mis_output(2, path)


def test_exact_topology_fixed_point():
    g = generate("scc:7:5", 3)
    p = DetProtocol(g, [10, 3, 7, 1, 8, 2, 5])
    config = tuple(p.exact_topology(i) for i in range(g.n))
    for i in range(g.n):
        assert p.execute(i, config[i], p.pred_states(config, i), None) == config[i]
    assert list(p.outputs(config)) == greedy_mis_vector(g, p.ids)


def test_quiescent_mode_goes_silent():
    for seed in range(5):
        g = generate("random:10:0.25", seed)
        p = DetProtocol(g, quiescent=True)
        t = run(p, g, p.zero_configuration(), SchedulerKind(SYNC), seed, 10 * (diameter(g) + 2))
        assert t.terminal
        assert check_umis(g, p.outputs(t.configurations[-1]))


def test_default_mode_never_silent():
    g = generate("path:3")
    p = DetProtocol(g)
    t = run(p, g, p.zero_configuration(), SchedulerKind(SYNC), 0, 50)
    assert not t.terminal and t.steps == 50


def test_space_after_stabilization():
    g = generate("random:15:0.2", 1)
    p = DetProtocol(g)
    t = run(p, g, p.zero_configuration(), SchedulerKind(SYNC), 0, diameter(g) + 2)
    for s in t.configurations[-1]:
        assert len(s) <= g.n
        assert sum(len(x.preds) for x in s) <= g.m


def test_ids_must_be_distinct():
    with pytest.raises(ValueError):
        DetProtocol(generate("path:2"), [1, 1])
