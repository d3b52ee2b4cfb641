import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from umisim.digraph import Digraph, generate
from umisim.umis import (
    TopologyGraph,
    check_umis,
    greedy_mis_vector,
    is_maximal_independent,
    priority_greedy_umis,
    process_greedy_mis_vector,
    random_source_order,
)
from tests.test_digraph import digraphs


def test_check_umis_examples():
    p3 = generate("path:3")
    assert check_umis(p3, (True, False, True)).valid
    assert check_umis(p3, (False, False, True)).violations == (0,)
    assert check_umis(generate("cycle:3"), (True, False, False))
    assert not check_umis(generate("cycle:3"), (True, True, False))


def test_check_umis_sees_successors():
    # 1 only has a successor in the set: still covered
    g = Digraph(2, [(1, 0)])
    assert check_umis(g, (True, False)).valid


def test_greedy_examples():
    cycle = TopologyGraph.from_records([(1, {3}), (2, {1}), (3, {2})])
    assert priority_greedy_umis(cycle) == {3}
    path = TopologyGraph.from_records([(1, set()), (2, {1}), (3, {2})])
    assert priority_greedy_umis(path) == {1, 3}
    assert priority_greedy_umis(TopologyGraph({7})) == {7}


def test_pred_only_nodes_are_present():
    t = TopologyGraph.from_records([(2, {5})])
    assert t.nodes == {2, 5}
    assert t.preds[5] == set()
    assert priority_greedy_umis(t) == {5}


def test_maximal_independent_examples():
    path = TopologyGraph.from_records([(1, set()), (2, {1}), (3, {2})])
    assert is_maximal_independent(path, {1, 3})
    assert not is_maximal_independent(path, {1})
    cycle = TopologyGraph.from_records([(1, {3}), (2, {1}), (3, {2})])
    assert not is_maximal_independent(cycle, set())


def _all_digraphs(n):
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for mask in range(1 << len(pairs)):
        yield Digraph(n, [p for k, p in enumerate(pairs) if mask >> k & 1])


def test_greedy_is_maximal_exhaustive_small():
    rng = random.Random(5)
    for n in range(1, 5):
        for g in _all_digraphs(n):
            ids = rng.sample(range(100), n)
            t = TopologyGraph.from_digraph(g, ids)
            s = priority_greedy_umis(t)
            assert is_maximal_independent(t, s)
            assert check_umis(g, [ids[i] in s for i in range(n)])


def test_greedy_is_maximal_n5_sampled():
    rng = random.Random(11)
    pairs = [(i, j) for i in range(5) for j in range(5) if i != j]
    for _ in range(3000):
        g = Digraph(5, [p for p in pairs if rng.random() < 0.3])
        ids = rng.sample(range(50), 5)
        t = TopologyGraph.from_digraph(g, ids)
        assert is_maximal_independent(t, priority_greedy_umis(t))


@settings(max_examples=200, deadline=None)
@given(digraphs(max_n=8), st.integers(0, 10**6))
def test_source_order_does_not_matter(g, seed):
    ids = random.Random(seed).sample(range(1000), g.n)
    t = TopologyGraph.from_digraph(g, ids)
    a = priority_greedy_umis(t, choose=random_source_order(random.Random(seed)))
    b = priority_greedy_umis(t, choose=random_source_order(random.Random(seed + 1)))
    assert a == b == priority_greedy_umis(t)


def test_process_vector_agrees_with_identifier_vector():
    rng = random.Random(3)
    for _ in range(200):
        g = generate(f"random:{rng.randint(1, 9)}:0.3", rng.randint(0, 10**6))
        ids = rng.sample(range(100), g.n)
        assert process_greedy_mis_vector(g, ids) == greedy_mis_vector(g, ids)


def test_process_vector_tolerates_repeats_across_components():
    g = generate("path:3")
    assert process_greedy_mis_vector(g, ["0", "0", "0"]) == [True, False, True]


def test_distinct_ids_required():
    try:
        greedy_mis_vector(generate("path:2"), [1, 1])
    except ValueError:
        return
    raise AssertionError("expected ValueError")


def test_every_permutation_gives_valid_umis_on_cycle4():
    g = generate("cycle:4")
    for ids in itertools.permutations(range(4)):
        assert check_umis(g, greedy_mis_vector(g, ids))
