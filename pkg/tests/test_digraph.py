import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umisim.digraph import (
    Digraph,
    GeneratorSpec,
    condense,
    diameter,
    distance,
    distances_from,
    dumps,
    generate,
    is_strongly_connected,
    loads,
    random_digraph,
)
from umisim.impossibility import system_b


@st.composite
def digraphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Digraph(n, edges)


def test_distance_examples():
    assert distance(Digraph(4, [(0, 1)]), 2, 2) == 0
    assert distance(Digraph(2), 0, 1) == math.inf
    assert distance(generate("path:3"), 0, 2) == 2
    assert distance(generate("path:3"), 2, 0) == math.inf


def test_diameter_examples():
    assert diameter(generate("cycle:3")) == 2
    assert diameter(Digraph(1)) == 0
    assert diameter(Digraph(2)) == 0


def test_condense_examples():
    c = condense(generate("cycle:3"))
    assert c.components == (frozenset({0, 1, 2}),)
    assert c.sources == (0,)

    c = condense(generate("path:3"))
    assert sorted(map(sorted, c.components)) == [[0], [1], [2]]
    assert [c.components[k] for k in c.sources] == [frozenset({0})]
    assert {(min(c.components[a]), min(c.components[b])) for a, b in c.dag} == {(0, 1), (1, 2)}

    c = condense(system_b())
    assert sorted(map(sorted, c.components)) == [[0, 1, 2], [3], [4]]
    assert [c.components[k] for k in c.sources] == [frozenset({0, 1, 2})]
    assert c.component(4) == {4}


def test_rejects_bad_graphs():
    with pytest.raises(ValueError):
        Digraph(2, [(0, 0)])
    with pytest.raises(ValueError):
        Digraph(2, [(0, 2)])
    with pytest.raises(ValueError):
        generate("cycle:0")
    with pytest.raises(ValueError):
        random_digraph(3, 1.5, random.Random(0))
    with pytest.raises(ValueError):
        GeneratorSpec.parse("torus:3")


def test_neighbors_are_preds_and_succs():
    g = Digraph(3, [(0, 1), (2, 1)])
    assert g.neighbors(1) == {0, 2}
    assert g.neighbors(0) == {1}
    assert g.max_degree() == 2


def test_generator_examples():
    assert set(generate("cycle:3").edges) == {(0, 1), (1, 2), (2, 0)}
    assert set(generate("path:2").edges) == {(0, 1)}
    for seed in range(20):
        assert len(condense(generate("scc:10:5", seed)).components) == 1


def test_generate_is_pure():
    for spec in ["random:12:0.2", "scc:9:4", "cliques:3,2,4"]:
        assert generate(spec, 7).edges == generate(spec, 7).edges


def test_dag_of_cliques_components():
    g = generate("cliques:3,2,4", 1)
    assert sorted(len(c) for c in condense(g).components) == [2, 3, 4]


def _mutual(g):
    reach = [set(k for k, d in enumerate(distances_from(g, i)) if d != math.inf) for i in range(g.n)]
    return {frozenset(j for j in range(g.n) if j in reach[i] and i in reach[j]) for i in range(g.n)}


@settings(max_examples=300, deadline=None)
@given(digraphs())
def test_condense_matches_mutual_reachability(g):
    c = condense(g)
    assert set(c.components) == _mutual(g)
    # components come out in topological order
    assert all(a < b for a, b in c.dag)
    assert all(i in c.component(i) for i in range(g.n))
    assert c.sources
    for s in c.sources:
        assert not any(b == s for _, b in c.dag)
    assert is_strongly_connected(g) == (len(c.components) == 1)


@settings(max_examples=200, deadline=None)
@given(digraphs())
def test_diameter_is_max_finite_bfs_distance(g):
    finite = [d for i in range(g.n) for d in distances_from(g, i) if d != math.inf]
    assert diameter(g) == max(finite)


def test_exhaustive_condense_n4():
    n = 4
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for mask in range(0, 1 << len(pairs), 7):
        g = Digraph(n, [p for k, p in enumerate(pairs) if mask >> k & 1])
        assert set(condense(g).components) == _mutual(g)


@settings(max_examples=100, deadline=None)
@given(digraphs(max_n=8))
def test_text_round_trip(g):
    text = dumps(g)
    assert text.startswith(f"n {g.n}\n")
    back = loads(text)
    assert back == g
    assert dumps(back) == text


def test_file_generator(tmp_path):
    f = tmp_path / "g.txt"
    g = generate("cliques:2,3", 3)
    f.write_text(dumps(g))
    assert generate(f"file:{f}") == g


def test_fixture_generator():
    assert generate("fixture:system-b") == system_b()
    assert generate("fixture:system-a").n == 3


def test_ancestors():
    g = generate("path:4")
    assert g.ancestors(3) == {0, 1, 2}
    assert g.ancestors(0) == set()
    assert all(len(g.preds[i]) <= 1 for i in range(4))
