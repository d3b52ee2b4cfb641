"""The UMIS predicate and the priority-greedy maximal independent set.

``priority_greedy_umis`` is the selection rule shared by the identifier-based
protocols: repeatedly take a source strongly connected component of what is
left, scan it in descending identifier order and keep every identifier that
does not touch an already chosen one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable

from umisim.digraph import Digraph


@dataclass(frozen=True)
class UmisVerdict:
    violations: tuple

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def check_umis(g: Digraph, mis) -> UmisVerdict:
    """Every process is either in the set with no neighbor in it, or out with some neighbor in it."""
    if len(mis) != g.n:
        raise ValueError("mis vector length does not match the graph")
    bad = []
    for i in range(g.n):
        hit = any(mis[j] for j in g.neighbors(i))
        if bool(mis[i]) == hit:
            bad.append(i)
    return UmisVerdict(tuple(bad))


class TopologyGraph:
    """Graph over identifiers rebuilt from ``(id, predecessor ids)`` records.

    Identifiers that only occur inside a predecessor set are nodes too, with no
    known predecessors.
    """

    def __init__(self, nodes: Iterable = (), edges: Iterable = ()):
        self.nodes = set(nodes)
        self.edges = set(edges)
        for u, v in self.edges:
            self.nodes.add(u)
            self.nodes.add(v)
        self.preds = {x: set() for x in self.nodes}
        self.succs = {x: set() for x in self.nodes}
        for u, v in self.edges:
            if u != v:
                self.preds[v].add(u)
                self.succs[u].add(v)

    @classmethod
    def from_records(cls, records: Iterable) -> "TopologyGraph":
        nodes = set()
        edges = set()
        for ident, pred_ids in records:
            nodes.add(ident)
            for p in pred_ids:
                edges.add((p, ident))
        return cls(nodes, edges)

    @classmethod
    def from_digraph(cls, g: Digraph, ids=None) -> "TopologyGraph":
        ids = list(range(g.n)) if ids is None else list(ids)
        return cls(ids, ((ids[u], ids[v]) for u, v in g.edges))

    def neighbors(self, x) -> set:
        return self.preds[x] | self.succs[x]

    def reachable_to(self, target) -> set:
        """Nodes with a directed path to ``target`` (including ``target``)."""
        return _search(self.preds, target)

    def reachable_from(self, source) -> set:
        return _search(self.succs, source)

    def __repr__(self):
        return f"TopologyGraph(nodes={sorted(map(str, self.nodes))}, m={len(self.edges)})"


def _search(adj, start):
    if start not in adj:
        return set()
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _sccs(nodes, succs):
    """Tarjan restricted to ``nodes``; recursion-free.  Component order is unspecified."""
    index, low, on_stack, stack, comps = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter([w for w in succs[root] if w in nodes]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter([x for x in succs[w] if x in nodes])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
    return comps


def source_components(t: TopologyGraph, nodes) -> list:
    """Strongly connected components of the subgraph on ``nodes`` with no incoming edge from outside."""
    out = []
    for comp in _sccs(nodes, t.succs):
        if not any(p in nodes and p not in comp for v in comp for p in t.preds[v]):
            out.append(comp)
    return out


def largest_identifier_first(sources, key):
    return max(sources, key=lambda c: max(key(x) for x in c))


def priority_greedy_umis(
    t: TopologyGraph,
    key: Callable = None,
    choose: Callable = None,
) -> set:
    """Priority-greedy maximal independent set of ``t``.

    ``key`` orders identifiers (natural order by default).  ``choose`` picks
    one component among the available sources; by default the one holding the
    largest identifier.  The result does not depend on ``choose``.
    """
    key = key or (lambda x: x)
    choose = choose or (lambda sources: largest_identifier_first(sources, key))
    # removing whole components keeps the remaining components strongly connected
    comps = _sccs(t.nodes, t.succs)
    comp_of = {x: c for c in comps for x in c}
    upstream = {c: {comp_of[p] for x in c for p in t.preds[x]} - {c} for c in comps}
    waiting = {c: len(up) for c, up in upstream.items()}
    downstream = {c: set() for c in comps}
    for c, up in upstream.items():
        for u in up:
            downstream[u].add(c)
    sources = [c for c in comps if waiting[c] == 0]
    chosen = set()
    while sources:
        w = choose(sources)
        sources.remove(w)
        for x in sorted(w, key=key, reverse=True):
            if not (t.neighbors(x) & chosen):
                chosen.add(x)
        for d in downstream[w]:
            waiting[d] -= 1
            if waiting[d] == 0:
                sources.append(d)
    return chosen


def random_source_order(rng: random.Random) -> Callable:
    return lambda sources: rng.choice(sorted(sources, key=lambda c: sorted(map(repr, c))))


def is_maximal_independent(t: TopologyGraph, s) -> bool:
    s = set(s)
    for x in t.nodes:
        touching = t.neighbors(x) & s
        if x in s and touching:
            return False
        if x not in s and not touching:
            return False
    return True


def greedy_mis_vector(g: Digraph, ids=None, key=None) -> list:
    """Per-process membership in the priority-greedy set over the whole graph.

    Identifiers must be distinct; use :func:`process_greedy_mis_vector` when
    they only differ locally.
    """
    ids = list(range(g.n)) if ids is None else list(ids)
    if len(set(ids)) != len(ids):
        raise ValueError("identifiers must be distinct")
    chosen = priority_greedy_umis(TopologyGraph.from_digraph(g, ids), key=key)
    return [ids[i] in chosen for i in range(g.n)]


def process_greedy_mis_vector(g: Digraph, ids, key=None) -> list:
    """Priority-greedy set computed over processes, ordering each component by ``key(ids[i])``.

    Works with repeated identifiers as long as members of one strongly
    connected component carry distinct ones.
    """
    key = key or (lambda x: x)
    t = TopologyGraph.from_digraph(g)
    chosen = priority_greedy_umis(t, key=lambda i: (key(ids[i]), -i))
    return [i in chosen for i in range(g.n)]
