"""Deterministic UMIS for networks with unique identifiers.

Every process floods ``(id, predecessor ids, distance)`` records downstream,
rebuilds the topology of its ancestors from them and runs the priority-greedy
selection on that topology.
"""

from __future__ import annotations

from typing import NamedTuple

from umisim.runtime import Protocol
from umisim.umis import TopologyGraph, priority_greedy_umis


class TopoTuple(NamedTuple):
    id: int
    preds: frozenset
    dist: int


EMPTY = frozenset()


def det_update(own_id, own_preds, pred_topologies) -> frozenset:
    """New topology from the self record and the predecessors' records one hop further."""
    merged = {TopoTuple(own_id, frozenset(own_preds), 0)}
    for topo in pred_topologies:
        for t in topo:
            merged.add(TopoTuple(t.id, t.preds, t.dist + 1))

    best = {}
    for t in merged:
        cur = best.get(t.id)
        if cur is None or t.dist < cur.dist:
            best[t.id] = t
        elif t.dist == cur.dist and t.preds != cur.preds and sorted(t.preds) < sorted(cur.preds):
            # same id and distance, conflicting predecessor sets: keep the least one
            best[t.id] = t

    keep = _reaching(best, own_id)
    return frozenset(best[x] for x in keep)


def _reaching(by_id: dict, target) -> set:
    """Ids with a record that reach ``target`` through the record graph."""
    seen = {target}
    stack = [target]
    while stack:
        x = stack.pop()
        rec = by_id.get(x)
        if rec is None:
            continue
        for p in rec.preds:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return {x for x in seen if x in by_id}


def topology_graph(topology) -> TopologyGraph:
    return TopologyGraph.from_records((t.id, t.preds) for t in topology)


def det_mis_output(own_id, topology) -> bool:
    return own_id in priority_greedy_umis(topology_graph(topology))


class DetProtocol(Protocol):
    """Algorithm for identifier-equipped asynchronous networks.

    The state of a process is its topology: a frozenset of :class:`TopoTuple`.
    With ``quiescent=True`` a process is enabled only when its update would
    change its state, which makes the protocol silent.
    """

    name = "det"

    def __init__(self, graph, ids=None, quiescent=False):
        super().__init__(graph)
        self.ids = tuple(range(graph.n)) if ids is None else tuple(ids)
        if len(self.ids) != graph.n or len(set(self.ids)) != graph.n:
            raise ValueError("det needs one distinct identifier per process")
        self.pred_ids = tuple(frozenset(self.ids[j] for j in graph.preds[i]) for i in range(graph.n))
        self.quiescent = quiescent
        self._mis_cache = {}

    def zero_state(self, i):
        return EMPTY

    def _update(self, i, preds):
        return det_update(self.ids[i], self.pred_ids[i], preds)

    def enabled(self, i, own, preds):
        if not self.quiescent:
            return True
        return self._update(i, preds) != own

    def execute(self, i, own, preds, rng):
        return self._update(i, preds)

    def mis_output(self, i, own, preds):
        key = (i, own)
        out = self._mis_cache.get(key)
        if out is None:
            if len(self._mis_cache) > 200_000:
                self._mis_cache.clear()
            out = self._mis_cache[key] = det_mis_output(self.ids[i], own)
        return out

    def live_ids(self, config):
        return list(self.ids)

    def identifiers_in(self, state):
        for t in state:
            yield t.id
            yield from t.preds

    def state_bits(self, state):
        width = max(1, max(self.ids, default=0).bit_length())
        return sum(width * (1 + len(t.preds)) + max(1, t.dist.bit_length()) for t in state)

    def exact_topology(self, i) -> frozenset:
        """The record set a process holds once it knows all of its ancestors."""
        from umisim.digraph import distances_to

        dist = distances_to(self.graph, i)
        return frozenset(
            TopoTuple(self.ids[j], self.pred_ids[j], dist[j])
            for j in range(self.graph.n)
            if dist[j] != float("inf")
        )
