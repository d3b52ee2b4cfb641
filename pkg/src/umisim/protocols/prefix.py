"""Probabilistic UMIS for asynchronous anonymous networks.

Each activation appends a random bit to the process identifier.  Two bit
strings name the same process when one is a prefix of the other, and only
the longest one is kept.  Selection is the same priority greedy as the
identifier-based protocol, ordering bit strings lexicographically.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import NamedTuple

from umisim.runtime import Protocol
from umisim.umis import TopologyGraph, priority_greedy_umis


class IdentifierOverflow(RuntimeError):
    """An identifier outgrew the per-trial cap."""


def is_prefix(a: str, b: str) -> bool:
    return b.startswith(a)


def prefix_related(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


class Record(NamedTuple):
    id: str
    preds: frozenset


@dataclass(frozen=True)
class PrefixState:
    id: str = ""
    preds: frozenset = frozenset()
    topology: frozenset = frozenset()


def drop_prefixes(records) -> dict:
    """Keep one record per id, dropping every id that is a proper prefix of another."""
    by_id = {}
    for r in records:
        cur = by_id.get(r.id)
        if cur is None or (r.preds != cur.preds and sorted(r.preds) < sorted(cur.preds)):
            by_id[r.id] = r
    ids = sorted(by_id)
    # in sorted order an id with a proper extension is followed by one
    for a, b in zip(ids, ids[1:]):
        if b.startswith(a):
            del by_id[a]
    return by_id


class MergedTopology:
    """Record graph with identifiers merged up to prefix equivalence.

    Record ids must be pairwise unrelated (see :func:`drop_prefixes`).  A
    predecessor identifier maps to every record id extending it, or else to
    the record id it extends; unmatched ones become nodes of their own, merged
    into their longest unmatched extension.
    """

    def __init__(self, by_id: dict):
        self.by_id = by_id
        self.ids = sorted(by_id)
        dangling = set()
        for r in by_id.values():
            for x in r.preds:
                if not self._matches(x):
                    dangling.add(x)
        dang = sorted(dangling)
        self.dangling = {}
        for k, x in enumerate(dang):
            # extensions of x sit right after it in sorted order
            j = k
            while j + 1 < len(dang) and dang[j + 1].startswith(x):
                j += 1
            self.dangling[x] = dang[j] if j > k else x
        edges = set()
        for r in by_id.values():
            for x in r.preds:
                for c in self.canon(x):
                    if c != r.id:
                        edges.add((c, r.id))
        self.graph = TopologyGraph(set(by_id) | set(self.dangling.values()), edges)

    def _matches(self, x):
        lo = bisect.bisect_left(self.ids, x)
        if lo < len(self.ids) and self.ids[lo].startswith(x):
            return [self.ids[lo]] + self._extensions_after(x, lo + 1)
        if lo > 0 and x.startswith(self.ids[lo - 1]):
            return [self.ids[lo - 1]]
        return []

    def _extensions_after(self, x, k):
        out = []
        while k < len(self.ids) and self.ids[k].startswith(x):
            out.append(self.ids[k])
            k += 1
        return out

    def canon(self, x):
        found = self._matches(x)
        if found:
            return found
        return [self.dangling.get(x, x)]

    def self_node(self, own_id):
        found = self._matches(own_id)
        return max(found) if found else None

    def self_class(self, own_id):
        return self._matches(own_id)


def prefix_update(new_id: str, pred_ids, pred_topologies) -> frozenset:
    """Topology after an activation whose freshly extended identifier is ``new_id``."""
    records = {Record(new_id, frozenset(pred_ids))}
    for topo in pred_topologies:
        records.update(topo)
    by_id = drop_prefixes(records)
    merged = MergedTopology(by_id)
    targets = merged.self_class(new_id)
    reach = set()
    for t in targets:
        reach |= merged.graph.reachable_to(t)
    return frozenset(by_id[x] for x in reach if x in by_id)


def prefix_mis_output(own_id: str, topology) -> bool:
    merged = MergedTopology(drop_prefixes(topology))
    me = merged.self_node(own_id)
    if me is None:
        return True
    return me in priority_greedy_umis(merged.graph)


class PrefixProtocol(Protocol):
    """Globally unique naming by prefix growth, running the greedy selection on top."""

    name = "prefix"
    anonymous = True
    deterministic = False

    def __init__(self, graph, max_id_bits=512):
        super().__init__(graph)
        self.max_id_bits = max_id_bits

    def zero_state(self, i):
        return PrefixState()

    def execute(self, i, own, preds, rng):
        new_id = own.id + ("1" if rng.random() < 0.5 else "0")
        if self.max_id_bits is not None and len(new_id) > self.max_id_bits:
            raise IdentifierOverflow(f"process {i} identifier exceeded {self.max_id_bits} bits")
        pred_ids = frozenset(s.id for s in preds)
        topo = prefix_update(new_id, pred_ids, (s.topology for s in preds))
        return PrefixState(new_id, pred_ids, topo)

    def mis_output(self, i, own, preds):
        return prefix_mis_output(own.id, own.topology)

    def live_ids(self, config):
        return [s.id for s in config]

    @staticmethod
    def same_identifier(a, b):
        return prefix_related(a, b)

    def identifiers_in(self, state):
        for r in state.topology:
            yield r.id
            yield from r.preds

    def state_bits(self, state):
        bits = len(state.id) + sum(map(len, state.preds))
        for r in state.topology:
            bits += len(r.id) + sum(map(len, r.preds))
        return bits

    def ids_unique(self, config) -> bool:
        ids = sorted(s.id for s in config)
        return all(not b.startswith(a) for a, b in zip(ids, ids[1:]))

    def settled(self, config):
        if not self.ids_unique(config):
            return False
        live = sorted(s.id for s in config)
        for s in config:
            for x in self.identifiers_in(s):
                if not any(prefix_related(x, y) for y in live):
                    return False
        return True
