"""UMIS over locally named networks, and its composition with local naming.

Identifiers only have to differ from those of ancestors, which is enough for a
process to recognise its own strongly connected component: the identifiers
reachable from it in the record graph built from its ancestors.  Inside the
component the larger identifier wins; predecessors outside it that are in the
set block the process.

Each record carries its originator's latest ``umis`` flag and a hop count, so
component members that are not predecessors are still visible and stale or
fake records age out as in the naming layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from umisim.protocols.naming import NamingState, local_naming_holds, naming_update, prune_by_distance
from umisim.runtime import Protocol


class UmisRecord(NamedTuple):
    id: str
    preds: frozenset
    flag: bool
    dist: int


@dataclass(frozen=True)
class LocalUmisState:
    umis: bool = False
    topology: frozenset = frozenset()
    comp: frozenset = frozenset()


def merge_records(records) -> set:
    """One record per ``(id, preds)``: the nearest, preferring a set flag on ties."""
    best = {}
    for r in records:
        key = (r.id, r.preds)
        cur = best.get(key)
        if cur is None or (r.dist, not r.flag) < (cur.dist, not cur.flag):
            best[key] = r
    return set(best.values())


def component_ids(own_id, topology) -> frozenset:
    """Identifiers reachable from ``own_id`` in the record graph."""
    succs = {}
    for r in topology:
        for p in r.preds:
            succs.setdefault(p, set()).add(r.id)
    seen = {own_id}
    stack = [own_id]
    while stack:
        x = stack.pop()
        for y in succs.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def local_update(own_id, own_pred_ids, preds) -> LocalUmisState:
    """One activation of the UMIS layer.

    ``preds`` pairs each predecessor's identifier with its layer state.
    """
    own_pred_ids = frozenset(own_pred_ids)
    records = [UmisRecord(own_id, own_pred_ids, False, 0)]
    for _, s in preds:
        records.extend(UmisRecord(r.id, r.preds, r.flag, r.dist + 1) for r in s.topology)
    topology = set(prune_by_distance(merge_records(records)))
    comp = component_ids(own_id, topology)

    umis = not blocked(own_id, own_pred_ids, preds, topology, comp)

    topology.discard(UmisRecord(own_id, own_pred_ids, False, 0))
    topology.add(UmisRecord(own_id, own_pred_ids, umis, 0))
    topology = merge_records(topology)
    return LocalUmisState(umis, frozenset(topology), comp)


def blocked(own_id, own_pred_ids, preds, topology, comp) -> bool:
    # a predecessor outside the component already in the set
    for pid, s in preds:
        if pid not in comp and s.umis:
            return True
    # a larger component neighbour in the set; predecessors are read directly
    direct = {pid: s.umis for pid, s in preds}
    flags = {}
    for r in topology:
        if r.id == own_id or r.id not in comp:
            continue
        cur = flags.get(r.id)
        if cur is None or (r.dist, not r.flag) < (cur.dist, not cur.flag):
            flags[r.id] = r
    succ_ids = {r.id for r in topology if own_id in r.preds}
    for j in comp:
        if j == own_id or not j > own_id:
            continue
        if j in direct:
            if direct[j]:
                return True
        elif j in succ_ids and j in flags and flags[j].flag:
            return True
    return False


def local_umis_decide(own_id, own_pred_ids, preds, state: LocalUmisState) -> bool:
    """The output a process with layer state ``state`` would produce now."""
    return not blocked(own_id, frozenset(own_pred_ids), preds, state.topology, state.comp)


def _record_bits(r):
    return len(r.id) + sum(map(len, r.preds)) + 1 + max(1, r.dist.bit_length())


def umis_layer_bits(state: LocalUmisState) -> int:
    return 1 + sum(_record_bits(r) for r in state.topology) + sum(map(len, state.comp))


class LocalUmisProtocol(Protocol):
    """The UMIS layer with fixed identifiers that already form a local naming."""

    name = "local-umis"

    def __init__(self, graph, ids):
        super().__init__(graph)
        self.ids = tuple(ids)
        if len(self.ids) != graph.n:
            raise ValueError("one identifier per process")
        if not local_naming_holds(graph, self.ids):
            raise ValueError("identifiers do not form a local naming")
        self.pred_ids = tuple(frozenset(self.ids[j] for j in graph.preds[i]) for i in range(graph.n))

    def zero_state(self, i):
        return LocalUmisState()

    def execute(self, i, own, preds, rng):
        pairs = [(self.ids[j], s) for j, s in zip(self.graph.preds[i], preds)]
        return local_update(self.ids[i], self.pred_ids[i], pairs)

    def mis_output(self, i, own, preds):
        return own.umis

    def live_ids(self, config):
        return list(self.ids)

    def identifiers_in(self, state):
        for r in state.topology:
            yield r.id
            yield from r.preds

    def settled(self, config):
        live = set(self.ids)
        return all(x in live for s in config for x in self.identifiers_in(s))

    def state_bits(self, state):
        return umis_layer_bits(state)


@dataclass(frozen=True)
class CompositeState:
    naming: NamingState = NamingState()
    umis: LocalUmisState = LocalUmisState()


class CompositeProtocol(Protocol):
    """Local naming and the UMIS layer run in one activation, naming first.

    The UMIS layer takes the naming layer's current identifiers as its
    constants; until naming settles it computes on whatever names exist.
    """

    name = "composite"
    anonymous = True
    deterministic = False
    synchronous_only = True

    def __init__(self, graph, k=2):
        super().__init__(graph)
        if k < 2:
            raise ValueError("nonce range k must be at least 2")
        self.k = k
        self._ancestors = [graph.ancestors(i) for i in range(graph.n)]

    def zero_state(self, i):
        return CompositeState()

    def execute(self, i, own, preds, rng):
        named = naming_update(own.naming, [s.naming for s in preds], rng, self.k)
        pairs = [(s.naming.id, s.umis) for s in preds]
        layer = local_update(named.id, frozenset(pid for pid, _ in pairs), pairs)
        return CompositeState(named, layer)

    def mis_output(self, i, own, preds):
        return own.umis.umis

    def ids(self, config):
        return tuple(s.naming.id for s in config)

    def live_ids(self, config):
        return list(self.ids(config))

    def identifiers_in(self, state):
        for r in state.naming.ids:
            yield r.id
        for r in state.umis.topology:
            yield r.id
            yield from r.preds

    def settled(self, config):
        ids = self.ids(config)
        if any(ids[a] == ids[i] for i in range(self.graph.n) for a in self._ancestors[i]):
            return False
        live = set(ids)
        return all(x in live for s in config for x in self.identifiers_in(s))

    def state_bits(self, state):
        nm = state.naming
        rnd_bits = max(1, (self.k - 1).bit_length())
        bits = len(nm.id) + rnd_bits + max(1, nm.timer.bit_length())
        bits += sum(len(r.id) + rnd_bits + max(1, r.dist.bit_length()) for r in nm.ids)
        return bits + umis_layer_bits(state.umis)
