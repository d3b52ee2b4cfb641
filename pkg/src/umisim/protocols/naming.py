"""Probabilistic local naming for synchronous anonymous networks.

A process keeps ``(id, nonce, hops)`` records of the identifiers it hears
about.  When its timer outgrows the number of distinct identifiers it knows,
it checks whether its own identifier arrived with a foreign nonce; if so some
ancestor shares the name and the process appends a random bit.  Either way it
redraws its nonce and restarts the timer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from umisim.runtime import Protocol


class NameRecord(NamedTuple):
    id: str
    rnd: int
    dist: int


@dataclass(frozen=True)
class NamingState:
    id: str = ""
    rnd: int = 1
    timer: int = 0
    ids: frozenset = frozenset()


def distinct_ids(records) -> int:
    return len({r.id for r in records})


def prune_by_distance(records) -> frozenset:
    """Repeatedly drop records that travelled farther than the number of distinct ids."""
    records = set(records)
    while True:
        bound = distinct_ids(records)
        far = {r for r in records if r.dist > bound}
        if not far:
            return frozenset(records)
        records -= far


def nearest(records) -> set:
    """One record per ``(id, rnd)``, the one with the smallest hop count.

    Without this an identifier inside a cycle arrives once per walk length
    and the set grows quadratically in the number of processes.
    """
    best = {}
    for r in records:
        cur = best.get((r.id, r.rnd))
        if cur is None or r.dist < cur.dist:
            best[(r.id, r.rnd)] = r
    return set(best.values())


def collect(own_id, own_rnd, pred_states) -> frozenset:
    records = [NameRecord(own_id, own_rnd, 0)]
    for s in pred_states:
        records.extend(NameRecord(r.id, r.rnd, r.dist + 1) for r in s.ids)
    return prune_by_distance(nearest(records))


def homonym_detected(state: NamingState) -> bool:
    return any(r.id == state.id and r.rnd != state.rnd for r in state.ids)


def naming(state: NamingState, pred_states, rng, k: int) -> NamingState:
    new_id = state.id
    if homonym_detected(state):
        new_id += "1" if rng.random() < 0.5 else "0"
    rnd = rng.randint(1, k)
    # one recomputation; the fresh timer cannot trigger another naming
    return NamingState(new_id, rnd, 0, collect(new_id, rnd, pred_states))


def naming_update(state: NamingState, pred_states, rng, k: int) -> NamingState:
    records = collect(state.id, state.rnd, pred_states)
    state = NamingState(state.id, state.rnd, state.timer + 1, records)
    if state.timer > distinct_ids(records):
        state = naming(state, pred_states, rng, k)
    return state


def local_naming_holds(g, ids) -> bool:
    """Every process carries an identifier different from all of its ancestors."""
    return not local_naming_violations(g, ids)


def local_naming_violations(g, ids) -> list:
    return [i for i in range(g.n) if any(ids[a] == ids[i] for a in g.ancestors(i))]


class NamingProtocol(Protocol):
    """Local naming layer.  Only meaningful under the synchronous scheduler."""

    name = "naming"
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
        return NamingState()

    def execute(self, i, own, preds, rng):
        return naming_update(own, preds, rng, self.k)

    def mis_output(self, i, own, preds):
        # naming alone selects nothing
        return False

    def ids(self, config) -> tuple:
        return tuple(s.id for s in config)

    def observe(self, config):
        return self.ids(config)

    def legitimate(self, config):
        ids = self.ids(config)
        return all(ids[a] != ids[i] for i in range(self.graph.n) for a in self._ancestors[i])

    def settled(self, config):
        live = set(self.ids(config))
        return all(r.id in live for s in config for r in s.ids)

    def live_ids(self, config):
        return list(self.ids(config))

    def identifiers_in(self, state):
        return (r.id for r in state.ids)

    def state_bits(self, state):
        rnd_bits = max(1, (self.k - 1).bit_length())
        bits = len(state.id) + rnd_bits + max(1, state.timer.bit_length())
        for r in state.ids:
            bits += len(r.id) + rnd_bits + max(1, r.dist.bit_length())
        return bits
