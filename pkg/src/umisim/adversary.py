"""Arbitrary initial configurations: zeroed, randomly corrupted, or all sharing one identifier.

Fake identifiers are identifiers present in some record that match no live
process.  For the prefix protocol "match" means prefix-related; elsewhere it
means equal.  Injected fakes match no live identifier under the protocol's
own reading and are pairwise prefix-unrelated, so the count reported at
construction equals the one :func:`count_fake_identifiers` finds by scanning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from umisim.protocols.det import DetProtocol, TopoTuple
from umisim.protocols.local_umis import (
    CompositeProtocol,
    CompositeState,
    LocalUmisProtocol,
    LocalUmisState,
    UmisRecord,
)
from umisim.protocols.naming import NameRecord, NamingProtocol, NamingState
from umisim.protocols.prefix import PrefixProtocol, PrefixState, Record, prefix_related

ZEROED = "zero"
CORRUPT = "corrupt"
SAME_ID = "same-id"


@dataclass(frozen=True)
class AdversarySpec:
    """How to build the initial configuration.

    ``same-id`` gives every process one shared identifier; it may also inject
    up to ``fake_budget`` fakes into processes picked with ``corruption_probability``.
    """

    mode: str = ZEROED
    fake_budget: int = 0
    corruption_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (ZEROED, CORRUPT, SAME_ID):
            raise ValueError(f"unknown adversary mode {self.mode!r}")
        if self.fake_budget < 0:
            raise ValueError("fake budget must be non-negative")
        if not 0.0 <= self.corruption_probability <= 1.0:
            raise ValueError("corruption probability outside [0, 1]")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "AdversarySpec":
        """``zero``, ``corrupt:<budget>:<prob>`` or ``same-id[:<budget>:<prob>]``."""
        parts = text.split(":")
        mode = parts[0]
        try:
            if mode == ZEROED and len(parts) == 1:
                return cls(ZEROED, seed=seed)
            if mode == CORRUPT and len(parts) == 3:
                return cls(CORRUPT, int(parts[1]), float(parts[2]), seed)
            if mode == SAME_ID and len(parts) in (1, 3):
                if len(parts) == 1:
                    return cls(SAME_ID, seed=seed)
                return cls(SAME_ID, int(parts[1]), float(parts[2]), seed)
        except ValueError as exc:
            raise ValueError(f"bad adversary spec {text!r}: {exc}") from None
        raise ValueError(f"bad adversary spec {text!r}")

    def with_seed(self, seed) -> "AdversarySpec":
        return AdversarySpec(self.mode, self.fake_budget, self.corruption_probability, seed)


def random_bits(rng, lo, hi) -> str:
    return "".join(rng.choice("01") for _ in range(rng.randint(lo, hi)))


def fresh_bit_ids(rng, live, count, related=prefix_related) -> list:
    """``count`` bit strings not ``related`` to ``live`` nor to each other."""
    live = set(live)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 10_000:
            raise RuntimeError("could not find unrelated fake identifiers")
        x = random_bits(rng, 3, 10)
        if any(related(x, y) for y in live) or any(prefix_related(x, y) for y in out):
            continue
        out.append(x)
    return out


def _subset(rng, pool, max_size=None):
    pool = list(pool)
    k = rng.randint(0, len(pool) if max_size is None else min(max_size, len(pool)))
    return frozenset(rng.sample(pool, k))


def _chosen(rng, n, prob):
    return [rng.random() < prob for _ in range(n)]


def initial_configuration(p, g, spec: AdversarySpec):
    """Build an initial configuration for ``p`` on ``g``; returns ``(config, fake_count)``."""
    rng = random.Random(spec.seed)
    if spec.mode == SAME_ID and not p.anonymous:
        raise ValueError(f"same-id does not apply to {p.name!r}: its identifiers are constants")
    if spec.mode == ZEROED:
        return p.zero_configuration(), 0
    builder = _BUILDERS.get(type(p))
    if builder is None:
        raise ValueError(f"no adversary for protocol {p.name!r}")
    config, fakes = builder(p, g, spec, rng)
    return tuple(config), len(fakes)


def _det(p: DetProtocol, g, spec, rng):
    n = g.n
    live = set(p.ids)
    top = max(live) + 1
    pool = list(range(top, top + spec.fake_budget))
    used = set()
    config = []
    for i, hit in enumerate(_chosen(rng, n, spec.corruption_probability)):
        if not hit:
            config.append(p.zero_state(i))
            continue
        records = set()
        everyone = sorted(live) + pool
        for _ in range(rng.randint(0, n)):
            records.add(TopoTuple(rng.choice(sorted(live)), _subset(rng, everyone, 4), rng.randint(0, 2 * n)))
        if pool:
            for f in rng.sample(pool, rng.randint(1, len(pool))):
                records.add(TopoTuple(f, _subset(rng, everyone, 4), rng.randint(0, 2 * n)))
        for r in records:
            used.update(x for x in (r.id, *r.preds) if x not in live)
        config.append(frozenset(records))
    return config, used


def _prefix(p: PrefixProtocol, g, spec, rng):
    n = g.n
    if spec.mode == SAME_ID:
        common = random_bits(rng, 2, 2)
        ids = [common] * n
    else:
        ids = [random_bits(rng, 4, 6) for _ in range(n)]
    pool = fresh_bit_ids(rng, ids, spec.fake_budget)
    everyone = sorted(set(ids)) + pool
    used = set()
    config = []
    for i, hit in enumerate(_chosen(rng, n, spec.corruption_probability)):
        preds = frozenset(ids[j] for j in g.preds[i])
        if not hit:
            config.append(PrefixState(ids[i], preds, frozenset()))
            continue
        records = {Record(rng.choice(ids), _subset(rng, everyone, 4)) for _ in range(rng.randint(0, n))}
        if pool:
            records.update(Record(f, _subset(rng, everyone, 4)) for f in rng.sample(pool, rng.randint(1, len(pool))))
        for r in records:
            used.update(x for x in (r.id, *r.preds) if x in pool)
        config.append(PrefixState(ids[i], _subset(rng, everyone, 3), frozenset(records)))
    return config, used


def _naming_records(rng, n, k, ids, pool, used, hit):
    if not hit:
        return frozenset()
    recs = {NameRecord(rng.choice(ids), rng.randint(1, k), rng.randint(0, 2 * n)) for _ in range(rng.randint(0, n))}
    if pool:
        picked = rng.sample(pool, rng.randint(1, len(pool)))
        recs.update(NameRecord(f, rng.randint(1, k), rng.randint(0, 2 * n)) for f in picked)
        used.update(picked)
    return frozenset(recs)


def _exact(a, b):
    return a == b


def _naming_ids(g, spec, rng):
    if spec.mode == SAME_ID:
        return [random_bits(rng, 2, 2)] * g.n
    return [random_bits(rng, 0, 3) for _ in range(g.n)]


def _naming(p: NamingProtocol, g, spec, rng):
    n = g.n
    ids = _naming_ids(g, spec, rng)
    pool = fresh_bit_ids(rng, ids, spec.fake_budget, _exact)
    used = set()
    config = []
    for i, hit in enumerate(_chosen(rng, n, spec.corruption_probability)):
        recs = _naming_records(rng, n, p.k, ids, pool, used, hit)
        config.append(NamingState(ids[i], rng.randint(1, p.k), rng.randint(0, n), recs))
    return config, used


def _umis_records(rng, n, ids, pool, used, hit):
    if not hit:
        return LocalUmisState()
    everyone = sorted(set(ids)) + pool
    recs = {
        UmisRecord(rng.choice(ids), _subset(rng, everyone, 4), rng.random() < 0.5, rng.randint(0, 2 * n))
        for _ in range(rng.randint(0, n))
    }
    if pool:
        for f in rng.sample(pool, rng.randint(1, len(pool))):
            recs.add(UmisRecord(f, _subset(rng, everyone, 4), rng.random() < 0.5, rng.randint(0, 2 * n)))
    for r in recs:
        used.update(x for x in (r.id, *r.preds) if x in pool)
    comp = _subset(rng, {r.id for r in recs})
    return LocalUmisState(rng.random() < 0.5, frozenset(recs), comp)


def _local_umis(p: LocalUmisProtocol, g, spec, rng):
    ids = list(p.ids)
    pool = fresh_bit_ids(rng, ids, spec.fake_budget, _exact)
    used = set()
    config = [
        _umis_records(rng, g.n, ids, pool, used, hit)
        for hit in _chosen(rng, g.n, spec.corruption_probability)
    ]
    return config, used


def _composite(p: CompositeProtocol, g, spec, rng):
    n = g.n
    ids = _naming_ids(g, spec, rng)
    pool = fresh_bit_ids(rng, ids, spec.fake_budget, _exact)
    used = set()
    config = []
    for i, hit in enumerate(_chosen(rng, n, spec.corruption_probability)):
        naming = NamingState(ids[i], rng.randint(1, p.k), rng.randint(0, n),
                             _naming_records(rng, n, p.k, ids, pool, used, hit))
        config.append(CompositeState(naming, _umis_records(rng, n, ids, pool, used, hit)))
    return config, used


_BUILDERS = {
    DetProtocol: _det,
    PrefixProtocol: _prefix,
    NamingProtocol: _naming,
    LocalUmisProtocol: _local_umis,
    CompositeProtocol: _composite,
}


def count_fake_identifiers(p, config) -> int:
    """Scan ``config`` for identifiers matching no live process."""
    live = p.live_ids(config)
    same = getattr(p, "same_identifier", None) or (lambda a, b: a == b)
    seen = set()
    for s in config:
        seen.update(p.identifiers_in(s))
    return sum(1 for x in seen if not any(same(x, y) for y in live))
