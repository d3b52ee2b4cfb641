"""Guarded-command execution engine.

A step reads the pre-step configuration for every activated process and
writes all new states at once.  Round boundaries follow the asynchronous
round definition: a round ends as soon as every process enabled at its start
has either moved or been seen disabled.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Optional

from umisim.digraph import Digraph
from umisim.umis import check_umis

log = logging.getLogger(__name__)

SYNC = "sync"
DIST = "dist"
LOCAL_CENTRAL = "local-central"


class Protocol:
    """Base class for protocols driven by the runtime.

    Subclasses are bound to a graph; ``preds`` arguments are the states of
    ``graph.preds[i]`` in that order.  Guards and commands never see
    successors.
    """

    name = "protocol"
    anonymous = False
    deterministic = True
    synchronous_only = False

    def __init__(self, graph: Digraph):
        self.graph = graph

    def enabled(self, i, own, preds) -> bool:
        return True

    def execute(self, i, own, preds, rng):
        raise NotImplementedError

    def mis_output(self, i, own, preds) -> bool:
        raise NotImplementedError

    def zero_state(self, i):
        raise NotImplementedError

    def zero_configuration(self) -> tuple:
        return tuple(self.zero_state(i) for i in range(self.graph.n))

    def state_bits(self, state) -> int:
        return 0

    def pred_states(self, config, i) -> tuple:
        return tuple(config[j] for j in self.graph.preds[i])

    def outputs(self, config) -> tuple:
        return tuple(
            self.mis_output(i, config[i], self.pred_states(config, i)) for i in range(self.graph.n)
        )

    # hooks used by the experiment harness
    def observe(self, config):
        """What must stop changing for the run to count as stabilized."""
        return self.outputs(config)

    def legitimate(self, config) -> bool:
        return check_umis(self.graph, self.outputs(config)).valid

    def settled(self, config) -> bool:
        """Ground-truth check that no pending fault can still change the observation."""
        return True


@dataclass(frozen=True)
class SchedulerKind:
    kind: str = SYNC
    fairness_bound: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (SYNC, DIST, LOCAL_CENTRAL):
            raise ValueError(f"unknown scheduler {self.kind!r}")
        if self.fairness_bound is not None and self.fairness_bound < 1:
            raise ValueError("fairness bound must be at least 1")

    @classmethod
    def parse(cls, text: str, fairness_bound=None) -> "SchedulerKind":
        aliases = {"sync": SYNC, "synchronous": SYNC, "dist": DIST, "distributed": DIST,
                   "local-central": LOCAL_CENTRAL, "lc": LOCAL_CENTRAL}
        if text not in aliases:
            raise ValueError(f"unknown scheduler {text!r}")
        return cls(aliases[text], fairness_bound)

    def resolve_bound(self, g: Digraph) -> int:
        # locally central runs may delay a forced process once per neighbor
        bound = self.fairness_bound if self.fairness_bound is not None else g.max_degree() + 1
        if self.kind == LOCAL_CENTRAL and bound < g.max_degree() + 1:
            raise ValueError(
                f"locally central fairness bound {bound} must exceed the maximum degree {g.max_degree()}"
            )
        return bound


class Scheduler:
    """Stateful daemon: picks activation sets and enforces weak fairness with counters."""

    def __init__(self, kind: SchedulerKind, g: Digraph):
        self.kind = kind
        self.graph = g
        self.bound = kind.resolve_bound(g)
        self.waiting = [0] * g.n
        self.nbrs = [g.neighbors(i) for i in range(g.n)]
        self.thresholds = [
            max(0, self.bound - 1 - (len(self.nbrs[i]) if kind.kind == LOCAL_CENTRAL else 0))
            for i in range(g.n)
        ]

    def choose(self, enabled, rng: random.Random) -> frozenset:
        enabled = sorted(enabled)
        if not enabled:
            chosen = frozenset()
        elif self.kind.kind == SYNC:
            chosen = frozenset(enabled)
        else:
            forced = [i for i in enabled if self.waiting[i] >= self.thresholds[i]]
            while True:
                picked = [i for i in enabled if rng.random() < 0.5]
                if picked:
                    break
            if self.kind.kind == DIST:
                chosen = frozenset(picked) | frozenset(forced)
            else:
                chosen = self._thin(forced, picked)
        self._account(enabled, chosen)
        return chosen

    def _thin(self, forced, picked):
        # longest waiters first, so each neighbor can delay a forced process at most once
        order = sorted(forced, key=lambda i: (-self.waiting[i], i))
        order += [i for i in picked if i not in set(forced)]
        chosen = set()
        for i in order:
            if not (self.nbrs[i] & chosen):
                chosen.add(i)
        return frozenset(chosen)

    def _account(self, enabled, chosen):
        enabled = set(enabled)
        for i in range(self.graph.n):
            if i in enabled and i not in chosen:
                self.waiting[i] += 1
            else:
                self.waiting[i] = 0


def enabled_set(p: Protocol, config) -> frozenset:
    return frozenset(
        i for i in range(p.graph.n) if p.enabled(i, config[i], p.pred_states(config, i))
    )


def apply(p: Protocol, config, activated, rng) -> tuple:
    """Run the commands of ``activated`` against the pre-step snapshot ``config``."""
    new = list(config)
    for i in sorted(activated):
        new[i] = p.execute(i, config[i], p.pred_states(config, i), rng)
    return tuple(new)


def step(p: Protocol, g: Digraph, config, scheduler: Scheduler, rng):
    """One computation step.  A terminal configuration comes back unchanged with no activations."""
    enabled = enabled_set(p, config)
    if not enabled:
        return config, frozenset()
    activated = scheduler.choose(enabled, rng)
    return apply(p, config, activated, rng), activated


@dataclass
class Trace:
    seed: object
    configurations: list
    activations: list = field(default_factory=list)
    enabled: list = field(default_factory=list)
    round_ends: list = field(default_factory=list)
    terminal: bool = False

    @property
    def steps(self) -> int:
        return len(self.activations)

    def rounds_completed(self) -> int:
        return len(self.round_ends)

    def round_config(self, r: int) -> int:
        """Configuration index at the end of round ``r`` (round 0 is the initial configuration)."""
        return 0 if r == 0 else self.round_ends[r - 1]

    def round_of(self, index: int) -> int:
        """Number of rounds completed when configuration ``index`` is reached."""
        return sum(1 for b in self.round_ends if b <= index)


class RoundTracker:
    """Incremental round marking, one configuration at a time."""

    def __init__(self, first_enabled):
        self.pending = set(first_enabled)
        self.index = 0
        self.boundaries = []

    def advance(self, activated, enabled_after) -> bool:
        """Feed one step; returns True when it closes a round."""
        self.index += 1
        self.pending -= activated
        self.pending &= enabled_after
        if not self.pending:
            self.boundaries.append(self.index)
            self.pending = set(enabled_after)
            return True
        return False


@dataclass(frozen=True)
class RoundMarks:
    boundaries: tuple
    unterminated: bool


def mark_rounds(t: Trace, g: Digraph, p: Protocol) -> RoundMarks:
    """Recompute round boundaries of ``t`` from scratch.

    ``unterminated`` is set when the trace stops in the middle of a round.
    """
    if not t.configurations:
        raise ValueError("empty trace")
    enabled = [enabled_set(p, c) for c in t.configurations]
    if not enabled[0]:
        return RoundMarks((), False)
    tracker = RoundTracker(enabled[0])
    for k, act in enumerate(t.activations):
        tracker.advance(act, enabled[k + 1])
    last = len(t.configurations) - 1
    unterminated = not tracker.boundaries or tracker.boundaries[-1] != last
    return RoundMarks(tuple(tracker.boundaries), unterminated)


def detect_stable_output(t: Trace, window: int, g: Digraph, p: Protocol, observe=None) -> Optional[int]:
    """Earliest round ``r`` whose observation stays identical through round ``r + window``."""
    if window < 1:
        raise ValueError("window must be at least 1")
    observe = observe or p.observe
    obs = [observe(c) for c in t.configurations]
    ends = [0] + list(t.round_ends)
    for r in range(len(ends) - window):
        lo, hi = ends[r], ends[r + window]
        if all(obs[k] == obs[lo] for k in range(lo, hi + 1)):
            return r
    return None


def settling_round(t: Trace, observe) -> Optional[int]:
    """First round from which ``observe`` never changes again in ``t``."""
    obs = [observe(c) for c in t.configurations]
    last = len(obs) - 1
    k = last
    while k > 0 and obs[k - 1] == obs[last]:
        k -= 1
    ends = [0] + list(t.round_ends)
    for r, b in enumerate(ends):
        if b >= k:
            return r
    return None


def run(
    p: Protocol,
    g: Digraph,
    c0,
    s: SchedulerKind,
    seed,
    max_rounds: int,
    max_steps: Optional[int] = None,
    stop=None,
) -> Trace:
    """Drive ``step`` until ``max_rounds`` rounds complete or the configuration is terminal.

    ``stop(trace)`` is consulted at each round end and may end the run early.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if p.synchronous_only and s.kind != SYNC:
        raise ValueError(f"protocol {p.name!r} requires the synchronous scheduler")
    rng = random.Random(seed)
    scheduler = Scheduler(s, g)
    config = tuple(c0)
    first = enabled_set(p, config)
    trace = Trace(seed, [config], enabled=[first])
    tracker = RoundTracker(first)
    if not first:
        trace.terminal = True
        return trace
    while len(trace.round_ends) < max_rounds:
        if max_steps is not None and trace.steps >= max_steps:
            break
        config, activated = step(p, g, config, scheduler, rng)
        after = enabled_set(p, config)
        trace.configurations.append(config)
        trace.activations.append(activated)
        trace.enabled.append(after)
        if tracker.advance(activated, after):
            trace.round_ends.append(tracker.index)
            if stop is not None and stop(trace):
                break
        if not after:
            trace.terminal = True
            break
    return trace


def export_trace(t: Trace, p: Protocol, fh) -> None:
    """Write one JSON record per configuration: step index, activated set, mis outputs."""
    ends = set(t.round_ends)
    for k, config in enumerate(t.configurations):
        rec = {
            "step": k,
            "activated": sorted(t.activations[k - 1]) if k else [],
            "mis": [int(x) for x in p.outputs(config)],
            "round_end": k in ends,
        }
        fh.write(json.dumps(rec) + "\n")
