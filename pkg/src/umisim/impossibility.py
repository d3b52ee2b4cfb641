"""The two small systems behind the impossibility results, and the executions that break them.

System A is the directed 3-cycle a -> b -> c -> a.  System B adds a tail
a -> b' -> c' whose processes look exactly like b and c to any uniform
protocol: same in-degree, and predecessors in the same states.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from umisim.digraph import Digraph
from umisim.runtime import SYNC, Scheduler, SchedulerKind, Trace, apply, enabled_set, step
from umisim.umis import check_umis

A, B, C, B2, C2 = 0, 1, 2, 3, 4
NAMES = {A: "a", B: "b", C: "c", B2: "b'", C2: "c'"}

# System B process -> its System A twin
SIBLINGS = {A: A, B: B, C: C, B2: B, C2: C}


def system_a() -> Digraph:
    return Digraph(3, [(A, B), (B, C), (C, A)])


def system_b() -> Digraph:
    return Digraph(5, [(A, B), (B, C), (C, A), (A, B2), (B2, C2)])


class LockstepBroken(AssertionError):
    pass


@dataclass
class SiblingRun:
    trace: Trace
    outputs: list          # System B mis vectors, one per configuration
    violations: list       # check_umis violations per configuration


def _require_uniform(p):
    if not p.anonymous or not p.deterministic:
        raise ValueError(f"{p.name!r} is not a uniform deterministic protocol; the construction does not apply")


def sibling_execution(make_protocol, trace_a: Trace) -> SiblingRun:
    """Replay a System A trace on System B with each tail process moving in lockstep with its twin.

    ``make_protocol(graph)`` must build the same uniform code for any graph.
    Every mirrored configuration is checked to hold bit-equal twin states.
    """
    ga, gb = system_a(), system_b()
    pa, pb = make_protocol(ga), make_protocol(gb)
    _require_uniform(pb)
    c0 = trace_a.configurations[0]
    config = tuple(c0[SIBLINGS[v]] for v in range(gb.n))
    out = Trace(trace_a.seed, [config])
    rng = random.Random(0)
    for act in trace_a.activations:
        act_b = frozenset(v for v in range(gb.n) if SIBLINGS[v] in act)
        config = apply(pb, config, act_b, rng)
        out.configurations.append(config)
        out.activations.append(act_b)
    for k, (ca, cb) in enumerate(zip(trace_a.configurations, out.configurations)):
        for v in range(gb.n):
            if cb[v] != ca[SIBLINGS[v]]:
                raise LockstepBroken(f"step {k}: {NAMES[v]} diverged from its twin")
    outputs = [pb.outputs(c) for c in out.configurations]
    for k, (ca, ob) in enumerate(zip(trace_a.configurations, outputs)):
        oa = pa.outputs(ca)
        if any(ob[v] != oa[SIBLINGS[v]] for v in range(gb.n)):
            raise LockstepBroken(f"step {k}: outputs of twins differ")
    violations = [check_umis(gb, o).violations for o in outputs]
    return SiblingRun(out, outputs, violations)


@dataclass
class SilenceVerdict:
    terminal: bool              # System A reached a terminal configuration
    steps: int
    b_terminal: bool = False    # the extended System B configuration is terminal too
    b_violations: tuple = ()


def extend_to_system_b(config_a) -> tuple:
    return tuple(config_a[SIBLINGS[v]] for v in range(5))


def silence_witness(make_protocol, c0, scheduler=SchedulerKind(SYNC), seed=0, max_steps=10_000) -> SilenceVerdict:
    """Run on System A; if it goes silent, copy the states onto System B and inspect the tail.

    Only the current configuration is kept, so long horizons stay cheap.
    """
    ga, gb = system_a(), system_b()
    pa = make_protocol(ga)
    sched = Scheduler(scheduler, ga)
    rng = random.Random(seed)
    config = tuple(c0)
    steps = 0
    while steps < max_steps:
        config, activated = step(pa, ga, config, sched, rng)
        if not activated:
            break
        steps += 1
    else:
        if enabled_set(pa, config):
            return SilenceVerdict(False, steps)
    pb = make_protocol(gb)
    cb = extend_to_system_b(config)
    return SilenceVerdict(
        True,
        steps,
        b_terminal=not enabled_set(pb, cb),
        b_violations=check_umis(gb, pb.outputs(cb)).violations,
    )
