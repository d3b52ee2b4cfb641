"""Seeded trials and campaigns: run a protocol until its observation settles, then report."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import asdict, dataclass, field
from typing import Optional

from umisim import adversary
from umisim.digraph import Digraph, GeneratorSpec, diameter, generate
from umisim.protocols.det import DetProtocol
from umisim.protocols.local_umis import CompositeProtocol, LocalUmisProtocol
from umisim.protocols.naming import NamingProtocol
from umisim.protocols.prefix import IdentifierOverflow, PrefixProtocol
from umisim.runtime import SYNC, SchedulerKind, run, settling_round

PROTOCOLS = ("det", "prefix", "naming", "local-umis", "composite")


class ConfigurationError(ValueError):
    """An experiment that cannot be run as specified."""


def local_names(g: Digraph, rng: random.Random, width: Optional[int] = None) -> list:
    """Random fixed-width bit strings forming a local naming; unrelated processes may collide."""
    width = width or max(1, math.ceil(math.log2(g.n + 1)))
    anc = [g.ancestors(i) for i in range(g.n)]
    ids = [None] * g.n
    for i in rng.sample(range(g.n), g.n):
        taken = {ids[j] for j in range(g.n) if ids[j] is not None and (j in anc[i] or i in anc[j])}
        choices = [format(x, f"0{width}b") for x in range(2**width)]
        ids[i] = rng.choice([c for c in choices if c not in taken])
    return ids


def build_protocol(name: str, g: Digraph, seed=0, k: int = 2, ids=None):
    rng = random.Random(f"ids-{seed}")
    if name == "det":
        if ids is None:
            ids = rng.sample(range(g.n), g.n)
        return DetProtocol(g, ids)
    if name == "prefix":
        return PrefixProtocol(g)
    if name == "naming":
        return NamingProtocol(g, k)
    if name == "local-umis":
        return LocalUmisProtocol(g, ids if ids is not None else local_names(g, rng))
    if name == "composite":
        return CompositeProtocol(g, k)
    raise ConfigurationError(f"unknown protocol {name!r}")


def min_window(p, g: Digraph) -> int:
    # naming checks fire only every |ids|+1 rounds; a shorter window can miss a pending one
    if isinstance(p, (NamingProtocol, CompositeProtocol)):
        return 2 * (g.n + 2)
    return 1


@dataclass
class TrialResult:
    seed: int
    protocol: str
    scheduler: str
    n: int
    m: int
    diameter: int
    ell: int
    converged: bool
    rounds: Optional[int]
    rounds_run: int
    valid: bool
    peak_state_bits: int
    peak_id_bits: int
    aborted: bool = False
    stable_state_bits: Optional[int] = None   # peak over round ends once legitimate and settled
    trace: object = field(default=None, repr=False)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("trace")
        return d


class _StableWindow:
    """Stop rule: the observation has been constant, legitimate and settled for ``window`` rounds."""

    def __init__(self, p, window):
        self.p = p
        self.window = window
        self.checked = 0
        self.since = None
        self.last = None
        self.peak_bits = 0

    def __call__(self, trace) -> bool:
        configs = trace.configurations
        for k in range(self.checked, len(configs)):
            obs = self.p.observe(configs[k])
            if obs != self.last:
                self.last = obs
                self.since = None
        self.checked = len(configs)
        end = configs[-1]
        self.peak_bits = max(self.peak_bits, max(self.p.state_bits(s) for s in end))
        if not (self.p.legitimate(end) and self.p.settled(end)):
            self.since = None
            return False
        r = len(trace.round_ends)
        if self.since is None:
            self.since = r
        return r - self.since >= self.window


def id_bits(p, config) -> int:
    if isinstance(p, PrefixProtocol):
        return max(len(s.id) for s in config)
    if isinstance(p, NamingProtocol):
        return max(len(s.id) for s in config)
    if isinstance(p, CompositeProtocol):
        return max(len(s.naming.id) for s in config)
    if isinstance(p, (DetProtocol, LocalUmisProtocol)):
        return max((len(str(x)) if isinstance(x, str) else max(1, int(x).bit_length()) for x in p.ids), default=0)
    return 0


def run_trial(
    protocol: str,
    g: Digraph,
    scheduler: SchedulerKind,
    adv: adversary.AdversarySpec,
    seed: int,
    max_rounds: int,
    window: Optional[int] = None,
    k: int = 2,
    ids=None,
    keep_trace: bool = False,
) -> TrialResult:
    p = build_protocol(protocol, g, seed, k, ids)
    if p.synchronous_only and scheduler.kind != SYNC:
        raise ConfigurationError(f"{protocol} requires the synchronous scheduler")
    c0, ell = adversary.initial_configuration(p, g, adv.with_seed(seed))
    d = diameter(g)
    window = max(window if window is not None else d + 2, min_window(p, g))
    stop = _StableWindow(p, window)
    aborted = False
    try:
        trace = run(p, g, c0, scheduler, seed, max_rounds, stop=stop)
    except IdentifierOverflow:
        aborted = True
        trace = None
    if trace is None:
        return TrialResult(seed, protocol, scheduler.kind, g.n, g.m, d, ell, False, None,
                           0, False, stop.peak_bits, p.max_id_bits if isinstance(p, PrefixProtocol) else 0,
                           aborted=True)
    last = trace.configurations[-1]
    stop.peak_bits = max(stop.peak_bits, max(p.state_bits(s) for s in last))
    converged = trace.terminal and p.legitimate(last)
    converged = converged or (stop.since is not None and trace.rounds_completed() - stop.since >= window)
    valid = p.legitimate(last)
    rounds = settling_round(trace, p.observe) if converged else None
    stable_bits = None
    if rounds is not None:
        # steady memory: from the round where the run became legitimate and fake-free
        first = stop.since if stop.since is not None else rounds
        ends = [trace.round_config(r) for r in range(first, trace.rounds_completed() + 1)]
        stable_bits = max(p.state_bits(s) for k in ends for s in trace.configurations[k])
    return TrialResult(
        seed, protocol, scheduler.kind, g.n, g.m, d, ell, converged, rounds,
        trace.rounds_completed(), valid, stop.peak_bits, id_bits(p, last), aborted,
        stable_bits, trace if keep_trace else None,
    )


# -- campaigns ----------------------------------------------------------------


@dataclass
class ExperimentSpec:
    protocol: str
    graph: GeneratorSpec
    scheduler: SchedulerKind
    adversary: adversary.AdversarySpec
    seeds: list
    max_rounds: Optional[int] = None
    window: Optional[int] = None
    k: int = 2

    def validate(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigurationError(f"unknown protocol {self.protocol!r}")
        if self.protocol in ("naming", "composite") and self.scheduler.kind != SYNC:
            raise ConfigurationError(f"{self.protocol} requires the synchronous scheduler")
        if self.adversary.mode == adversary.SAME_ID and self.protocol in ("det", "local-umis"):
            raise ConfigurationError(f"same-id does not apply to {self.protocol}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise ConfigurationError("max-rounds must be at least 1")
        if self.window is not None and self.window < 1:
            raise ConfigurationError("window must be at least 1")
        if self.k < 2:
            raise ConfigurationError("k must be at least 2")


def log_bound(n, ell, d) -> float:
    return math.log2(n) + math.log2(ell + 2) + d


def naming_bound(n, ell) -> float:
    return (n + ell) * math.log2(n + 2)


def default_max_rounds(protocol, n, ell, d) -> int:
    if protocol == "det":
        return 3 * (d + 2)
    if protocol == "prefix":
        return math.ceil(50 * log_bound(n, ell, d))
    if protocol == "local-umis":
        return 10 * n + 2 * (d + 2)
    return math.ceil(50 * naming_bound(n, ell))


def ratios(r: TrialResult) -> dict:
    if r.rounds is None:
        return {"ratio_d1": None, "ratio_log": None, "ratio_naming": None}
    return {
        "ratio_d1": r.rounds / (r.diameter + 1),
        "ratio_log": r.rounds / log_bound(r.n, r.ell, r.diameter),
        "ratio_naming": r.rounds / naming_bound(r.n, r.ell),
    }


def run_campaign(spec: ExperimentSpec, jobs: int = 1) -> list:
    spec.validate()
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_campaign_trial, [(spec, s) for s in spec.seeds]))
    else:
        results = [_campaign_trial((spec, s)) for s in spec.seeds]
    return sorted(results, key=lambda r: r.seed)


def _campaign_trial(args) -> TrialResult:
    spec, seed = args
    g = generate(spec.graph, seed)
    max_rounds = spec.max_rounds
    if max_rounds is None:
        # ell is only known after building the configuration; budget for the adversary's cap
        max_rounds = default_max_rounds(spec.protocol, g.n, spec.adversary.fake_budget, diameter(g))
    return run_trial(spec.protocol, g, spec.scheduler, spec.adversary, seed, max_rounds, spec.window, spec.k)


CSV_FIELDS = [
    "seed", "protocol", "scheduler", "n", "m", "diameter", "ell", "converged", "rounds",
    "rounds_run", "valid", "peak_state_bits", "stable_state_bits", "peak_id_bits", "aborted",
    "ratio_d1", "ratio_log", "ratio_naming",
]


def report_rows(results) -> list:
    return [{**r.row(), **ratios(r)} for r in results]


def _quantile(xs, q):
    xs = sorted(xs)
    if not xs:
        return None
    pos = q * (len(xs) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def summarize(spec: ExperimentSpec, results) -> dict:
    rounds = [r.rounds for r in results if r.converged]
    rows = report_rows(results)

    def med(key):
        vals = [row[key] for row in rows if row[key] is not None]
        return statistics.median(vals) if vals else None

    return {
        "protocol": spec.protocol,
        "graph": str(spec.graph),
        "scheduler": spec.scheduler.kind,
        "adversary": spec.adversary.mode,
        "trials": len(results),
        "converged": len(rounds),
        "timeouts": sum(1 for r in results if not r.converged),
        "aborted": sum(1 for r in results if r.aborted),
        "all_converged_valid": all(r.valid for r in results if r.converged),
        "rounds_median": statistics.median(rounds) if rounds else None,
        "rounds_p90": _quantile(rounds, 0.9),
        "rounds_max": max(rounds) if rounds else None,
        "ratio_d1_median": med("ratio_d1"),
        "ratio_log_median": med("ratio_log"),
        "ratio_naming_median": med("ratio_naming"),
        "peak_state_bits_max": max((r.peak_state_bits for r in results), default=None),
        "stable_state_bits_max": max((r.stable_state_bits for r in results if r.stable_state_bits), default=None),
    }
