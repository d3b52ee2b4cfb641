"""Batch experiment runner.

Writes one CSV row per seed, a JSON summary and (unless ``--no-figure``) a
PNG figure next to the CSV.  Exit status is 2 for configuration errors and 0
otherwise; timeouts are data, not failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from umisim import adversary
from umisim.digraph import GeneratorSpec, diameter, dumps, generate
from umisim.experiments import (
    CSV_FIELDS,
    PROTOCOLS,
    build_protocol,
    ConfigurationError,
    ExperimentSpec,
    default_max_rounds,
    report_rows,
    run_campaign,
    run_trial,
    summarize,
)
from umisim.runtime import SchedulerKind, export_trace

log = logging.getLogger("umisim")

SEED_BASE_ENV = "UMISIM_SEED_BASE"


def parse_seeds(text: str) -> list:
    """``a..b`` (inclusive), a single seed, or a comma list.  ``b < a`` yields no seeds."""
    text = text.strip()
    if not text:
        return []
    if ".." in text:
        a, _, b = text.partition("..")
        return list(range(int(a), int(b) + 1))
    return [int(x) for x in text.split(",")]


def default_seeds() -> list:
    base = int(os.environ.get(SEED_BASE_ENV, "0"))
    return list(range(base, base + 10))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="umisim", description="Run seeded UMIS stabilization campaigns.")
    ap.add_argument("--protocol", required=True, choices=PROTOCOLS)
    ap.add_argument("--graph", required=True, help="cycle:N, path:N, random:N:P, scc:N:EXTRA, cliques:A,B,.., "
                                                   "fixture:system-a|system-b, file:PATH")
    ap.add_argument("--scheduler", default="sync", help="sync, dist or local-central")
    ap.add_argument("--fairness-bound", type=int, default=None)
    ap.add_argument("--adversary", default="zero", help="zero, corrupt:B:P or same-id[:B:P]")
    ap.add_argument("--seeds", default=None, help=f"a..b inclusive; defaults to 10 seeds from ${SEED_BASE_ENV}")
    ap.add_argument("--max-rounds", type=int, default=None)
    ap.add_argument("--window", type=int, default=None, help="stability window in rounds (default D+2)")
    ap.add_argument("--k", type=int, default=2, help="nonce range for naming")
    ap.add_argument("--out", default=None, help="CSV path; the .json summary and .png figure go beside it")
    ap.add_argument("--no-figure", action="store_true")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--trace-out", default=None, help="write the first seed's trace as JSON lines")
    ap.add_argument("--dump-graph", default=None, help="write the first seed's graph in text form")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def spec_from_args(args) -> ExperimentSpec:
    try:
        spec = ExperimentSpec(
            protocol=args.protocol,
            graph=GeneratorSpec.parse(args.graph),
            scheduler=SchedulerKind.parse(args.scheduler, args.fairness_bound),
            adversary=adversary.AdversarySpec.parse(args.adversary),
            seeds=parse_seeds(args.seeds) if args.seeds is not None else default_seeds(),
            max_rounds=args.max_rounds,
            window=args.window,
            k=args.k,
        )
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    spec.validate()
    if args.jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    return spec


def write_csv(rows, fh):
    w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: "" if row[k] is None else row[k] for k in CSV_FIELDS})


def _first_seed_extras(spec, args):
    seed = spec.seeds[0]
    g = generate(spec.graph, seed)
    if args.dump_graph:
        Path(args.dump_graph).write_text(dumps(g))
    if args.trace_out:
        max_rounds = spec.max_rounds or default_max_rounds(spec.protocol, g.n, spec.adversary.fake_budget, diameter(g))
        r = run_trial(spec.protocol, g, spec.scheduler, spec.adversary, seed, max_rounds, spec.window, spec.k,
                      keep_trace=True)
        if r.trace is not None:
            p = build_protocol(spec.protocol, g, seed, spec.k)
            with open(args.trace_out, "w") as fh:
                export_trace(r.trace, p, fh)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        spec = spec_from_args(args)
        # graph construction and per-graph scheduler checks fail before any trial runs
        for seed in spec.seeds:
            spec.scheduler.resolve_bound(generate(spec.graph, seed))
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"umisim: configuration error: {exc}", file=sys.stderr)
        return 2

    results = run_campaign(spec, jobs=args.jobs)
    rows = report_rows(results)
    summary = summarize(spec, results)
    log.info("%d trials, %d converged", summary["trials"], summary["converged"])

    if args.out is None:
        write_csv(rows, sys.stdout)
        json.dump(summary, sys.stderr, indent=2)
        sys.stderr.write("\n")
    else:
        out = Path(args.out)
        with open(out, "w", newline="") as fh:
            write_csv(rows, fh)
        out.with_suffix(".json").write_text(json.dumps(summary, indent=2) + "\n")
        if not args.no_figure:
            from umisim.plotting import campaign_figure

            campaign_figure(rows, out.with_suffix(".png"), f"{spec.protocol} on {spec.graph} ({spec.scheduler.kind})")
    if spec.seeds and (args.trace_out or args.dump_graph):
        _first_seed_extras(spec, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
