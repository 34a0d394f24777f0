#!/usr/bin/env python3
"""Generate the scaled BT/ABT corpus, time the strategies and write a CSV.

Defaults are sized for a laptop: a handful of queries per model and a few
repetitions.  Raise ``--reps``/``--warmups`` to 30 for publication-style runs.
"""
import argparse
import os
import statistics
from collections import defaultdict

from hpcause.bench import GeneratorSpec, generate, records_to_csv, run_bench, sample_queries

DEFAULT_MODELS = "bt:5,bt:7,bt:10,abt:11:8"


def parse_models(text, seed):
    specs = []
    for item in text.split(","):
        parts = item.split(":")
        extra = int(parts[2]) if len(parts) > 2 else 0
        specs.append(GeneratorSpec(parts[0], int(parts[1]), "or", extra, seed))
    return specs


def summarize(records):
    by_strategy = defaultdict(list)
    for r in records:
        if r.status == "ok":
            by_strategy[r.strategy].append(r.wall_us)
    for name, times in sorted(by_strategy.items()):
        print(f"  {name:<7} {len(times):>4} queries  median {statistics.median(times) / 1000:9.1f} ms  "
              f"max {max(times) / 1000:9.1f} ms")
    pairs = defaultdict(dict)
    for r in records:
        if r.status == "ok":
            pairs[(r.model, r.query)][r.strategy] = r.wall_us
    both = [p for p in pairs.values() if "ilp" in p and "maxsat" in p]
    if both:
        wins = sum(p["maxsat"] <= p["ilp"] for p in both)
        print(f"  maxsat no slower than ilp on {wins}/{len(both)} queries")
    flagged = [r for r in records if not (r.consistent and r.agree)]
    print(f"  flagged records: {len(flagged)}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--models", default=DEFAULT_MODELS, help="family:height[:extra] list")
    ap.add_argument("--sizes", default="1,2,3,4")
    ap.add_argument("--count", type=int, default=2, help="queries per model and cause size")
    ap.add_argument("--strategies", default="ilp,maxsat,satopt")
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--warmups", type=int, default=1)
    ap.add_argument("--timeout-secs", type=float, default=120.0)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="bench-out")
    args = ap.parse_args(argv)

    os.makedirs(args.out, exist_ok=True)
    sizes = [int(s) for s in args.sizes.split(",")]
    queries = []
    for spec in parse_models(args.models, args.seed):
        model = generate(spec)
        with open(os.path.join(args.out, f"{spec.name}.json"), "w", encoding="utf-8") as fh:
            fh.write(model.to_json())
        queries += sample_queries(model, sizes, args.count, args.seed)
        print(f"{spec.name}: {len(model.endogenous)} endogenous variables")

    records = run_bench(queries, args.strategies.split(","), args.reps, args.warmups, args.timeout_secs, args.jobs)
    path = os.path.join(args.out, "results.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(records_to_csv(records))
    print(f"wrote {len(records)} records to {path}")
    summarize(records)


if __name__ == "__main__":
    main()
