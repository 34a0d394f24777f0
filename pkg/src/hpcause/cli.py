"""Command-line interface: ``hpcause {check,infer,gen,bench,export,validate}``.

Exit codes: 0 success, 1 not a cause (``check --strict``), 2 usage error,
3 input error, 4 timeout.
"""
from __future__ import annotations

import argparse
import glob
import json
import os
import sys
import time
from typing import Optional

from .bench import GeneratorSpec, generate, records_to_csv, root_variable, run_bench, sample_queries
from .causality import Strategy, check_cause, infer_why
from .cnf import tseitin, write_dimacs, write_wcnf
from .encoder import build_f, build_g_max, build_g_prime
from .errors import CausalError, ParseError, SolverTimeout
from .expr import conj, literal, parse_expr
from .ilp import build_check_program, build_why_program, solve_ilp, write_lp
from .model import format_assignment, load_model, parse_assignment

EXIT_OK, EXIT_NOT_CAUSE, EXIT_USAGE, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3, 4


def parse_effect(text: str):
    """``"BS=1"`` or ``"A=1,B=0"`` (conjunction of literals) or any boolean expression."""
    try:
        lits = parse_assignment(text)
    except (ParseError, CausalError):
        lits = None
    if lits:
        return conj([literal(n, v) for n, v in lits.items()])
    return parse_expr(text)


def _deadline(args) -> Optional[float]:
    t = getattr(args, "timeout_secs", None)
    return None if t is None else time.monotonic() + t


def _emit(text: str, out: Optional[str] = None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _answer_text(ans) -> str:
    def fmt(ps):
        return "-" if ps is None else (format_assignment(ps) or "(empty)")

    lines = [
        f"strategy: {ans.strategy}",
        f"AC1: {ans.ac1}",
        f"AC2: {ans.ac2}",
        f"AC3: {ans.ac3}",
        f"cause: {fmt(ans.x_min)}",
        f"W: {fmt(ans.w)}",
        f"distance: {'-' if ans.distance is None else ans.distance}",
    ]
    if ans.responsibility is not None:
        lines.append(f"responsibility: {ans.responsibility}")
    if ans.witness is not None:
        lines.append(f"witness: x'={format_assignment(ans.witness.x_prime)} W={fmt(ans.witness.w)}")
    if ans.all_optima is not None:
        lines.append("all optima: " + " | ".join(fmt(x) for x in ans.all_optima))
    if ans.minimality_verified is not None:
        lines.append(f"minimality verified: {ans.minimality_verified}")
    lines.append(f"is cause: {ans.is_cause}")
    return "\n".join(lines) + "\n"


def _render(ans, args) -> str:
    if args.format == "json":
        return ans.to_json(timings=args.timings)
    return _answer_text(ans)


# --- subcommands ----------------------------------------------------------------

def cmd_check(args) -> int:
    model = load_model(args.model)
    ans = check_cause(model, parse_assignment(args.context), parse_effect(args.effect), parse_assignment(args.cause),
                      Strategy(args.strategy), all_optima=args.all_optima, deadline=_deadline(args))
    _emit(_render(ans, args))
    return EXIT_NOT_CAUSE if args.strict and not ans.is_cause else EXIT_OK


def cmd_infer(args) -> int:
    model = load_model(args.model)
    ans = infer_why(model, parse_assignment(args.context), parse_effect(args.effect), deadline=_deadline(args))
    _emit(_render(ans, args))
    return EXIT_OK


def cmd_gen(args) -> int:
    family = args.family
    spec = GeneratorSpec(family, args.height, args.connective, args.extra if family == "abt" else 0, args.seed)
    _emit(generate(spec).to_json(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    model = load_model(args.model)
    print(f"ok: {model.name or os.path.basename(args.model)}: {len(model.exogenous)} exogenous, "
          f"{len(model.endogenous)} endogenous, root {root_variable(model)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    paths = sorted(glob.glob(args.models))
    if not paths:
        raise ParseError(f"no model files match {args.models!r}")
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    strategies = [Strategy(s.strip()) for s in args.strategies.split(",") if s.strip()]
    queries = []
    for path in paths:
        queries += sample_queries(load_model(path), sizes, args.count, args.seed)
    records = run_bench(queries, strategies, args.reps, args.warmups, args.timeout_secs, args.jobs)
    _emit(records_to_csv(records, timings=not args.omit_timings), args.csv)
    flagged = [r for r in records if not (r.consistent and r.agree)]
    if flagged:
        print(f"warning: {len(flagged)} records flagged inconsistent", file=sys.stderr)
    return EXIT_OK


def _load_query(args):
    ctx, effect, cause = args.context, args.effect, args.cause
    if args.query:
        with open(args.query, encoding="utf-8") as fh:
            doc = json.load(fh)
        ctx, effect, cause = doc.get("context", ctx), doc.get("effect", effect), doc.get("cause", cause)
    if ctx is None or effect is None:
        raise ParseError("export needs a context and an effect (via --query or flags)")
    return parse_assignment(ctx), parse_effect(effect), None if cause is None else parse_assignment(cause)


def cmd_export(args) -> int:
    model = load_model(args.model)
    ctx, effect, cause = _load_query(args)
    written = []

    def put(suffix, text):
        path = f"{args.out}{suffix}"
        _emit(text, path)
        written.append(path)

    if args.kind == "dimacs":
        if cause is None:
            raise ParseError("dimacs export needs a cause")
        put(".f.cnf", write_dimacs(tseitin(build_f(model, ctx, effect, cause))))
        put(".gprime.cnf", write_dimacs(tseitin(build_g_prime(model, ctx, effect, cause))))
    elif args.kind == "wcnf":
        if cause is None:
            raise ParseError("wcnf export needs a cause")
        hard, soft = build_g_max(model, ctx, effect, cause)
        put(".wcnf", write_wcnf(tseitin(hard), soft))
    else:
        if cause is None:
            program = build_why_program(model, ctx, effect)
            put(".stage1.lp", write_lp(program, 1))
            res = solve_ilp(program, _deadline(args))
            if res.optimal:
                put(".stage2.lp", write_lp(program, 2, res.objective_values[:1]))
        else:
            put(".stage1.lp", write_lp(build_check_program(model, ctx, effect, cause), 1))
    for path in written:
        print(path)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hpcause", description="Actual causality checking and inference")
    sub = p.add_subparsers(dest="command", required=True)

    def query_args(sp, cause: bool):
        sp.add_argument("--model", required=True, help="model JSON file")
        sp.add_argument("--context", required=True, help='exogenous values, e.g. "U1=1,U2=0"')
        sp.add_argument("--effect", required=True, help='effect, e.g. "BS=1" or a boolean expression')
        if cause:
            sp.add_argument("--cause", required=True, help='candidate cause, e.g. "ST=1,BT=1"')
        sp.add_argument("--format", choices=["json", "text"], default="json")
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings in JSON stats")
        sp.add_argument("--timeout-secs", type=float, default=None)

    c = sub.add_parser("check", help="check a candidate cause")
    query_args(c, cause=True)
    c.add_argument("--strategy", choices=["sat", "satopt", "ilp", "maxsat", "brute"], default="maxsat")
    c.add_argument("--all-optima", action="store_true", help="collect every minimum-distance sub-cause")
    c.add_argument("--strict", action="store_true", help="exit with status 1 when the candidate is not a cause")
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("infer", help="find a cause with maximum responsibility")
    query_args(i, cause=False)
    i.set_defaults(func=cmd_infer)

    g = sub.add_parser("gen", help="generate a benchmark model")
    g.add_argument("--family", choices=["bt", "abt"], required=True)
    g.add_argument("--height", type=int, required=True)
    g.add_argument("--extra", type=int, default=0)
    g.add_argument("--connective", choices=["or", "and", "random"], default="or")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="time strategies on sampled queries")
    b.add_argument("--models", required=True, help="glob of model JSON files")
    b.add_argument("--sizes", default="1,2,3")
    b.add_argument("--count", type=int, default=1, help="queries per model and cause size")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--strategies", default="ilp,maxsat")
    b.add_argument("--reps", type=int, default=30)
    b.add_argument("--warmups", type=int, default=30)
    b.add_argument("--timeout-secs", type=float, default=120.0)
    b.add_argument("--csv", default=None)
    b.add_argument("--omit-timings", action="store_true", help="leave wall_us empty for reproducible CSV")
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes across queries")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export", help="write DIMACS, WCNF or CPLEX LP encodings")
    e.add_argument("--model", required=True)
    e.add_argument("--query", default=None, help='JSON file with "context", "effect" and optional "cause"')
    e.add_argument("--context", default=None)
    e.add_argument("--effect", default=None)
    e.add_argument("--cause", default=None)
    e.add_argument("--kind", choices=["dimacs", "wcnf", "lp"], required=True)
    e.add_argument("--out", required=True, help="output path prefix")
    e.add_argument("--timeout-secs", type=float, default=None)
    e.set_defaults(func=cmd_export)

    v = sub.add_parser("validate", help="parse a model and check its invariants")
    v.add_argument("--model", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except (CausalError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
