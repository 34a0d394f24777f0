"""Benchmark corpora and a small timing harness.

Generated families:

* binary trees (``bt``): node ``n<k>`` in heap numbering (children of ``k`` are
  ``2k+1`` and ``2k+2``); every leaf copies its own exogenous input ``u<k>``;
  inner nodes combine their children with OR, AND or a seeded random choice.
* trees plus extra variables (``abt``): a binary tree plus ``x<j>`` variables,
  each a random 2-3 literal clause over already emitted variables, all OR-ed
  into the root equation.

Randomness comes from a splitmix64 stream so corpora are reproducible
across runs and platforms.
"""
from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

from .causality import CausalQuery, Strategy, check_cause, infer_why
from .errors import CapExceeded, EffectNeverHolds, InvalidQuery, SolverTimeout
from .expr import Const, Not, Var, conj, disj, literal, neg, parse_expr
from .model import CausalModel, evaluate, parse_model

MASK64 = (1 << 64) - 1
BINARY_TREE, ABT = "bt", "abt"
OR, AND, RANDOM = "or", "and", "random"


class SplitMix64:
    """The splitmix64 generator (Steele, Lea and Flood)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` (plain modulo reduction)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def coin(self) -> bool:
        return bool(self.next_u64() >> 63)

    def sample(self, items: Sequence, k: int) -> list:
        """``k`` distinct items, by a partial Fisher-Yates shuffle."""
        pool = list(items)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class GeneratorSpec:
    family: str = BINARY_TREE
    height: int = 3
    connective: str = OR
    extra_vars: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.family not in (BINARY_TREE, ABT):
            raise ValueError(f"unknown family {self.family!r}")
        if self.height < 1:
            raise ValueError("height must be at least 1")
        if self.connective not in (OR, AND, RANDOM):
            raise ValueError(f"unknown connective {self.connective!r}")
        if self.extra_vars < 0 or (self.family == BINARY_TREE and self.extra_vars):
            raise ValueError("extra variables are only meaningful for the abt family")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def name(self) -> str:
        base = f"{self.family}-h{self.height}-{self.connective}"
        if self.family == ABT:
            base += f"-x{self.extra_vars}"
        return f"{base}-s{self.seed}"


def _tree_parts(spec: GeneratorSpec, rng: SplitMix64):
    nodes = (1 << (spec.height + 1)) - 1
    first_leaf = (1 << spec.height) - 1
    exo = [f"u{k}" for k in range(first_leaf, nodes)]
    eqs = {}
    for k in range(nodes - 1, -1, -1):
        if k >= first_leaf:
            eqs[f"n{k}"] = Var(f"u{k}")
            continue
        kids = [Var(f"n{2 * k + 1}"), Var(f"n{2 * k + 2}")]
        op = spec.connective if spec.connective != RANDOM else (OR if rng.coin() else AND)
        eqs[f"n{k}"] = disj(kids) if op == OR else conj(kids)
    return exo, eqs


def gen_binary_tree(spec: GeneratorSpec) -> CausalModel:
    if spec.family != BINARY_TREE:
        raise ValueError("gen_binary_tree needs the bt family")
    exo, eqs = _tree_parts(spec, SplitMix64(spec.seed))
    return CausalModel(spec.name, exo, list(eqs), eqs)


def gen_abt(spec: GeneratorSpec) -> CausalModel:
    if spec.family != ABT:
        raise ValueError("gen_abt needs the abt family")
    rng = SplitMix64(spec.seed)
    exo, eqs = _tree_parts(spec, rng)
    root = eqs.pop("n0")
    emitted = list(eqs)
    extras = {}
    for j in range(spec.extra_vars):
        width = 2 + rng.below(2)
        picks = rng.sample(emitted, min(width, len(emitted)))
        extras[f"x{j}"] = disj([literal(v, rng.coin()) for v in picks])
        emitted.append(f"x{j}")
    eqs.update(extras)
    eqs["n0"] = disj([root] + [Var(x) for x in extras])
    return CausalModel(spec.name, exo, list(eqs), eqs)


def generate(spec: GeneratorSpec) -> CausalModel:
    if spec.family == BINARY_TREE:
        return gen_binary_tree(spec)
    return gen_abt(spec)


def _random_expr(rng: SplitMix64, pool: Sequence[str], depth: int):
    if depth == 0 or len(pool) == 1 or rng.below(4) == 0:
        return literal(pool[rng.below(len(pool))], rng.below(4) != 0)
    kind = rng.below(5)
    if kind == 4:
        return Not(_random_expr(rng, pool, depth - 1))
    args = [_random_expr(rng, pool, depth - 1) for _ in range(2 + (kind < 2 and rng.below(3) == 0))]
    if kind == 3:
        a, b = args[0], args[1]
        return disj([conj([a, b]), conj([neg(a), neg(b)])])
    return conj(args) if kind in (0, 2) else disj(args)


def random_model(seed: int, n_endogenous: int = 6, n_exogenous: int = 3, depth: int = 2) -> CausalModel:
    """Seeded random acyclic model: ``V<i>`` reads exogenous ``U<j>`` and earlier ``V``s.

    Each equation is a random formula of bounded depth that mentions the
    immediately preceding variable with probability about one half, which
    keeps the dependency graph deep enough to be interesting.
    """
    rng = SplitMix64(seed)
    exo = [f"U{j}" for j in range(n_exogenous)]
    eqs, pool = {}, list(exo)
    for i in range(n_endogenous):
        e = _random_expr(rng, pool, depth)
        if i and rng.coin():
            e = (conj if rng.coin() else disj)([e, literal(f"V{i - 1}", rng.below(4) != 0)])
        if isinstance(e, Const):
            e = Var(pool[-1])
        eqs[f"V{i}"] = e
        pool.append(f"V{i}")
    return CausalModel(f"random-{n_endogenous}-{seed}", exo, list(eqs), eqs)


def root_variable(model: CausalModel) -> str:
    """The last declared endogenous variable that no equation reads."""
    used = {p for v in model.endogenous for p in model.parents[v]}
    roots = [v for v in model.endogenous if v not in used]
    return roots[-1]


def sample_queries(model: CausalModel, cause_sizes: Sequence[int], count: int, seed: int,
                   strategy=Strategy.MAXSAT, effect_var: Optional[str] = None,
                   require_true: bool = True, retries: int = 64) -> List[CausalQuery]:
    """``count`` checking queries per cause size, causes drawn from the non-effect variables.

    Each query gets its own seeded context.  With ``require_true`` the effect
    is ``root=1`` and contexts are redrawn (up to ``retries`` times) until it
    holds; otherwise the effect is the root at its actual value.
    """
    effect_var = effect_var or root_variable(model)
    pool = [v for v in model.endogenous if v != effect_var]
    for size in cause_sizes:
        if not 1 <= size <= len(pool):
            raise InvalidQuery(f"cause size {size} outside 1..{len(pool)}")
    rng = SplitMix64(seed)
    out = []
    for size in cause_sizes:
        for _ in range(count):
            for _attempt in range(retries):
                ctx = {u: rng.coin() for u in model.exogenous}
                actual = evaluate(model, ctx)
                if actual[effect_var] or not require_true:
                    break
            else:
                raise EffectNeverHolds(f"{effect_var}=1 never held in {retries} sampled contexts")
            effect = literal(effect_var, actual[effect_var])
            cause = [(v, actual[v]) for v in sorted(rng.sample(pool, size), key=model.endogenous.index)]
            out.append(CausalQuery(model, ctx, effect, cause, strategy))
    return out


# --- harness ----------------------------------------------------------------

CSV_COLUMNS = ["model", "query", "strategy", "size", "status", "ac1", "ac2", "ac3", "distance",
               "encoding_size", "wall_us", "runs", "consistent", "agree"]


@dataclass
class BenchRecord:
    model: str
    query: int
    strategy: str
    size: int
    status: str = "ok"
    ac1: Optional[bool] = None
    ac2: Optional[bool] = None
    ac3: Optional[bool] = None
    distance: Optional[int] = None
    encoding_size: int = 0
    wall_us: Optional[int] = None
    runs: int = 0
    consistent: bool = True
    agree: bool = True
    samples: list = field(default_factory=list, repr=False)

    @property
    def verdict(self):
        return self.status, self.ac1, self.ac2, self.ac3, self.distance


def _run_once(query: CausalQuery, strategy: Strategy, timeout: Optional[float]):
    deadline = None if timeout is None else time.monotonic() + timeout
    if strategy is Strategy.WHY_ILP:
        return infer_why(query.model, query.context, query.effect, deadline=deadline)
    return check_cause(query.model, query.context, query.effect, query.cause, strategy, deadline=deadline)


# strategies whose verdicts answer the same question
AGREEMENT_GROUPS = (
    {Strategy.ILP, Strategy.MAXSAT},
    {Strategy.SAT_LEGACY, Strategy.SAT_OPTIMIZED, Strategy.BRUTE_FORCE},
)


def bench_query(qid: int, query: CausalQuery, strategies, reps: int = 1, warmups: int = 0,
                timeout: Optional[float] = 120.0) -> List[BenchRecord]:
    records = []
    for strategy in map(Strategy, strategies):
        size = 0 if query.cause is None else len(query.cause)
        rec = BenchRecord(query.model.name, qid, strategy.value, size)
        verdicts = []
        for i in range(warmups + reps):
            t0 = time.perf_counter()
            try:
                ans = _run_once(query, strategy, timeout)
            except SolverTimeout:
                rec.status = "timeout"
                break
            except CapExceeded:
                rec.status = "too_large"
                break
            elapsed = time.perf_counter() - t0
            if i >= warmups:
                rec.samples.append(elapsed)
                verdicts.append((ans.ac1, ans.ac2, ans.ac3, ans.distance))
                rec.encoding_size = ans.stats.get("encoding_size", 0)
        if verdicts:
            rec.ac1, rec.ac2, rec.ac3, rec.distance = verdicts[0]
            rec.consistent = all(v == verdicts[0] for v in verdicts)
            rec.runs = len(verdicts)
            rec.wall_us = int(statistics.median(rec.samples) * 1e6)
        records.append(rec)
    for group in AGREEMENT_GROUPS:
        members = [r for r in records if Strategy(r.strategy) in group and r.status == "ok"]
        if Strategy.ILP in group:
            key = lambda r: (r.ac2, r.ac3, r.distance)
        else:
            key = lambda r: (r.ac1, r.ac2, r.ac3)
        if len({key(r) for r in members}) > 1:
            for r in members:
                r.agree = False
    return records


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return int(v)
    return v


def records_to_csv(records: Sequence[BenchRecord], timings: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        row = asdict(r)
        if not timings:
            row["wall_us"] = None
        w.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def _worker(args):
    model_json, qid, ctx, effect, cause, strategies, reps, warmups, timeout = args
    model = parse_model(model_json)
    strategy = Strategy(strategies[0]) if cause is None else Strategy.MAXSAT
    q = CausalQuery(model, ctx, parse_expr(effect), cause, strategy)
    return bench_query(qid, q, strategies, reps, warmups, timeout)


def run_bench(queries: Sequence[CausalQuery], strategies, reps: int = 30, warmups: int = 30,
              timeout: Optional[float] = 120.0, jobs: int = 1) -> List[BenchRecord]:
    """Median wall time per (query, strategy); queries run sequentially unless ``jobs > 1``."""
    strategies = [Strategy(s).value for s in strategies]
    if jobs <= 1:
        out = []
        for qid, q in enumerate(queries):
            out.extend(bench_query(qid, q, strategies, reps, warmups, timeout))
        return out
    from concurrent.futures import ProcessPoolExecutor
    from .expr import format_expr

    tasks = [(q.model.to_json(), qid, q.context, format_expr(q.effect), q.cause, strategies, reps, warmups, timeout)
             for qid, q in enumerate(queries)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [r for batch in pool.map(_worker, tasks) for r in batch]


__all__ = [
    "SplitMix64", "GeneratorSpec", "gen_binary_tree", "gen_abt", "generate", "random_model", "root_variable",
    "sample_queries", "BenchRecord", "bench_query", "run_bench", "records_to_csv", "CSV_COLUMNS",
]
