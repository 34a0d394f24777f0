"""Checking and inference of actual causes under the modified Halpern-Pearl definition.

Strategies for checking a candidate cause:

* ``sat``     AC2 via the F encoding, AC3 by enumerating models of G.
* ``satopt``  AC2 via F, AC3 via a single satisfiability call on G'.
* ``ilp``     minimum-distance 0-1 program; also extracts a minimal sub-cause.
* ``maxsat``  the same question as weighted partial MaxSAT.
* ``brute``   the exhaustive oracle.

``infer_why`` answers "why does the effect hold?" without a candidate.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .cnf import make_clause, tseitin
from .encoder import (
    build_f,
    build_g,
    build_g_max,
    build_g_prime,
    normalize_cause,
    prepare_query,
)
from .errors import EffectNotActual, EnumerationLimitExceeded, ModelTooLargeForExactDr, NotACause
from .expr import Expr, eval_expr, format_expr
from .ilp import LinearConstraint, build_check_program, build_why_program, solve_ilp
from .maxsat import WeightedCnf, solve_maxsat
from .model import CausalModel, evaluate, evaluate_with_intervention
from .oracle import (
    DEFAULT_CAP,
    Witness,
    oracle_ac2,
    oracle_ac3,
    oracle_min_cause_subset,
)
from .sat import Solver, solve


class Strategy(str, Enum):
    SAT_LEGACY = "sat"
    SAT_OPTIMIZED = "satopt"
    ILP = "ilp"
    MAXSAT = "maxsat"
    WHY_ILP = "why"
    BRUTE_FORCE = "brute"


CHECK_STRATEGIES = (Strategy.SAT_LEGACY, Strategy.SAT_OPTIMIZED, Strategy.ILP, Strategy.MAXSAT, Strategy.BRUTE_FORCE)


@dataclass
class CausalQuery:
    model: CausalModel
    context: dict
    effect: Expr
    cause: Optional[list] = None
    strategy: Strategy = Strategy.MAXSAT

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        if self.cause is not None:
            self.cause = normalize_cause(self.cause)
        if (self.cause is None) != (self.strategy is Strategy.WHY_ILP):
            raise ValueError("a cause is required for checking strategies and forbidden for why-queries")


@dataclass
class CausalAnswer:
    ac1: bool
    ac2: bool
    ac3: bool
    strategy: str
    x_min: Optional[list] = None       # [(name, actual value)]
    w: Optional[list] = None           # [(name, actual value)]
    distance: Optional[int] = None
    responsibility: Optional[Fraction] = None
    witness: Optional[Witness] = None
    all_optima: Optional[list] = None
    minimality_verified: Optional[bool] = None
    stats: dict = field(default_factory=dict)

    @property
    def is_cause(self) -> bool:
        return self.ac1 and self.ac2 and self.ac3

    @property
    def verdict(self) -> tuple:
        return self.ac1, self.ac2, self.ac3, self.distance

    def to_dict(self, timings: bool = False) -> dict:
        def pairs(ps):
            return None if ps is None else [{"var": n, "val": bool(v)} for n, v in ps]

        stats = {k: v for k, v in self.stats.items() if timings or k != "timings"}
        out = {
            "ac1": self.ac1,
            "ac2": self.ac2,
            "ac3": self.ac3,
            "cause": pairs(self.x_min),
            "w": pairs(self.w),
            "distance": self.distance,
            "responsibility": None if self.responsibility is None else
            {"num": self.responsibility.numerator, "den": self.responsibility.denominator},
            "strategy": self.strategy,
            "stats": stats,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.all_optima is not None:
            out["all_optima"] = [pairs(x) for x in self.all_optima]
        if self.minimality_verified is not None:
            out["minimality_verified"] = self.minimality_verified
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=2) + "\n"


class _Clock:
    def __init__(self):
        self.timings = {}

    def __call__(self, stage: str):
        clock = self

        class _Span:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                clock.timings[stage] = clock.timings.get(stage, 0.0) + time.perf_counter() - self.t0

        return _Span()


# --- individual conditions --------------------------------------------------

def check_ac1(model: CausalModel, context, effect: Expr, cause) -> bool:
    actual = evaluate(model, context)
    return all(actual[n] == x for n, x in normalize_cause(cause)) and eval_expr(effect, actual)


def _count(stats, cnf):
    if stats is not None:
        stats["encoding_size"] = stats.get("encoding_size", 0) + len(cnf.clauses)


def check_ac2(model: CausalModel, context, effect: Expr, cause, deadline=None, stats=None) -> Optional[Witness]:
    """Witness from a model of F, or None when F is unsatisfiable."""
    f = build_f(model, context, effect, cause)
    cnf = tseitin(f)
    _count(stats, cnf)
    res = solve(cnf, deadline)
    if not res.sat:
        return None
    values = {n: res.model[i] for n, i in cnf.registry.items()}
    pairs = normalize_cause(cause)
    names = {n for n, _ in pairs}
    w = tuple((v, f.actual[v]) for v in model.endogenous if v not in names and values[v] == f.actual[v])
    return Witness(tuple((n, not x) for n, x in pairs), w)


def _follows(model: CausalModel, values, v: str) -> bool:
    return eval_expr(model.equations[v], values) == values[v]


def check_ac3_allsat(model: CausalModel, context, effect: Expr, cause, limit: Optional[int] = 100000,
                     deadline=None, stats=None) -> bool:
    """AC3 by enumerating the models of G projected onto the model variables."""
    pairs = normalize_cause(cause)
    g = build_g(model, context, effect, cause)
    if len(pairs) == 1:
        return True
    cnf = tseitin(g)
    _count(stats, cnf)
    proj = [cnf.registry[v] for v in model.variables]
    s = Solver(cnf.num_vars, cnf.clauses, deadline=deadline)
    seen = 0
    while s.solve():
        m = s.model()
        values = {v: m[cnf.registry[v]] for v in model.variables}
        kept = [values[n] == x or _follows(model, values, n) for n, x in pairs]
        if any(kept) and any(values[n] != x for n, x in pairs):
            return False
        seen += 1
        if limit is not None and seen > limit:
            raise EnumerationLimitExceeded(f"more than {limit} models of G")
        if not s.add_clause([-i if m[i] else i for i in proj]):
            break
    return True


def check_ac3_optimized(model: CausalModel, context, effect: Expr, cause, deadline=None, stats=None) -> bool:
    """AC3 holds iff G' is unsatisfiable."""
    cnf = tseitin(build_g_prime(model, context, effect, cause))
    _count(stats, cnf)
    return not solve(cnf, deadline).sat


def validate_witness(model: CausalModel, context, effect: Expr, cause, witness: Witness) -> bool:
    actual = evaluate(model, context)
    xp = dict(witness.x_prime)
    if set(xp) != {n for n, _ in normalize_cause(cause)}:
        return False
    for n, v in witness.w:
        if n in xp or not model.is_endogenous(n) or actual[n] != v:
            return False
    iv = dict(witness.w)
    iv.update(xp)
    return not eval_expr(effect, evaluate_with_intervention(model, context, iv))


# --- optimisation-based checking --------------------------------------------

def _interpret(model, actual, pairs, values, kept):
    """xMin = intervened cause variables; W = endogenous variables at actual value, minus xMin."""
    x_min = [(n, x) for (n, x), k in zip(pairs, kept) if not k]
    drop = {n for n, _ in x_min}
    w = [(v, actual[v]) for v in model.endogenous if v not in drop and values[v] == actual[v]]
    return x_min, w


def _keep_values(keeps, lookup) -> list:
    return [lookup(n) == pol for n, pol in keeps]


def _solve_ilp_check(model, context, effect, cause, blocked, deadline, value_distance):
    program = build_check_program(model, context, effect, cause, value_distance)
    keeps = program.meta["keeps"]
    for sub in blocked:
        clause = [(n, pol) for (n, pol), (c, _) in zip(keeps, program.meta["pairs"]) if c in sub]
        terms = [(1 if pol else -1, n) for n, pol in clause]
        program.constraints.append(LinearConstraint(terms, ">=", 1 - sum(1 for _, p in clause if not p)))
    res = solve_ilp(program, deadline)
    res.stats["encoding_size"] = len(program.constraints)
    if not res.optimal:
        return None, res.stats
    kept = _keep_values(keeps, lambda n: bool(res.assignment[n]))
    return (res.objective_values[0], kept, res.assignment, program.meta), res.stats


def _solve_maxsat_check(model, context, effect, cause, blocked, deadline, value_distance):
    hard, soft = build_g_max(model, context, effect, cause, value_distance)
    cnf = tseitin(hard)
    keeps = [(u.variable, u.polarity) for u in soft]
    pairs = normalize_cause(cause)
    for sub in blocked:
        lits = [cnf.lit(n, pol) for (n, pol), (c, _) in zip(keeps, pairs) if c in sub]
        cnf.clauses.append(make_clause(lits))
    res = solve_maxsat(WeightedCnf.from_units(cnf, soft), deadline)
    res.stats["encoding_size"] = len(cnf.clauses) + len(soft)
    if not res.optimal:
        return None, res.stats
    kept = _keep_values(keeps, lambda n: res.model[cnf.registry[n]])
    values = {n: res.model[i] for n, i in cnf.registry.items()}
    return (res.cost, kept, values, {"actual": hard.actual}), res.stats


def _optimizing_check(model, context, effect, pairs, strategy, all_optima, deadline, clock, value_distance):
    solver = _solve_ilp_check if strategy is Strategy.ILP else _solve_maxsat_check
    with clock("solve"):
        found, stats = solver(model, context, effect, pairs, [], deadline, value_distance)
    if found is None:
        return dict(ac2=False, ac3=False), stats
    best, kept, values, meta = found
    actual = meta["actual"]
    x_min, w = _interpret(model, actual, pairs, values, kept)
    out = dict(ac2=True, ac3=best == len(pairs), distance=best, x_min=x_min, w=w)
    if all_optima:
        optima, blocked = [x_min], [{n for n, _ in x_min}]
        with clock("enumerate"):
            while True:
                found, _ = solver(model, context, effect, pairs, blocked, deadline, value_distance)
                if found is None or found[0] != best:
                    break
                more, _ = _interpret(model, actual, pairs, found[2], found[1])
                optima.append(more)
                blocked.append({n for n, _ in more})
        out["all_optima"] = optima
    return out, stats


def check_cause(model: CausalModel, context, effect: Expr, cause, strategy=Strategy.MAXSAT,
                all_optima: bool = False, deadline: Optional[float] = None,
                value_distance: bool = False, enumeration_limit: Optional[int] = 100000) -> CausalAnswer:
    """Verdicts for AC1-AC3 of a candidate cause under one strategy."""
    strategy = Strategy(strategy)
    if strategy is Strategy.WHY_ILP:
        raise ValueError("use infer_why for why-queries")
    clock = _Clock()
    _, pairs = prepare_query(model, context, effect, cause)
    with clock("ac1"):
        ac1 = check_ac1(model, context, effect, pairs)
    fields, stats = {}, {}
    if strategy in (Strategy.ILP, Strategy.MAXSAT):
        fields, stats = _optimizing_check(model, context, effect, pairs, strategy, all_optima, deadline, clock,
                                          value_distance)
    elif strategy is Strategy.BRUTE_FORCE:
        with clock("oracle"):
            wit = oracle_ac2(model, context, effect, pairs)
            ac3 = oracle_ac3(model, context, effect, pairs)
            sub = oracle_min_cause_subset(model, context, effect, pairs)
        fields = dict(ac2=wit is not None, ac3=ac3, witness=wit)
        if sub is not None:
            fields.update(x_min=sub[0], distance=sub[1], w=list(sub[2].w))
    else:
        with clock("ac2"):
            wit = check_ac2(model, context, effect, pairs, deadline, stats)
        with clock("ac3"):
            if strategy is Strategy.SAT_OPTIMIZED:
                ac3 = check_ac3_optimized(model, context, effect, pairs, deadline, stats)
            else:
                ac3 = check_ac3_allsat(model, context, effect, pairs, enumeration_limit, deadline, stats)
        fields = dict(ac2=wit is not None, ac3=ac3, witness=wit)
    stats = {k: v for k, v in stats.items() if isinstance(v, int)}
    stats["timings"] = clock.timings
    return CausalAnswer(ac1=ac1, strategy=strategy.value, stats=stats, **fields)


# --- inference ------------------------------------------------------------------

def why_preferences(program) -> list:
    """Tie-break wishes: alphabetically smallest cause variables, then contingency variables."""
    names = sorted(program.meta["indicators"])
    ind = program.meta["indicators"]
    return [(ind[v][2], 1) for v in names] + [(ind[v][0], 0) for v in names]


def infer_why(model: CausalModel, context, effect: Expr, deadline: Optional[float] = None,
              verify_cap: int = DEFAULT_CAP) -> CausalAnswer:
    """A cause of ``effect`` with maximum degree of responsibility, found without a candidate."""
    clock = _Clock()
    actual = evaluate(model, context)
    if not eval_expr(effect, actual):
        raise EffectNotActual(f"effect {format_expr(effect)} does not hold under the given context")
    with clock("build"):
        program = build_why_program(model, context, effect)
    with clock("solve"):
        res = solve_ilp(program, deadline, prefer=why_preferences(program))
    stats = {k: v for k, v in res.stats.items() if isinstance(v, int)}
    stats["timings"] = clock.timings
    if not res.optimal:
        return CausalAnswer(True, False, False, Strategy.WHY_ILP.value, stats=stats)
    a = res.assignment
    ind = program.meta["indicators"]
    x_min = [(v, actual[v]) for v in model.endogenous if v in ind and not a[ind[v][0]] and not a[ind[v][1]]]
    w = [(v, actual[v]) for v in model.endogenous if v in ind and not a[ind[v][0]] and a[ind[v][1]]]
    stats["obj1"], stats["obj2"] = res.objective_values
    witness = Witness(tuple((n, not x) for n, x in x_min), tuple(w))
    with clock("validate"):
        if not validate_witness(model, context, effect, x_min, witness):
            raise AssertionError("inferred cause failed witness validation")
        ac3 = check_ac3_optimized(model, context, effect, x_min, deadline)
        verified = None
        if len(model.endogenous) <= verify_cap:
            verified = oracle_ac3(model, context, effect, x_min, cap=verify_cap)
    return CausalAnswer(True, True, ac3, Strategy.WHY_ILP.value, x_min=x_min, w=w, distance=len(x_min),
                        responsibility=Fraction(1, len(x_min) + len(w)), minimality_verified=verified,
                        stats=stats)


def compute_responsibility(model: CausalModel, context, effect: Expr, cause,
                           cap: int = DEFAULT_CAP) -> Fraction:
    """Exact ``1 / (|X| + |W_min|)`` for an actual cause; W_min by exhaustive search."""
    if len(model.endogenous) > cap:
        raise ModelTooLargeForExactDr(f"{len(model.endogenous)} endogenous variables exceed the cap of {cap}")
    pairs = normalize_cause(cause)
    if not check_cause(model, context, effect, pairs, Strategy.MAXSAT).is_cause:
        raise NotACause(f"{pairs} is not an actual cause of {format_expr(effect)}")
    wit = oracle_ac2(model, context, effect, pairs, cap=cap)
    return Fraction(1, len(pairs) + len(wit.w))


def run_query(query: CausalQuery, **kw) -> CausalAnswer:
    if query.strategy is Strategy.WHY_ILP:
        return infer_why(query.model, query.context, query.effect, **kw)
    return check_cause(query.model, query.context, query.effect, query.cause, query.strategy, **kw)


__all__ = [
    "Strategy", "CausalQuery", "CausalAnswer", "Witness", "check_ac1", "check_ac2", "check_ac3_allsat",
    "check_ac3_optimized", "check_cause", "infer_why", "compute_responsibility", "validate_witness",
    "run_query", "CHECK_STRATEGIES",
]
