"""Exhaustive reference answers used by the tests (vectorised with numpy)."""
from __future__ import annotations

import numpy as np

from hpcause.bench import SplitMix64
from hpcause.expr import literal
from hpcause.model import evaluate


def assignment_matrix(n: int) -> np.ndarray:
    """All 2^n boolean points as a (2^n, n) array; row r has bit v-1 of r in column v-1."""
    rows = np.arange(1 << n, dtype=np.int64)[:, None]
    return ((rows >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def clause_columns(points: np.ndarray, clause) -> np.ndarray:
    sat = np.zeros(points.shape[0], dtype=bool)
    for lit in clause:
        col = points[:, abs(lit) - 1]
        sat |= col if lit > 0 else ~col
    return sat


def cnf_truth(clauses, n: int) -> np.ndarray:
    """Boolean vector over all 2^n points: does the point satisfy every clause?"""
    pts = assignment_matrix(n)
    ok = np.ones(pts.shape[0], dtype=bool)
    for c in clauses:
        ok &= clause_columns(pts, c)
    return ok


def maxsat_optimum(hard, soft, n: int):
    pts = assignment_matrix(n)
    ok = np.ones(pts.shape[0], dtype=bool)
    for c in hard:
        ok &= clause_columns(pts, c)
    if not ok.any():
        return None
    cost = np.zeros(pts.shape[0], dtype=np.int64)
    for c, w in soft:
        cost += w * ~clause_columns(pts, c)
    return int(cost[ok].min())


def ilp_optimum(program):
    """Lexicographic optimum by enumerating all points (binary and small integer vars)."""
    names = [v.name for v in program.vars]
    spans = [v.upper - v.lower + 1 for v in program.vars]
    total = int(np.prod(spans))
    idx = np.arange(total, dtype=np.int64)
    cols = {}
    for v, span in zip(program.vars, spans):
        cols[v.name] = v.lower + idx % span
        idx = idx // span
    ok = np.ones(total, dtype=bool)
    for c in program.constraints:
        lhs = sum(coef * cols[n] for coef, n in c.terms)
        ok &= (lhs <= c.rhs) if c.op == "<=" else (lhs >= c.rhs) if c.op == ">=" else (lhs == c.rhs)
    if not ok.any():
        return None
    values = []
    for obj in program.objectives:
        val = sum(coef * cols[n] for coef, n in obj.terms)
        if isinstance(val, int):
            val = np.full(total, val)
        best = val[ok].min() if obj.sense == "min" else val[ok].max()
        values.append(int(best))
        ok &= val == best
    assert names
    return values


def random_cnf(rng: SplitMix64, n: int, m: int, width: int = 3):
    out = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), min(width, n))
        out.append(tuple(v if rng.coin() else -v for v in vs))
    return out


def random_queries(model, seed: int, count: int, max_cause: int = 3):
    """Checking queries whose effect holds and whose cause is at actual values."""
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        ctx = {u: rng.coin() for u in model.exogenous}
        actual = evaluate(model, ctx)
        endo = list(model.endogenous)
        e = endo[len(endo) // 2 + rng.below(len(endo) - len(endo) // 2)]
        effect = literal(e, actual[e])
        pool = [v for v in endo if v != e]
        k = 1 + rng.below(min(max_cause, len(pool)))
        cause = [(v, actual[v]) for v in sorted(rng.sample(pool, k), key=endo.index)]
        out.append((ctx, effect, cause))
    return out


def random_maxsat_instance(seed: int):
    """Weighted partial instance over at most 14 variables."""
    from hpcause.cnf import CnfFormula
    from hpcause.maxsat import WeightedCnf

    rng = SplitMix64(seed)
    n = 2 + rng.below(13)
    hard = random_cnf(rng, n, rng.below(2 * n), width=1 + rng.below(3))
    soft = [(c, 1 + rng.below(4)) for c in random_cnf(rng, n, 1 + rng.below(2 * n), width=1 + rng.below(3))]
    return WeightedCnf(CnfFormula(hard, n), soft)


def random_program(rng: SplitMix64, max_vars: int = 18):
    """Random bounded program: mostly binaries, a few small integers, one or two objectives."""
    from hpcause.ilp import MAX, MIN, IlpProgram, IlpVar, LinearConstraint, Objective

    n = 2 + rng.below(max_vars - 1)
    vars_, space = [], 1
    for i in range(n):
        upper = 1
        if rng.below(6) == 0 and space * 4 <= 1 << max_vars:
            upper = 2 + rng.below(2)
        lower = -1 if upper > 1 and rng.coin() else 0
        vars_.append(IlpVar(f"x{i}", lower, upper))
        space *= upper - lower + 1
        if space > 1 << max_vars:
            vars_.pop()
            break
    names = [v.name for v in vars_]
    # most right-hand sides are planted around a hidden point so that many programs are feasible
    point = {v.name: v.lower + rng.below(v.upper - v.lower + 1) for v in vars_}
    cons = []
    for _ in range(rng.below(2 * len(names) + 1)):
        k = 1 + rng.below(min(5, len(names)))
        terms = [(rng.below(7) - 3 or 1, v) for v in rng.sample(names, k)]
        op = ("<=", ">=", "=")[rng.below(3)]
        at = sum(c * point[v] for c, v in terms)
        if rng.below(10) == 0:
            at += rng.below(5) - 2
        rhs = at + rng.below(3) if op == "<=" else at - rng.below(3) if op == ">=" else at
        cons.append(LinearConstraint(terms, op, rhs))
    objs = []
    for _ in range(1 + rng.below(2)):
        k = 1 + rng.below(len(names))
        terms = [(rng.below(9) - 4 or 2, v) for v in rng.sample(names, k)]
        objs.append(Objective(MIN if rng.coin() else MAX, terms, f"obj{len(objs) + 1}"))
    return IlpProgram(vars_, cons, objs)
