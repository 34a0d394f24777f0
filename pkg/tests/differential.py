"""Feed exported encodings to third-party solvers and compare with our answers.

Uses python-sat (DIMACS status, RC2 for WCNF cost) and highspy (CPLEX LP
optimum).  Each helper returns a list of human-readable mismatch strings;
an empty list means full agreement.
"""
import importlib.util
import os
import tempfile

from reference import random_queries
from hpcause.bench import GeneratorSpec, generate, random_model, sample_queries
from hpcause.causality import Strategy, check_cause, infer_why
from hpcause.cnf import tseitin, write_dimacs, write_wcnf
from hpcause.encoder import build_f, build_g_max, build_g_prime
from hpcause.errors import NoCandidateVariables
from hpcause.expr import format_expr, parse_expr
from hpcause.ilp import build_check_program, build_why_program, write_lp
from hpcause.model import load_model

ROCK = os.path.join(os.path.dirname(__file__), "..", "src", "hpcause", "data", "rock_throwing.json")


def available() -> bool:
    return all(importlib.util.find_spec(m) is not None for m in ("highspy", "pysat"))


def sample(n_checks: int = 40, n_why: int = 10):
    """Deterministic mix of checking queries and why-queries: (model, ctx, effect, cause-or-None)."""
    rock = load_model(ROCK)
    ctx = {"ST_exo": True, "BT_exo": True}
    bs = parse_expr("BS")
    checks = [(rock, ctx, bs, [("ST", True)]), (rock, ctx, bs, [("ST", True), ("BT", True)])]
    tree = generate(GeneratorSpec("bt", 4, "random", 0, 3))
    checks += [(tree, q.context, q.effect, q.cause) for q in sample_queries(tree, [1, 2, 3], 4, seed=1)]
    seed = 0
    while len(checks) < n_checks:
        m = random_model(seed, 4 + seed % 5, 1 + seed % 3)
        checks += [(m, c, e, x) for c, e, x in random_queries(m, seed, 1)]
        seed += 1
    whys = [(rock, ctx, bs, None)]
    seed = 0
    while len(whys) < n_why:
        m = random_model(1000 + seed, 4 + seed % 4, 2)
        c, e, _ = random_queries(m, seed, 1)[0]
        whys.append((m, c, e, None))
        seed += 1
    return checks[:n_checks] + whys


def _pysat_sat(text: str) -> bool:
    from pysat.formula import CNF
    from pysat.solvers import Solver

    cnf = CNF(from_string=text)
    with Solver(name="cadical153", bootstrap_with=cnf.clauses) as s:
        return s.solve()


def _rc2_cost(text: str):
    from pysat.examples.rc2 import RC2
    from pysat.formula import WCNF

    w = WCNF(from_string=text)
    with RC2(w) as rc2:
        return None if rc2.compute() is None else rc2.cost


def _highs(text: str, folder: str, name: str):
    """(status, objective) for an LP file; objective is None unless optimal."""
    import highspy

    path = os.path.join(folder, name)
    with open(path, "w") as fh:
        fh.write(text)
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(path) != highspy.HighsStatus.kOk:
        return "unreadable", None
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kOptimal:
        return "optimal", round(h.getInfo().objective_function_value)
    if status == highspy.HighsModelStatus.kInfeasible:
        return "infeasible", None
    return h.modelStatusToString(status), None


def compare_check(model, ctx, effect, cause, folder):
    tag = f"{model.name}: {format_expr(effect)} <- {cause}"
    bad = []
    sat_ans = check_cause(model, ctx, effect, cause, Strategy.SAT_OPTIMIZED)
    if _pysat_sat(write_dimacs(tseitin(build_f(model, ctx, effect, cause)))) != sat_ans.ac2:
        bad.append(f"{tag}: F status differs")
    if _pysat_sat(write_dimacs(tseitin(build_g_prime(model, ctx, effect, cause)))) == sat_ans.ac3:
        bad.append(f"{tag}: G' status differs")
    maxsat = check_cause(model, ctx, effect, cause, Strategy.MAXSAT)
    hard, soft = build_g_max(model, ctx, effect, cause)
    if _rc2_cost(write_wcnf(tseitin(hard), soft)) != maxsat.distance:
        bad.append(f"{tag}: WCNF cost differs")
    ilp = check_cause(model, ctx, effect, cause, Strategy.ILP)
    status, obj = _highs(write_lp(build_check_program(model, ctx, effect, cause)), folder, "check.lp")
    if status == "unreadable" or obj != ilp.distance:
        bad.append(f"{tag}: LP {status} {obj} vs distance {ilp.distance}")
    return bad


def compare_why(model, ctx, effect, folder):
    tag = f"{model.name}: why {format_expr(effect)}"
    try:
        program = build_why_program(model, ctx, effect)
    except NoCandidateVariables:
        return []
    ans = infer_why(model, ctx, effect)
    want = [ans.stats["obj1"], ans.stats["obj2"]] if ans.ac2 else None
    status, first = _highs(write_lp(program, 1), folder, "why1.lp")
    if status == "unreadable":
        return [f"{tag}: stage 1 unreadable"]
    if first is None:
        return [] if want is None else [f"{tag}: stage 1 {status}, expected {want}"]
    status, second = _highs(write_lp(program, 2, [first]), folder, "why2.lp")
    if [first, second] != want:
        return [f"{tag}: LP optima {[first, second]} vs {want}"]
    return []


def run_differential(queries):
    bad = []
    with tempfile.TemporaryDirectory() as folder:
        for model, ctx, effect, cause in queries:
            if cause is None:
                bad += compare_why(model, ctx, effect, folder)
            else:
                bad += compare_check(model, ctx, effect, cause, folder)
    return bad
