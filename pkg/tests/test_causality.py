import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import ROCK_CONTEXT, small_models, small_queries
from hpcause.causality import (
    CHECK_STRATEGIES,
    CausalQuery,
    Strategy,
    check_ac1,
    check_ac2,
    check_ac3_allsat,
    check_ac3_optimized,
    check_cause,
    compute_responsibility,
    infer_why,
    run_query,
    validate_witness,
)
from hpcause.errors import (
    AC1Violation,
    EffectNotActual,
    EnumerationLimitExceeded,
    ModelTooLargeForExactDr,
    NotACause,
)
from hpcause.expr import parse_expr
from hpcause.model import evaluate, parse_model
from hpcause.oracle import (
    Witness,
    oracle_ac2,
    oracle_ac3,
    oracle_max_dr_cause,
    oracle_min_cause_subset,
)

BS = parse_expr("BS")
ST = {"ST": True}
ST_BT = {"ST": True, "BT": True}


def model_of(*eqs):
    endo = ", ".join(f'{{"id": "{i}", "eq": "{e}"}}' for i, e in eqs)
    return parse_model(f'{{"exogenous": ["U"], "endogenous": [{endo}]}}')


U1 = {"U": True}


@pytest.mark.parametrize("cause,effect,expected", [
    (ST, "BS", True),
    ({"ST": False}, "BS", False),
    (ST, "!BS", False),
])
def test_ac1(rock, cause, effect, expected):
    assert check_ac1(rock, ROCK_CONTEXT, parse_expr(effect), cause) is expected


def test_ac2_rock_witness(rock):
    wit = check_ac2(rock, ROCK_CONTEXT, BS, ST)
    assert wit.x_prime == (("ST", False),)
    assert ("BH", False) in wit.w and ("BT", True) in wit.w
    assert validate_witness(rock, ROCK_CONTEXT, BS, ST, wit)


def test_ac2_without_dependence():
    m = model_of(("A", "U"), ("B", "U"))
    assert check_ac2(m, U1, parse_expr("A"), {"B": True}) is None


def test_ac2_direct_dependence():
    m = model_of(("A", "U"), ("E", "A"))
    assert check_ac2(m, U1, parse_expr("E"), {"A": True}) == Witness((("A", False),), ())


def test_ac3_rock(rock):
    for check in (check_ac3_allsat, check_ac3_optimized):
        assert not check(rock, ROCK_CONTEXT, BS, ST_BT)
        assert check(rock, ROCK_CONTEXT, BS, ST)


def test_ac3_common_cause_disjunction():
    m = model_of(("A", "U"), ("B", "U"), ("E", "A | B"))
    args = (m, U1, parse_expr("E"), {"A": True, "B": True})
    assert check_ac3_allsat(*args) == check_ac3_optimized(*args) == oracle_ac3(*args) is True
    assert check_cause(*args).is_cause


def test_enumeration_limit():
    # C hangs off A and may either follow it or stay put, so G has two models
    m = model_of(("A", "U"), ("B", "U"), ("C", "A"), ("E", "A | B"))
    args = (m, U1, parse_expr("E"), {"A": True, "B": True})
    assert check_ac3_allsat(*args, limit=2)
    with pytest.raises(EnumerationLimitExceeded):
        check_ac3_allsat(*args, limit=1)


@pytest.mark.parametrize("witness,ok", [
    (Witness((("ST", False),), (("BH", False),)), True),
    (Witness((("ST", False),), ()), False),
    (Witness((("ST", False),), (("BH", True),)), False),
    (Witness((("BT", False),), (("BH", False),)), False),
])
def test_validate_witness(rock, witness, ok):
    assert validate_witness(rock, ROCK_CONTEXT, BS, ST, witness) is ok


@pytest.mark.parametrize("strategy", CHECK_STRATEGIES)
def test_rock_both_throwers_every_strategy(rock, strategy):
    ans = check_cause(rock, ROCK_CONTEXT, BS, ST_BT, strategy)
    assert (ans.ac1, ans.ac2, ans.ac3) == (True, True, False)
    if strategy in (Strategy.ILP, Strategy.MAXSAT, Strategy.BRUTE_FORCE):
        assert ans.distance == 1 and ans.x_min == [("ST", True)]


@pytest.mark.parametrize("strategy", CHECK_STRATEGIES)
def test_rock_single_thrower_every_strategy(rock, strategy):
    ans = check_cause(rock, ROCK_CONTEXT, BS, ST, strategy)
    assert ans.is_cause
    if strategy in (Strategy.ILP, Strategy.MAXSAT):
        assert ans.distance == 1 and ans.x_min == [("ST", True)]
        assert ("BH", False) in ans.w
    if ans.witness is not None:
        assert validate_witness(rock, ROCK_CONTEXT, BS, ST, ans.witness)


@pytest.mark.parametrize("strategy", [Strategy.ILP, Strategy.MAXSAT])
def test_infeasible_check(strategy):
    m = model_of(("A", "U"), ("B", "U"))
    ans = check_cause(m, U1, parse_expr("A"), {"B": True}, strategy)
    assert (ans.ac1, ans.ac2, ans.ac3) == (True, False, False)
    assert ans.x_min is None and ans.w is None and ans.distance is None


@pytest.mark.parametrize("strategy", CHECK_STRATEGIES)
def test_false_effect_still_reports_other_conditions(rock, strategy):
    ans = check_cause(rock, ROCK_CONTEXT, parse_expr("!BS"), ST, strategy)
    assert ans.ac1 is False and not ans.is_cause
    assert ans.ac2 is True   # the negated effect already holds in the actual world


def test_cause_values_must_be_actual(rock):
    with pytest.raises(AC1Violation):
        check_cause(rock, ROCK_CONTEXT, BS, {"ST": False})


@pytest.mark.parametrize("strategy", [Strategy.ILP, Strategy.MAXSAT])
def test_all_optima(strategy):
    m = model_of(("A", "U"), ("B", "U"), ("E", "A & B"))
    ans = check_cause(m, U1, parse_expr("E"), {"A": True, "B": True}, strategy, all_optima=True)
    assert ans.distance == 1 and not ans.ac3
    assert ans.all_optima == [[("A", True)], [("B", True)]]


def test_keep_literal_distance_versus_value_distance():
    # X2 just copies X1, so {X1} alone is the minimal cause even though both values flip
    m = model_of(("X1", "U"), ("X2", "X1"), ("E", "X1 | X2"))
    args = (m, U1, parse_expr("E"), {"X1": True, "X2": True})
    assert oracle_min_cause_subset(*args)[1] == 1
    for s in (Strategy.ILP, Strategy.MAXSAT):
        ans = check_cause(*args, strategy=s)
        assert ans.distance == 1 and ans.x_min == [("X1", True)] and not ans.ac3
        literal = check_cause(*args, strategy=s, value_distance=True)
        assert literal.distance == 2 and literal.ac3


def test_infer_rock(rock):
    ans = infer_why(rock, ROCK_CONTEXT, BS)
    assert ans.x_min == [("SH", True)] and ans.w == [("BH", False)]
    assert ans.responsibility == Fraction(1, 2)
    assert (ans.stats["obj1"], ans.stats["obj2"]) == (2, 1)
    assert ans.is_cause and ans.minimality_verified


def test_infer_chain():
    m = model_of(("A", "U"), ("B", "A"))
    ans = infer_why(m, U1, parse_expr("B"))
    assert ans.x_min == [("A", True)] and ans.w == [] and ans.responsibility == 1


def test_infer_needs_true_effect(rock):
    with pytest.raises(EffectNotActual):
        infer_why(rock, ROCK_CONTEXT, parse_expr("!BS"))


def test_infer_without_any_cause():
    m = model_of(("A", "U"), ("B", "U"))
    ans = infer_why(m, U1, parse_expr("A"))
    assert not ans.ac2 and ans.x_min is None


def test_responsibility(rock):
    assert compute_responsibility(rock, ROCK_CONTEXT, BS, ST) == Fraction(1, 2)
    chain = model_of(("A", "U"), ("B", "A"))
    assert compute_responsibility(chain, U1, parse_expr("B"), {"A": True}) == 1
    fork = model_of(("A", "U"), ("B", "U"))
    with pytest.raises(NotACause):
        compute_responsibility(fork, U1, parse_expr("A"), {"B": True})
    with pytest.raises(ModelTooLargeForExactDr):
        compute_responsibility(rock, ROCK_CONTEXT, BS, ST, cap=3)


def test_query_object(rock):
    with pytest.raises(ValueError):
        CausalQuery(rock, ROCK_CONTEXT, BS, None, "maxsat")
    with pytest.raises(ValueError):
        CausalQuery(rock, ROCK_CONTEXT, BS, ST, "why")
    q = CausalQuery(rock, ROCK_CONTEXT, BS, ST, "ilp")
    assert q.cause == [("ST", True)] and run_query(q).is_cause
    assert run_query(CausalQuery(rock, ROCK_CONTEXT, BS, None, "why")).x_min == [("SH", True)]
    with pytest.raises(ValueError):
        check_cause(rock, ROCK_CONTEXT, BS, ST, "why")


def test_json_answer(rock):
    ans = check_cause(rock, ROCK_CONTEXT, BS, ST_BT, Strategy.ILP)
    doc = json.loads(ans.to_json())
    assert doc["cause"] == [{"var": "ST", "val": True}] and doc["distance"] == 1
    assert "timings" not in doc["stats"] and "timings" in json.loads(ans.to_json(timings=True))["stats"]
    again = check_cause(rock, ROCK_CONTEXT, BS, ST_BT, Strategy.ILP)
    assert again.to_json() == ans.to_json()
    why = json.loads(infer_why(rock, ROCK_CONTEXT, BS).to_json())
    assert why["responsibility"] == {"num": 1, "den": 2}


# --- agreement with the exhaustive semantics -------------------------------------

@given(small_queries())
def test_ac2_matches_oracle(q):
    model, ctx, effect, cause = q
    wit = check_ac2(model, ctx, effect, cause)
    assert (wit is not None) == (oracle_ac2(model, ctx, effect, cause) is not None)
    if wit is not None:
        assert validate_witness(model, ctx, effect, cause, wit)


@given(small_queries())
def test_ac3_encodings_match_oracle(q):
    want = oracle_ac3(*q)
    assert check_ac3_optimized(*q) == want
    assert check_ac3_allsat(*q) == want


@given(small_queries())
def test_optimising_checks_match_oracle(q):
    model, ctx, effect, cause = q
    best = oracle_min_cause_subset(model, ctx, effect, cause)
    for strategy in (Strategy.ILP, Strategy.MAXSAT):
        ans = check_cause(model, ctx, effect, cause, strategy)
        assert ans.ac2 == (best is not None)
        if best is None:
            continue
        assert ans.distance == best[1] == len(ans.x_min)
        assert ans.ac3 == oracle_ac3(model, ctx, effect, cause)
        assert oracle_ac2(model, ctx, effect, ans.x_min) is not None


@settings(max_examples=60)
@given(small_queries())
def test_strategies_agree(q):
    v = {s: check_cause(*q, strategy=s) for s in CHECK_STRATEGIES}
    assert v[Strategy.ILP].verdict == v[Strategy.MAXSAT].verdict
    assert len({(a.ac1, a.ac2, a.ac3) for s, a in v.items() if s not in (Strategy.ILP, Strategy.MAXSAT)}) == 1
    assert len({(a.ac1, a.is_cause) for a in v.values()}) == 1
    # the optimising strategies accept AC2 when any non-empty part of the cause works
    sat, ilp = v[Strategy.SAT_OPTIMIZED], v[Strategy.ILP]
    assert ilp.ac2 == (oracle_min_cause_subset(*q) is not None)
    assert sat.ac2 <= ilp.ac2
    if ilp.ac2:
        assert ilp.ac3 == sat.ac3
    else:
        assert not ilp.ac3


@settings(max_examples=60)
@given(small_models())
def test_infer_matches_oracle(drawn):
    model, ctx = drawn
    actual = evaluate(model, ctx)
    e = model.endogenous[-1]
    effect = parse_expr(e if actual[e] else f"!{e}")
    best = oracle_max_dr_cause(model, ctx, effect)
    ans = infer_why(model, ctx, effect)
    assert ans.ac2 == (best is not None)
    if best is not None:
        x, w, dr = best
        assert (ans.x_min, ans.w, ans.responsibility) == (x, w, dr)
        assert ans.ac3 == oracle_ac3(model, ctx, effect, ans.x_min) == ans.minimality_verified
