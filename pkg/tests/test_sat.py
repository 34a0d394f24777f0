import time
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reference import assignment_matrix, clause_columns, cnf_truth, random_cnf
from hpcause.bench import SplitMix64
from hpcause.cnf import CnfFormula, check_model
from hpcause.errors import SolverTimeout
from hpcause.sat import Solver, enumerate_models, solve


def pigeonhole(pigeons, holes):
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    clauses = [tuple(var(p, h) for h in range(holes)) for p in range(pigeons)]
    for h in range(holes):
        for p, q in combinations(range(pigeons), 2):
            clauses.append((-var(p, h), -var(q, h)))
    return CnfFormula(clauses, pigeons * holes)


@pytest.mark.parametrize("seed", range(4))
def test_random_3cnf_against_truth_table(seed):
    rng = SplitMix64(1000 + seed)
    for _ in range(60):
        n = 3 + rng.below(14)
        m = 1 + rng.below(int(5 * n))
        clauses = random_cnf(rng, n, m)
        res = solve(CnfFormula(clauses, n))
        assert res.sat == bool(cnf_truth(clauses, n).any())
        if res.sat:
            assert check_model(clauses, res.model)


@pytest.mark.parametrize("pigeons,holes,sat", [(4, 4, True), (5, 4, False), (6, 5, False)])
def test_pigeonhole(pigeons, holes, sat):
    assert solve(pigeonhole(pigeons, holes)).sat is sat


def test_trivial_cases():
    assert solve(CnfFormula([], 0)).sat
    assert not solve(CnfFormula([(1,), (-1,)], 1)).sat
    res = solve(CnfFormula([(1, 2), (-1,)], 3))
    assert res.model == {1: False, 2: True, 3: False}


def test_assumptions_and_incremental_clauses():
    s = Solver(3, [(1, 2, 3)])
    assert s.solve([-1, -2])
    assert s.model()[3]
    assert not s.solve([-1, -2, -3])
    assert s.solve()  # assumptions are not sticky
    s.add_clause((-3,))
    assert s.solve([-1])
    assert s.model()[2]
    s.add_clause((-2,))
    assert not s.solve([-1])
    assert s.solve() and s.model()[1]


def test_new_variables_between_calls():
    s = Solver(2, [(1, 2)])
    v = s.new_var()
    assert v == 3
    s.add_clause((-1, v))
    s.add_clause((-v,))
    assert s.solve() and s.model() == {1: False, 2: True, 3: False}


@given(st.integers(0, 2**32), st.integers(2, 9))
def test_enumeration_counts_models(seed, n):
    rng = SplitMix64(seed)
    clauses = random_cnf(rng, n, 1 + rng.below(3 * n))
    models = enumerate_models(CnfFormula(clauses, n), range(1, n + 1))
    assert len(models) == int(cnf_truth(clauses, n).sum())
    assert len({tuple(sorted(m.items())) for m in models}) == len(models)


def test_projected_enumeration():
    # x1 | x2 with a free x3: three projections onto {1, 2}
    cnf = CnfFormula([(1, 2)], 3)
    models = enumerate_models(cnf, [1, 2])
    assert sorted((m[1], m[2]) for m in models) == [(False, True), (True, False), (True, True)]
    assert len(enumerate_models(cnf, [1, 2], limit=2)) == 2
    with pytest.raises(ValueError):
        enumerate_models(cnf, [4])


def test_projection_counts_with_numpy():
    rng = SplitMix64(7)
    clauses = random_cnf(rng, 10, 25)
    pts = assignment_matrix(10)
    ok = np.ones(len(pts), dtype=bool)
    for c in clauses:
        ok &= clause_columns(pts, c)
    expected = {tuple(row[:4]) for row in pts[ok]}
    got = enumerate_models(CnfFormula(clauses, 10), [1, 2, 3, 4])
    assert len(got) == len(expected)


def test_deadline_raises():
    with pytest.raises(SolverTimeout):
        solve(pigeonhole(9, 8), deadline=time.monotonic() - 1)


def test_deterministic_models():
    rng = SplitMix64(3)
    clauses = random_cnf(rng, 18, 60)
    a = solve(CnfFormula(clauses, 18))
    b = solve(CnfFormula(clauses, 18))
    assert a.model == b.model and a.stats == b.stats
