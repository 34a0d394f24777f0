"""Weighted partial MaxSAT by linear UNSAT-to-SAT search.

Every soft clause ``C`` of weight ``w`` gets ``w`` fresh relaxation literals
``r_1 .. r_w`` (all equivalent) and becomes ``C | r_j``.  A sequential counter
over all relaxation literals lets one incremental SAT solver answer "at most
k relaxations?" by assuming a single counter output false.  k runs upward from 0; the first satisfiable k is the
optimum, certified by the unsatisfiable call at k - 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cnf import CnfFormula, check_model, parse_wcnf
from .pb import seq_counter
from .sat import Solver

OPT = "OPT"
UNSAT_HARD = "UNSAT_HARD"


@dataclass
class WeightedCnf:
    hard: CnfFormula
    soft: list  # [(clause tuple, weight)]

    def __post_init__(self):
        self.soft = [(tuple(c), int(w)) for c, w in self.soft]
        for c, w in self.soft:
            if w <= 0:
                raise ValueError(f"soft clause {c} has non-positive weight {w}")
            if not c:
                raise ValueError("empty soft clause")
            if max(abs(l) for l in c) > self.hard.num_vars:
                raise ValueError(f"soft clause {c} mentions a variable beyond num_vars")

    @classmethod
    def from_units(cls, hard: CnfFormula, units) -> "WeightedCnf":
        """Build from :class:`~hpcause.encoder.SoftUnit` objects."""
        return cls(hard, [((hard.lit(u.variable, u.polarity),), u.weight) for u in units])

    @classmethod
    def parse(cls, text: str) -> "WeightedCnf":
        hard, soft = parse_wcnf(text)
        return cls(hard, soft)


@dataclass
class MaxSatResult:
    status: str
    cost: Optional[int] = None
    model: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPT


def soft_cost(soft: Sequence, model) -> int:
    return sum(w for c, w in soft if not any(model[abs(l)] == (l > 0) for l in c))


def solve_maxsat(wcnf: WeightedCnf, deadline: Optional[float] = None) -> MaxSatResult:
    hard = wcnf.hard
    solver = Solver(hard.num_vars, hard.clauses, deadline=deadline)
    calls = 1
    if not solver.solve():
        return MaxSatResult(UNSAT_HARD, stats={"sat_calls": calls})
    model = solver.model()
    upper = soft_cost(wcnf.soft, model)
    if upper == 0:
        return MaxSatResult(OPT, 0, model, {"sat_calls": calls, "relaxations": 0})

    relax = []
    for c, w in wcnf.soft:
        rs = [solver.new_var() for _ in range(w)]
        for r in rs:
            solver.add_clause(c + (r,))
        for r in rs[1:]:
            # copies move together, so k counts weight rather than copies
            solver.add_clause((-rs[0], r))
            solver.add_clause((rs[0], -r))
        relax.extend(rs)
    extra = []
    outs = seq_counter(relax, upper, solver.new_var, extra)
    for c in extra:
        solver.add_clause(c)

    best, best_cost = model, upper
    for k in range(upper):
        calls += 1
        if solver.solve([-outs[k]]):
            best = solver.model()
            best_cost = soft_cost(wcnf.soft, best)
            break
    best = {v: best[v] for v in range(1, hard.num_vars + 1)}
    assert check_model(hard.clauses, best)
    return MaxSatResult(OPT, best_cost, best, {"sat_calls": calls, "relaxations": len(relax)})


def brute_force_maxsat(wcnf: WeightedCnf) -> Optional[int]:
    """Exhaustive minimum cost (None when the hard part is unsatisfiable)."""
    n = wcnf.hard.num_vars
    best = None
    for bits in range(1 << n):
        m = {v: bool(bits >> (v - 1) & 1) for v in range(1, n + 1)}
        if check_model(wcnf.hard.clauses, m):
            c = soft_cost(wcnf.soft, m)
            if best is None or c < best:
                best = c
    return best


__all__ = ["WeightedCnf", "MaxSatResult", "solve_maxsat", "brute_force_maxsat", "soft_cost", "OPT", "UNSAT_HARD"]
