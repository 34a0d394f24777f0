"""Small 0-1 / bounded-integer linear programs with lexicographic objectives.

Programs are solved by iterated SAT with objective bounds: every variable is
booleanised (binaries directly, bounded integers in order encoding), linear
constraints become decision-diagram clauses (plain clauses when the
constraint already is one), and each objective is driven down by probing
``objective <= t`` under a fresh activation literal on one incremental
solver.  Probes gallop upward from the trivial lower bound and finish with
bisection, so every reported optimum is certified by an UNSAT probe just
below it.  Lexicographic objectives are handled by solve, pin, solve.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cnf import CnfFormula, tseitin
from .encoder import build_g_keep, build_g_star, candidate_variables
from .expr import Expr
from .model import CausalModel
from .pb import encode_geq, encode_leq
from .sat import Solver

OPT = "OPT"
INFEASIBLE = "INFEASIBLE"
MIN, MAX = "min", "max"
OPS = ("<=", "=", ">=")
DISTANCE = "__d"


@dataclass(frozen=True)
class IlpVar:
    name: str
    lower: int = 0
    upper: int = 1

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"{self.name}: lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def binary(self) -> bool:
        return self.lower == 0 and self.upper == 1


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple            # ((coef, var name), ...)
    op: str
    rhs: int
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(c), str(v)) for c, v in self.terms))
        if not self.terms:
            raise ValueError("a linear constraint needs at least one term")
        if self.op not in OPS:
            raise ValueError(f"comparator must be one of {OPS}, got {self.op!r}")

    def lhs(self, assignment) -> int:
        return sum(c * assignment[v] for c, v in self.terms)

    def holds(self, assignment) -> bool:
        x = self.lhs(assignment)
        return x <= self.rhs if self.op == "<=" else x >= self.rhs if self.op == ">=" else x == self.rhs


@dataclass(frozen=True)
class Objective:
    sense: str
    terms: tuple
    name: str = "obj"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(c), str(v)) for c, v in self.terms))
        if self.sense not in (MIN, MAX):
            raise ValueError(f"sense must be {MIN!r} or {MAX!r}")

    def value(self, assignment) -> int:
        return sum(c * assignment[v] for c, v in self.terms)


@dataclass
class IlpProgram:
    vars: list
    constraints: list
    objectives: list
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        names = [v.name for v in self.vars]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        known = set(names)
        for item in list(self.constraints) + list(self.objectives):
            for _, v in item.terms:
                if v not in known:
                    raise ValueError(f"undeclared variable {v!r}")
        if len(self.objectives) > 2:
            raise ValueError("at most two objectives are supported")

    def var(self, name: str) -> IlpVar:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    def feasible(self, assignment) -> bool:
        return all(v.lower <= assignment[v.name] <= v.upper for v in self.vars) and \
            all(c.holds(assignment) for c in self.constraints)


@dataclass
class IlpResult:
    status: str
    objective_values: Optional[list] = None
    assignment: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == OPT


# --- clauses to constraints ------------------------------------------------

def clause_to_constraint(clause: Sequence[int], names) -> LinearConstraint:
    """``Σ x_pos − Σ x_neg ≥ 1 − #neg`` for a non-tautological clause."""
    lits = list(clause)
    if any(-l in lits for l in lits):
        raise ValueError(f"tautological clause {clause}")
    terms = [(1 if l > 0 else -1, names[abs(l)]) for l in lits]
    return LinearConstraint(terms, ">=", 1 - sum(1 for l in lits if l < 0))


def cnf_var_names(cnf: CnfFormula) -> dict:
    """Index -> ILP name: registry names, ``__t<idx>`` for Tseitin aux variables."""
    names = cnf.names
    return {i: names.get(i, f"__t{i}") for i in range(1, cnf.num_vars + 1)}


def _cnf_program_parts(cnf: CnfFormula):
    names = cnf_var_names(cnf)
    vars_ = [IlpVar(names[i]) for i in range(1, cnf.num_vars + 1)]
    cons = [clause_to_constraint(c, names) for c in cnf.clauses]
    return names, vars_, cons


def build_check_program(model: CausalModel, context, effect: Expr, cause,
                        value_distance: bool = False) -> IlpProgram:
    """Minimum-distance program for a candidate cause.

    ``__d`` counts the cause variables that are intervened on and lives in
    ``[1, len(cause)]``; it is tied to the keep literals by
    ``__d + Σ_pos k − Σ_neg k = #pos``.
    """
    formula, keeps, pairs = build_g_keep(model, context, effect, cause, value_distance)
    cnf = tseitin(formula)
    names, vars_, cons = _cnf_program_parts(cnf)
    vars_.append(IlpVar(DISTANCE, 1, len(pairs)))
    terms = [(1 if pol else -1, n) for n, pol in keeps] + [(1, DISTANCE)]
    cons.append(LinearConstraint(terms, "=", sum(1 for _, pol in keeps if pol), name="distance"))
    objective = Objective(MIN, [(1, DISTANCE)], "distance")
    meta = {"cnf": cnf, "actual": formula.actual, "pairs": pairs, "keeps": keeps}
    return IlpProgram(vars_, cons, [objective], meta)


def build_why_program(model: CausalModel, context, effect: Expr) -> IlpProgram:
    """Lexicographic program: most variables following their equations, then fewest cause variables."""
    candidate_variables(model, effect)
    formula = build_g_star(model, context, effect)
    cnf = tseitin(formula)
    names, vars_, cons = _cnf_program_parts(cnf)
    c1s, c3s = [], []
    for v, (c1, c2, c3) in formula.indicators.items():
        vars_.append(IlpVar(c3))
        cons.append(LinearConstraint([(1, c1), (1, c2), (2, c3)], ">=", 1, name=f"c3lo_{v}"))
        cons.append(LinearConstraint([(1, c1), (1, c2), (2, c3)], "<=", 2, name=f"c3hi_{v}"))
        c1s.append(c1)
        c3s.append(c3)
    cons.append(LinearConstraint([(1, c) for c in c3s], ">=", 1, name="nonempty"))
    objectives = [Objective(MAX, [(1, c) for c in c1s], "obj1"), Objective(MIN, [(1, c) for c in c3s], "obj2")]
    meta = {"cnf": cnf, "actual": formula.actual, "indicators": formula.indicators}
    return IlpProgram(vars_, cons, objectives, meta)


# --- solving ----------------------------------------------------------------

class _Booleanized:
    """An incremental SAT solver holding the program's variables and constraints."""

    def __init__(self, program: IlpProgram, deadline):
        self.program = program
        self.solver = Solver(deadline=deadline)
        self.bits: Dict[str, List[int]] = {}
        self.base: Dict[str, int] = {}
        self.calls = 0
        for v in program.vars:
            self.bits[v.name] = [self.solver.new_var() for _ in range(v.upper - v.lower)]
            self.base[v.name] = v.lower
        for v in program.vars:
            b = self.bits[v.name]
            for hi, lo in zip(b[1:], b):
                self.solver.add_clause((-hi, lo))
        for c in program.constraints:
            self.add(c.terms, c.op, c.rhs)

    def linear(self, terms) -> Tuple[list, int]:
        lits, const = [], 0
        for c, name in terms:
            const += c * self.base[name]
            lits.extend((c, b) for b in self.bits[name])
        return lits, const

    def add(self, terms, op, rhs, guard: int = 0) -> None:
        lits, const = self.linear(terms)
        out = []
        if op in (">=", "="):
            encode_geq(lits, rhs - const, self.solver.new_var, out, guard)
        if op in ("<=", "="):
            encode_leq(lits, rhs - const, self.solver.new_var, out, guard)
        for c in out:
            self.solver.add_clause(c)

    def solve(self, assumptions=()) -> bool:
        self.calls += 1
        return self.solver.solve(assumptions)

    def assignment(self) -> dict:
        m = self.solver.model()
        return {name: self.base[name] + sum(m[b] for b in bits) for name, bits in self.bits.items()}

    def minimize(self, terms, current: dict) -> dict:
        """Drive ``Σ terms`` to its minimum starting from the feasible ``current``."""
        value = sum(c * current[v] for c, v in terms)
        lits, const = self.linear(terms)
        lo = const + sum(c for c, _ in lits if c < 0)
        best, hi = current, value
        step, galloping = 1, True
        while lo < hi:
            t = min(lo + step - 1, hi - 1) if galloping else (lo + hi - 1) // 2
            guard = self.solver.new_var()
            self.add(terms, "<=", t, guard)
            if self.solve([guard]):
                best = self.assignment()
                hi = sum(c * best[v] for c, v in terms)
                galloping = False
            else:
                lo = t + 1
                step *= 2
            self.solver.add_clause((-guard,))
        return best


def solve_ilp(program: IlpProgram, deadline: Optional[float] = None,
              prefer: Sequence[Tuple[str, int]] = ()) -> IlpResult:
    """Lexicographic optimum of ``program``.

    ``prefer`` lists ``(binary var, value)`` wishes that break ties among
    optimal assignments: each wish, in order, is granted whenever it is
    compatible with the objectives and with the wishes granted before it.
    """
    b = _Booleanized(program, deadline)
    if not b.solve():
        return IlpResult(INFEASIBLE, stats={"sat_calls": b.calls})
    current = b.assignment()
    values = []
    for obj in program.objectives:
        sign = 1 if obj.sense == MIN else -1
        terms = [(sign * c, v) for c, v in obj.terms]
        current = b.minimize(terms, current)
        value = obj.value(current)
        values.append(value)
        b.add(obj.terms, "=", value)
    granted = []
    for name, want in prefer:
        lit = b.bits[name][0] if want else -b.bits[name][0]
        if current[name] != want:
            if not b.solve(granted + [lit]):
                continue
            current = b.assignment()
        granted.append(lit)
    if not program.feasible(current):
        raise AssertionError("ILP engine produced an infeasible assignment")
    return IlpResult(OPT, values, current, {"sat_calls": b.calls, "sat_vars": b.solver.num_vars})


def brute_force_ilp(program: IlpProgram) -> Optional[list]:
    """Exhaustive lexicographic optimum (None when infeasible); desk scale only."""
    import itertools

    ranges = [range(v.lower, v.upper + 1) for v in program.vars]
    names = [v.name for v in program.vars]
    best = None
    for point in itertools.product(*ranges):
        a = dict(zip(names, point))
        if not all(c.holds(a) for c in program.constraints):
            continue
        key = [o.value(a) if o.sense == MIN else -o.value(a) for o in program.objectives]
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return [k if o.sense == MIN else -k for k, o in zip(best, program.objectives)]


# --- CPLEX LP text -------------------------------------------------------------

def lp_name(name: str) -> str:
    """Column name used in LP files.

    LP readers treat many words and word prefixes (``st``, ``inf...``,
    ``bounds``, ``nan``) as keywords, so model variables are written as
    ``v_<name>``.  Internal ``__`` names never clash and pass through.
    """
    return name if name.startswith("__") else "v_" + name


def _expr_text(terms) -> str:
    out = []
    for i, (c, v) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        v = lp_name(v)
        body = v if mag == 1 else f"{mag} {v}"
        if i == 0:
            out.append(body if c > 0 else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    lines, cur = [], []
    for tok in out:
        cur.append(tok)
        if len(cur) == 8:
            lines.append(" ".join(cur))
            cur = []
    if cur:
        lines.append(" ".join(cur))
    return "\n   ".join(lines)


def write_lp(program: IlpProgram, stage: int = 1, pinned: Sequence[int] = ()) -> str:
    """CPLEX LP text optimising objective ``stage``; earlier objectives are pinned to ``pinned``."""
    if not 1 <= stage <= max(1, len(program.objectives)):
        raise ValueError(f"no objective for stage {stage}")
    if len(pinned) != stage - 1:
        raise ValueError("need one pinned value per earlier stage")
    lines = [f"\\ stage {stage} of {len(program.objectives)}"]
    if program.objectives:
        obj = program.objectives[stage - 1]
        lines += ["Maximize" if obj.sense == MAX else "Minimize", f" {obj.name}: {_expr_text(obj.terms)}"]
    else:
        lines += ["Minimize", " obj:"]
    lines.append("Subject To")
    for i, c in enumerate(program.constraints, 1):
        op = {"<=": "<=", ">=": ">=", "=": "="}[c.op]
        lines.append(f" {c.name or f'c{i}'}: {_expr_text(c.terms)} {op} {c.rhs}")
    for k, value in enumerate(pinned):
        lines.append(f" pin_{program.objectives[k].name}: {_expr_text(program.objectives[k].terms)} = {value}")
    lines.append("Bounds")
    for v in program.vars:
        if not v.binary:
            lines.append(f" {v.lower} <= {lp_name(v.name)} <= {v.upper}")
    binaries = [lp_name(v.name) for v in program.vars if v.binary]
    generals = [lp_name(v.name) for v in program.vars if not v.binary]
    if binaries:
        lines.append("Binaries")
        lines += [" " + " ".join(binaries[i:i + 10]) for i in range(0, len(binaries), 10)]
    if generals:
        lines.append("Generals")
        lines += [" " + " ".join(generals[i:i + 10]) for i in range(0, len(generals), 10)]
    lines.append("End")
    return "\n".join(lines) + "\n"


__all__ = [
    "IlpVar", "LinearConstraint", "Objective", "IlpProgram", "IlpResult", "OPT", "INFEASIBLE", "MIN", "MAX",
    "clause_to_constraint", "build_check_program", "build_why_program", "solve_ilp", "brute_force_ilp",
    "write_lp", "lp_name", "cnf_var_names", "DISTANCE",
]
