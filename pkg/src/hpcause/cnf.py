"""Clausal form: Tseitin transformation, model projection and DIMACS/WCNF text.

Literals are signed integers in DIMACS convention (``-3`` is the negation of
variable 3) and clauses are tuples of literals.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ParseError, UnregisteredIndex
from .expr import FALSE, TRUE, And, Const, Iff, Not, Or, Var


def make_clause(lits: Iterable[int]) -> Optional[tuple]:
    """Deduplicate literals; return None for a tautology."""
    seen = {}
    for lit in lits:
        if lit == 0:
            raise ValueError("0 is not a literal")
        if -lit in seen:
            return None
        seen[lit] = None
    if not seen:
        raise ValueError("empty clause")
    return tuple(seen)


@dataclass
class CnfFormula:
    clauses: list
    num_vars: int
    registry: dict = field(default_factory=dict)  # name -> index
    aux_vars: frozenset = frozenset()

    @property
    def names(self) -> dict:
        return {i: n for n, i in self.registry.items()}

    def lit(self, name: str, value: bool = True) -> int:
        idx = self.registry[name]
        return idx if value else -idx


def simplify(e):
    """Fold constants bottom-up so that constants survive only as the whole formula."""
    if isinstance(e, (Var, Const)):
        return e
    if isinstance(e, Not):
        a = simplify(e.arg)
        if isinstance(a, Const):
            return Const(not a.value)
        if isinstance(a, Not):
            return a.arg
        return e if a is e.arg else Not(a)
    if isinstance(e, (And, Or)):
        absorbing = isinstance(e, Or)
        out = []
        for a in e.args:
            a = simplify(a)
            if isinstance(a, Const):
                if a.value == absorbing:
                    return a
                continue
            if type(a) is type(e):
                out.extend(a.args)
            else:
                out.append(a)
        if not out:
            return Const(not absorbing)
        if len(out) == 1:
            return out[0]
        return type(e)(tuple(out))
    if isinstance(e, Iff):
        left, right = simplify(e.left), simplify(e.right)
        if isinstance(left, Const):
            left, right = right, left
        if isinstance(right, Const):
            if isinstance(left, Const):
                return Const(left.value == right.value)
            return left if right.value else simplify(Not(left))
        return Iff(left, right)
    raise TypeError(f"not an expression: {e!r}")


class _Tseitin:
    def __init__(self, registry):
        self.registry = dict(registry)
        self.next_var = max(self.registry.values(), default=0) + 1
        self.first_aux = self.next_var
        self.memo = {}
        self.defs = []

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def emit(self, lits):
        c = make_clause(lits)
        if c is not None:
            self.defs.append(c)

    def lit(self, e) -> int:
        if isinstance(e, Var):
            try:
                return self.registry[e.name]
            except KeyError:
                raise UnregisteredIndex(f"variable {e.name!r} is not registered") from None
        if isinstance(e, Not):
            return -self.lit(e.arg)
        hit = self.memo.get(e)
        if hit is not None:
            return hit
        if isinstance(e, (And, Or)):
            ls = [self.lit(a) for a in e.args]
            g = self.fresh()
            if isinstance(e, And):
                for x in ls:
                    self.emit((-g, x))
                self.emit([g] + [-x for x in ls])
            else:
                for x in ls:
                    self.emit((g, -x))
                self.emit([-g] + ls)
        elif isinstance(e, Iff):
            a, b = self.lit(e.left), self.lit(e.right)
            g = self.fresh()
            self.emit((-g, -a, b))
            self.emit((-g, a, -b))
            self.emit((g, a, b))
            self.emit((g, -a, -b))
        else:
            raise TypeError(f"cannot encode {e!r}")
        self.memo[e] = g
        return g

    def top(self, e, out):
        """Clauses asserting ``e`` at the top level, using aux vars only where needed."""
        if isinstance(e, And):
            for a in e.args:
                self.top(a, out)
        elif isinstance(e, Or):
            out.append([self.lit(a) for a in e.args])
        elif isinstance(e, Iff):
            a, b = self.lit(e.left), self.lit(e.right)
            out.append([-a, b])
            out.append([a, -b])
        elif isinstance(e, Not) and isinstance(e.arg, And):
            out.append([-self.lit(a) for a in e.arg.args])
        elif isinstance(e, Not) and isinstance(e.arg, Or):
            for a in e.arg.args:
                self.top(simplify(Not(a)), out)
        elif isinstance(e, Not) and isinstance(e.arg, Iff):
            a, b = self.lit(e.arg.left), self.lit(e.arg.right)
            out.append([a, b])
            out.append([-a, -b])
        else:
            out.append([self.lit(e)])


def tseitin(formula) -> CnfFormula:
    """Equisatisfiable CNF of a PropFormula (anything with ``root`` and ``registry``).

    Aux variables are numbered after the registry in post-order; top-level unit
    clauses come first.
    """
    t = _Tseitin(formula.registry)
    root = simplify(formula.root)
    top = []
    if isinstance(root, Const):
        if not root.value:
            x = t.fresh()
            top = [[x], [-x]]
    else:
        t.top(root, top)
    units, rest = [], []
    for lits in top:
        c = make_clause(lits)
        if c is None:
            continue
        (units if len(c) == 1 else rest).append(c)
    clauses = units + t.defs + rest
    return CnfFormula(clauses, t.next_var - 1, t.registry, frozenset(range(t.first_aux, t.next_var)))


def project_assignment(cnf: CnfFormula, raw: Mapping[int, bool]) -> dict:
    """Drop aux variables and map indices back to names."""
    out = {}
    for name, idx in cnf.registry.items():
        if idx not in raw:
            raise UnregisteredIndex(f"index {idx} ({name}) missing from assignment")
        out[name] = bool(raw[idx])
    return out


def check_model(clauses: Iterable[Sequence[int]], model: Mapping[int, bool]) -> bool:
    for c in clauses:
        if not any(model.get(abs(l), False) == (l > 0) for l in c):
            return False
    return True


# --- DIMACS / WCNF ---------------------------------------------------------

def _name_comments(cnf: CnfFormula) -> list:
    return [f"c var {idx} {name}" for name, idx in sorted(cnf.registry.items(), key=lambda kv: kv[1])]


def _clause_line(c, weight=None) -> str:
    body = " ".join(str(l) for l in c) + " 0"
    return body if weight is None else f"{weight} {body}"


def write_dimacs(cnf: CnfFormula) -> str:
    lines = _name_comments(cnf)
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(_clause_line(c) for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def write_wcnf(hard: CnfFormula, soft) -> str:
    """Pre-2022 WCNF. ``soft`` holds SoftUnit objects or ``(clause, weight)`` pairs."""
    soft_clauses = []
    for s in soft:
        if hasattr(s, "polarity"):
            soft_clauses.append(((hard.lit(s.variable, s.polarity),), s.weight))
        else:
            clause, w = s
            soft_clauses.append((tuple(clause), int(w)))
    top = 1 + sum(w for _, w in soft_clauses)
    lines = _name_comments(hard)
    lines.append(f"p wcnf {hard.num_vars} {len(hard.clauses) + len(soft_clauses)} {top}")
    lines.extend(_clause_line(c, top) for c in hard.clauses)
    lines.extend(_clause_line(c, w) for c, w in soft_clauses)
    return "\n".join(lines) + "\n"


def _parse_lines(text: str, kind: str):
    header, registry, rows = None, {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "var":
                registry[parts[3]] = int(parts[2])
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != kind:
                raise ParseError(f"bad header {line!r}")
            header = [int(x) for x in parts[2:]]
            continue
        if header is None:
            raise ParseError("clause before header")
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise ParseError(f"bad clause line {line!r}") from None
        rows.append(nums)
    if header is None:
        raise ParseError("missing header")
    # clauses may span lines; join and split on terminating zeros
    flat = [x for row in rows for x in row]
    return header, registry, flat


def parse_dimacs(text: str) -> CnfFormula:
    header, registry, flat = _parse_lines(text, "cnf")
    num_vars = header[0]
    clauses, cur = [], []
    for x in flat:
        if x == 0:
            if not cur:
                raise ParseError("empty clause")
            c = make_clause(cur)
            if c is not None:
                clauses.append(c)
            cur = []
        else:
            if abs(x) > num_vars:
                raise ParseError(f"literal {x} exceeds declared variable count {num_vars}")
            cur.append(x)
    if cur:
        raise ParseError("unterminated clause")
    aux = frozenset(set(range(1, num_vars + 1)) - set(registry.values()))
    return CnfFormula(clauses, num_vars, registry, aux)


def parse_wcnf(text: str):
    """Return ``(hard CnfFormula, [(clause, weight), ...])``."""
    header, registry, flat = _parse_lines(text, "wcnf")
    num_vars, top = header[0], header[2] if len(header) > 2 else None
    hard, soft, cur = [], [], []
    for x in flat:
        cur.append(x)
        if x == 0 and len(cur) > 1:
            w, lits = cur[0], cur[1:-1]
            cur = []
            if not lits:
                raise ParseError("empty clause")
            c = make_clause(lits)
            if c is None:
                continue
            if top is not None and w >= top:
                hard.append(c)
            else:
                soft.append((c, w))
    if cur:
        raise ParseError("unterminated clause")
    aux = frozenset(set(range(1, num_vars + 1)) - set(registry.values()))
    return CnfFormula(hard, num_vars, registry, aux), soft


__all__ = [
    "CnfFormula", "make_clause", "tseitin", "simplify", "project_assignment", "check_model",
    "write_dimacs", "write_wcnf", "parse_dimacs", "parse_wcnf", "TRUE", "FALSE",
]
