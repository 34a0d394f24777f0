"""Binary acyclic structural causal models: parsing, validation and evaluation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .errors import (
    CyclicModel,
    DuplicateVariable,
    InvalidContext,
    InvalidQuery,
    ParseError,
    SelfReference,
    UndefinedVariable,
)
from .expr import (
    RESERVED_PREFIX,
    Expr,
    compile_expr,
    eval_expr,
    format_expr,
    is_identifier,
    parse_expr,
    variables,
)


def _check_identifier(name) -> str:
    if not isinstance(name, str) or not is_identifier(name):
        raise ParseError(f"invalid identifier {name!r}")
    if name.startswith(RESERVED_PREFIX):
        raise ParseError(f"identifier {name!r} uses the reserved prefix {RESERVED_PREFIX!r}")
    return name


@dataclass(frozen=True, eq=False)
class CausalModel:
    """Exogenous inputs plus one boolean equation per endogenous variable.

    Construction validates every invariant; instances are immutable.
    """

    name: str
    exogenous: tuple
    endogenous: tuple
    equations: Mapping[str, Expr] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "exogenous", tuple(self.exogenous))
        object.__setattr__(self, "endogenous", tuple(self.endogenous))
        object.__setattr__(self, "equations", dict(self.equations))
        seen = set()
        for v in self.exogenous + self.endogenous:
            _check_identifier(v)
            if v in seen:
                raise DuplicateVariable(v)
            seen.add(v)
        if set(self.equations) != set(self.endogenous):
            raise InvalidQuery("equations must be given for exactly the endogenous variables")
        for v in self.endogenous:
            for dep in variables(self.equations[v]):
                if dep == v:
                    raise SelfReference(v)
                if dep not in seen:
                    raise UndefinedVariable(f"{dep!r} in equation of {v!r}")
        self.order  # raises CyclicModel

    @property
    def variables(self) -> tuple:
        return self.exogenous + self.endogenous

    def is_endogenous(self, name: str) -> bool:
        return name in self._endo_set

    def is_exogenous(self, name: str) -> bool:
        return name in self._exo_set

    @cached_property
    def _endo_set(self):
        return frozenset(self.endogenous)

    @cached_property
    def _exo_set(self):
        return frozenset(self.exogenous)

    @cached_property
    def parents(self) -> dict:
        """Variables occurring in each endogenous equation, in occurrence order."""
        return {v: tuple(variables(self.equations[v])) for v in self.endogenous}

    @cached_property
    def order(self) -> tuple:
        """Topological order of the endogenous variables.

        Kahn's algorithm; among ready variables the earliest declared goes first.
        """
        import heapq

        pos = {v: i for i, v in enumerate(self.endogenous)}
        indeg = {v: 0 for v in self.endogenous}
        children = {v: [] for v in self.endogenous}
        for v in self.endogenous:
            for p in set(self.parents[v]):
                if p in indeg:
                    indeg[v] += 1
                    children[p].append(v)
        ready = [pos[v] for v in self.endogenous if indeg[v] == 0]
        heapq.heapify(ready)
        out = []
        while ready:
            v = self.endogenous[heapq.heappop(ready)]
            out.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, pos[c])
        if len(out) != len(self.endogenous):
            raise CyclicModel(self._find_cycle(set(self.endogenous) - set(out)))
        return tuple(out)

    def _find_cycle(self, remaining) -> list:
        start = next(v for v in self.endogenous if v in remaining)
        path, index = [], {}
        v = start
        while v not in index:
            index[v] = len(path)
            path.append(v)
            v = next(p for p in self.parents[v] if p in remaining)
        return path[index[v]:] + [v]

    @cached_property
    def _compiled(self) -> dict:
        return {v: compile_expr(self.equations[v]) for v in self.endogenous}

    @cached_property
    def descendants(self) -> dict:
        """Endogenous variables reachable from each variable (excluding itself)."""
        kids = {v: [] for v in self.variables}
        for v in self.endogenous:
            for p in self.parents[v]:
                kids[p].append(v)
        out = {}
        for v in reversed(self.order):
            acc = set()
            for c in kids[v]:
                acc.add(c)
                acc |= out[c]
            out[v] = frozenset(acc)
        for u in self.exogenous:
            acc = set()
            for c in kids[u]:
                acc.add(c)
                acc |= out[c]
            out[u] = frozenset(acc)
        return out

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "exogenous": list(self.exogenous),
            "endogenous": [{"id": v, "eq": format_expr(self.equations[v])} for v in self.endogenous],
        }
        return json.dumps(doc, indent=2) + "\n"


def parse_model(text: str) -> CausalModel:
    """Parse and validate the JSON model format."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    exo = doc.get("exogenous", [])
    endo = doc.get("endogenous")
    if not isinstance(exo, list) or not isinstance(endo, list):
        raise ParseError("'exogenous' and 'endogenous' must be arrays")
    names, eqs = [], {}
    for item in endo:
        if not isinstance(item, dict) or "id" not in item or "eq" not in item:
            raise ParseError(f"bad endogenous entry {item!r}")
        name = _check_identifier(item["id"])
        if name in eqs or name in exo:
            raise DuplicateVariable(name)
        if not isinstance(item["eq"], str):
            raise ParseError(f"equation of {name!r} must be a string")
        names.append(name)
        eqs[name] = parse_expr(item["eq"])
    return CausalModel(str(doc.get("name", "")), exo, names, eqs)


def load_model(path) -> CausalModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def topological_order(model: CausalModel) -> list:
    return list(model.order)


def check_context(model: CausalModel, context: Mapping[str, bool]) -> None:
    keys = set(context)
    missing = [u for u in model.exogenous if u not in keys]
    extra = sorted(keys - set(model.exogenous))
    if missing or extra:
        raise InvalidContext(f"context must assign exactly the exogenous variables (missing {missing}, extra {extra})")


def evaluate(model: CausalModel, context: Mapping[str, bool]) -> dict:
    """Actual evaluation: the unique solution of the equations under ``context``."""
    return evaluate_with_intervention(model, context, {})


def evaluate_with_intervention(model: CausalModel, context: Mapping[str, bool],
                               intervention: Mapping[str, bool]) -> dict:
    check_context(model, context)
    for k in intervention:
        if not model.is_endogenous(k):
            raise InvalidQuery(f"cannot intervene on non-endogenous variable {k!r}")
    v = {u: bool(context[u]) for u in model.exogenous}
    fns = model._compiled
    for x in model.order:
        v[x] = bool(intervention[x]) if x in intervention else fns[x](v)
    return {name: v[name] for name in model.variables}


def _fast_eval(model: CausalModel, context: Mapping[str, bool], intervention: Mapping[str, bool]) -> dict:
    # unchecked variant for oracle inner loops
    v = dict(context)
    fns = model._compiled
    for x in model.order:
        v[x] = intervention[x] if x in intervention else fns[x](v)
    return v


def parse_assignment(text: str) -> dict:
    """Parse ``"A=1,B=0"`` into ``{"A": True, "B": False}`` preserving order."""
    out = {}
    if not text.strip():
        return out
    for item in text.split(","):
        name, sep, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not sep or value not in ("0", "1") or not is_identifier(name):
            raise ParseError(f"bad assignment {item!r}; expected NAME=0 or NAME=1")
        if name in out:
            raise DuplicateVariable(name)
        out[name] = value == "1"
    return out


def format_assignment(pairs) -> str:
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    return ",".join(f"{k}={int(bool(v))}" for k, v in items)


__all__ = [
    "CausalModel",
    "parse_model",
    "load_model",
    "topological_order",
    "evaluate",
    "evaluate_with_intervention",
    "eval_expr",
    "check_context",
    "parse_assignment",
    "format_assignment",
]

