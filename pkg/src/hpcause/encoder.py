"""Propositional encodings of causal queries.

Every builder returns a :class:`PropFormula` whose registry lists exogenous
variables, then endogenous variables (declaration order), then any indicator or
helper variables.  ``f(Y=y)`` below means the positive literal of ``Y`` when
``y`` is true and the negative literal otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import AC1Violation, CauseEffectOverlap, InvalidQuery, NoCandidateVariables
from .expr import Expr, Iff, Var, conj, disj, literal, neg, variables
from .model import CausalModel, evaluate


@dataclass(frozen=True)
class PropFormula:
    root: Expr
    registry: dict                      # name -> 1-based index
    indicators: dict = field(default_factory=dict)  # endogenous var -> (c1, c2, c3) names
    actual: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class SoftUnit:
    """Soft unit clause ``f(variable=polarity)``; its weight is always 1 here."""
    variable: str
    polarity: bool
    weight: int = 1


def c1_name(v: str) -> str:
    return f"__c1_{v}"


def c2_name(v: str) -> str:
    return f"__c2_{v}"


def c3_name(v: str) -> str:
    return f"__c3_{v}"


def keep_name(v: str) -> str:
    return f"__k_{v}"


def normalize_cause(cause) -> list:
    """Accept a mapping or a sequence of ``(name, value)`` pairs."""
    pairs = list(cause.items()) if isinstance(cause, Mapping) else [tuple(p) for p in cause]
    return [(str(n), bool(v)) for n, v in pairs]


def check_effect(model: CausalModel, effect: Expr) -> list:
    evars = variables(effect)
    for v in evars:
        if not model.is_endogenous(v):
            raise InvalidQuery(f"effect mentions {v!r}, which is not an endogenous variable")
    return evars


def prepare_query(model: CausalModel, context, effect: Expr, cause) -> tuple:
    """Validate a checking query; return ``(actual valuation, cause pairs)``."""
    actual = evaluate(model, context)
    pairs = normalize_cause(cause)
    if not pairs:
        raise InvalidQuery("candidate cause must be non-empty")
    names = [n for n, _ in pairs]
    if len(set(names)) != len(names):
        raise InvalidQuery("cause variables must be pairwise distinct")
    for n, _ in pairs:
        if not model.is_endogenous(n):
            raise InvalidQuery(f"cause variable {n!r} is not endogenous")
    evars = set(check_effect(model, effect))
    overlap = [n for n in names if n in evars]
    if overlap:
        raise CauseEffectOverlap(f"cause variables {overlap} occur in the effect")
    wrong = [n for n, x in pairs if actual[n] != x]
    if wrong:
        raise AC1Violation(f"cause values of {wrong} differ from the actual evaluation")
    return actual, pairs


def _registry(model: CausalModel, extra: Sequence[str] = ()) -> dict:
    names = list(model.exogenous) + list(model.endogenous) + list(extra)
    return {n: i for i, n in enumerate(names, 1)}


def _equation(model: CausalModel, v: str) -> Expr:
    return Iff(Var(v), model.equations[v])


def _context_literals(model: CausalModel, context) -> list:
    return [literal(u, context[u]) for u in model.exogenous]


def _eq_or_actual(model: CausalModel, actual, v: str) -> Expr:
    """``(V <-> F_V) | f(V=v)``: V follows its equation or is frozen at its actual value."""
    return disj([_equation(model, v), literal(v, actual[v])])


def _g_parts(model, context, effect, actual, cause_names) -> list:
    parts = [neg(effect)]
    parts += _context_literals(model, context)
    parts += [_eq_or_actual(model, actual, v) for v in model.endogenous if v not in cause_names]
    return parts


def build_f(model: CausalModel, context, effect: Expr, cause) -> PropFormula:
    """Satisfiable iff the negated cause, with some contingency set, falsifies the effect."""
    actual, pairs = prepare_query(model, context, effect, cause)
    names = {n for n, _ in pairs}
    parts = _g_parts(model, context, effect, actual, names)
    parts += [literal(n, not x) for n, x in pairs]
    return PropFormula(conj(parts), _registry(model), actual=actual)


def build_g(model: CausalModel, context, effect: Expr, cause) -> PropFormula:
    """Like :func:`build_f` but cause variables are left unconstrained."""
    actual, pairs = prepare_query(model, context, effect, cause)
    names = {n for n, _ in pairs}
    return PropFormula(conj(_g_parts(model, context, effect, actual, names)), _registry(model), actual=actual)


def non_minimality(model, pairs) -> Expr:
    """Some cause variable follows its equation or keeps its actual value."""
    return disj([disj([_equation(model, n), literal(n, x)]) for n, x in pairs])


def non_emptiness(model, pairs) -> Expr:
    """Not every cause variable is at its actual value, and not every one follows its equation."""
    return conj([
        neg(conj([literal(n, x) for n, x in pairs])),
        neg(conj([_equation(model, n) for n, _ in pairs])),
    ])


def build_g_prime(model: CausalModel, context, effect: Expr, cause) -> PropFormula:
    """G & H & K; satisfiable iff a non-empty proper subset of the cause already satisfies AC2."""
    actual, pairs = prepare_query(model, context, effect, cause)
    names = {n for n, _ in pairs}
    parts = _g_parts(model, context, effect, actual, names)
    parts += [non_minimality(model, pairs), non_emptiness(model, pairs)]
    return PropFormula(conj(parts), _registry(model), actual=actual)


def keep_literals(model: CausalModel, actual, pairs, value_distance: bool = False):
    """Per cause variable, a literal that is true when the variable is *not* intervened on.

    A cause variable counts as intervened on when it neither follows its
    equation nor keeps its actual value.  For variables whose equation reads
    only exogenous variables the equation is pinned by the context, so the
    plain literal ``f(X=x)`` already says this; other variables get a named
    helper ``__k_X <-> ((X <-> F_X) | f(X=x))``.

    With ``value_distance`` every cause variable uses ``f(X=x)``, i.e. the
    distance is the plain Hamming distance on cause values.

    Returns ``(keeps, definitions, helper names)`` where ``keeps`` is a list of
    ``(name, polarity)``.
    """
    keeps, defs, helpers = [], [], []
    for n, x in pairs:
        if value_distance or all(model.is_exogenous(p) for p in model.parents[n]):
            keeps.append((n, x))
        else:
            k = keep_name(n)
            helpers.append(k)
            keeps.append((k, True))
            defs.append(Iff(Var(k), disj([_equation(model, n), literal(n, x)])))
    return keeps, defs, helpers


def build_g_keep(model: CausalModel, context, effect: Expr, cause, value_distance: bool = False,
                 with_k: bool = False):
    """``G`` plus the keep-literal definitions (and ``K`` when ``with_k``).

    Returns ``(PropFormula, keeps, pairs)`` with ``keeps`` as in :func:`keep_literals`.
    """
    actual, pairs = prepare_query(model, context, effect, cause)
    names = {n for n, _ in pairs}
    keeps, defs, helpers = keep_literals(model, actual, pairs, value_distance)
    parts = _g_parts(model, context, effect, actual, names)
    if with_k:
        parts.append(non_emptiness(model, pairs))
    parts += defs
    return PropFormula(conj(parts), _registry(model, helpers), actual=actual), keeps, pairs


def build_g_max(model: CausalModel, context, effect: Expr, cause, value_distance: bool = False):
    """Hard part ``G & K`` plus one weight-1 soft unit per cause variable.

    Returns ``(hard PropFormula, [SoftUnit, ...])``.
    """
    hard, keeps, _ = build_g_keep(model, context, effect, cause, value_distance, with_k=True)
    return hard, [SoftUnit(n, pol) for n, pol in keeps]


def build_g_star(model: CausalModel, context, effect: Expr) -> PropFormula:
    """Encoding for why-queries with per-variable indicator variables.

    Effect variables follow their equations.  Every other endogenous ``V`` gets
    ``C1 <-> (V <-> F_V)`` and ``C2 <-> f(V=v)``, i.e. the two-case disjunctions
    ``((V<->F_V) & C1) | (!(V<->F_V) & !C1)`` and ``(f(V=v) & C2) | (!f(V=v) & !C2)``.
    """
    actual = evaluate(model, context)
    evars = set(check_effect(model, effect))
    parts = [neg(effect)] + _context_literals(model, context)
    indicators, extra = {}, []
    for v in model.endogenous:
        if v in evars:
            parts.append(_equation(model, v))
            continue
        c1, c2 = c1_name(v), c2_name(v)
        indicators[v] = (c1, c2, c3_name(v))
        extra += [c1, c2]
        parts.append(Iff(Var(c1), _equation(model, v)))
        parts.append(Iff(Var(c2), literal(v, actual[v])))
    return PropFormula(conj(parts), _registry(model, extra), indicators, actual)


def candidate_variables(model: CausalModel, effect: Expr) -> list:
    evars = set(check_effect(model, effect))
    out = [v for v in model.endogenous if v not in evars]
    if not out:
        raise NoCandidateVariables("every endogenous variable occurs in the effect")
    return out


__all__ = [
    "PropFormula", "SoftUnit", "build_f", "build_g", "build_g_prime", "build_g_keep", "build_g_max", "build_g_star",
    "keep_literals", "non_minimality", "non_emptiness", "prepare_query", "normalize_cause",
    "candidate_variables", "c1_name", "c2_name", "c3_name", "keep_name",
]
