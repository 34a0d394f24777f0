"""Exhaustive reference semantics for AC2, AC3, minimal causes and responsibility.

Everything here enumerates subsets and re-evaluates the model, so it is only
meant for small models; an endogenous-variable cap is enforced on entry.
Subsets are visited by size, then lexicographically in declaration order,
so the first hit is also a minimum-cardinality hit.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional

from .encoder import check_effect, prepare_query
from .errors import CapExceeded
from .expr import Expr, compile_expr
from .model import CausalModel, _fast_eval, evaluate

DEFAULT_CAP = 16
NEGATION, FULL = "negation", "full"


@dataclass(frozen=True)
class Witness:
    """Counterfactual setting of the cause plus the contingency frozen at actual values."""
    x_prime: tuple   # ((name, value), ...)
    w: tuple         # ((name, actual value), ...)

    def to_dict(self) -> dict:
        return {
            "x_prime": [{"var": n, "val": v} for n, v in self.x_prime],
            "w": [{"var": n, "val": v} for n, v in self.w],
        }


def _guard(model: CausalModel, cap: int) -> None:
    if len(model.endogenous) > cap:
        raise CapExceeded(f"{len(model.endogenous)} endogenous variables exceed the oracle cap of {cap}")


def _subsets(items, max_size=None):
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(top + 1):
        yield from combinations(items, k)


def _settings(pairs, sweep: str):
    if sweep == NEGATION:
        yield tuple((n, not x) for n, x in pairs)
        return
    actual = tuple(x for _, x in pairs)
    for values in product((False, True), repeat=len(pairs)):
        if values != actual:
            yield tuple((n, v) for (n, _), v in zip(pairs, values))


def _ac2(model, context, actual, holds, pairs, sweep, skip=()) -> Optional[Witness]:
    names = {n for n, _ in pairs}
    rest = [v for v in model.endogenous if v not in names and v not in skip]
    settings = list(_settings(pairs, sweep))
    for ws in _subsets(rest):
        frozen = {v: actual[v] for v in ws}
        for xp in settings:
            iv = dict(frozen)
            iv.update(xp)
            if not holds(_fast_eval(model, context, iv)):
                return Witness(xp, tuple((v, actual[v]) for v in ws))
    return None


def oracle_ac2(model: CausalModel, context, effect: Expr, cause, sweep: str = NEGATION,
               cap: int = DEFAULT_CAP) -> Optional[Witness]:
    """First AC2 witness, smallest contingency first; ``sweep`` picks the counterfactual settings tried."""
    _guard(model, cap)
    actual, pairs = prepare_query(model, context, effect, cause)
    return _ac2(model, context, actual, compile_expr(effect), pairs, sweep)


def _sorted_by_decl(model, pairs):
    pos = {v: i for i, v in enumerate(model.endogenous)}
    return sorted(pairs, key=lambda p: pos[p[0]])


def oracle_min_cause_subset(model: CausalModel, context, effect: Expr, cause, sweep: str = NEGATION,
                            cap: int = DEFAULT_CAP):
    """Smallest non-empty subset of the cause passing AC2, as ``(pairs, size, witness)``; None if none does."""
    _guard(model, cap)
    actual, pairs = prepare_query(model, context, effect, cause)
    holds = compile_expr(effect)
    pairs = _sorted_by_decl(model, pairs)
    for k in range(1, len(pairs) + 1):
        for sub in combinations(pairs, k):
            wit = _ac2(model, context, actual, holds, list(sub), sweep)
            if wit is not None:
                return list(sub), k, wit
    return None


def oracle_ac3(model: CausalModel, context, effect: Expr, cause, sweep: str = NEGATION,
               cap: int = DEFAULT_CAP) -> bool:
    """True iff no non-empty proper subset of the cause satisfies AC2."""
    _guard(model, cap)
    actual, pairs = prepare_query(model, context, effect, cause)
    holds = compile_expr(effect)
    pairs = _sorted_by_decl(model, pairs)
    for k in range(1, len(pairs)):
        for sub in combinations(pairs, k):
            if _ac2(model, context, actual, holds, list(sub), sweep) is not None:
                return False
    return True


def oracle_is_cause(model: CausalModel, context, effect: Expr, cause, cap: int = DEFAULT_CAP) -> bool:
    actual, _ = prepare_query(model, context, effect, cause)
    if not compile_expr(effect)(actual):
        return False
    return oracle_ac2(model, context, effect, cause, cap=cap) is not None and \
        oracle_ac3(model, context, effect, cause, cap=cap)


def oracle_max_dr_cause(model: CausalModel, context, effect: Expr, cap: int = DEFAULT_CAP):
    """Pair ``(X, W)`` with X non-empty minimising ``|X| + |W|`` subject to AC2.

    X and W range over endogenous variables outside the effect.  Ties go to
    the smaller X, then to the alphabetically smallest X, then W (both
    compared as sorted name tuples).  Returns ``(x_pairs, w_pairs, dr)`` or None.
    """
    _guard(model, cap)
    actual = evaluate(model, context)
    evars = set(check_effect(model, effect))
    holds = compile_expr(effect)
    pool = sorted(v for v in model.endogenous if v not in evars)
    for total in range(1, len(pool) + 1):
        for nx in range(1, total + 1):
            nw = total - nx
            for xs in combinations(pool, nx):
                iv_x = {v: not actual[v] for v in xs}
                rest = [v for v in pool if v not in iv_x]
                for ws in combinations(rest, nw):
                    iv = dict(iv_x)
                    iv.update((v, actual[v]) for v in ws)
                    if not holds(_fast_eval(model, context, iv)):
                        return ([(v, actual[v]) for v in xs], [(v, actual[v]) for v in ws], Fraction(1, total))
    return None


def oracle_min_contingency(model: CausalModel, context, effect: Expr, cause, cap: int = DEFAULT_CAP):
    """Size of the smallest W making the whole cause satisfy AC2 (negated setting), or None."""
    wit = oracle_ac2(model, context, effect, cause, cap=cap)
    return None if wit is None else len(wit.w)


__all__ = [
    "Witness", "oracle_ac2", "oracle_ac3", "oracle_min_cause_subset", "oracle_max_dr_cause",
    "oracle_is_cause", "oracle_min_contingency", "DEFAULT_CAP", "NEGATION", "FULL",
]
