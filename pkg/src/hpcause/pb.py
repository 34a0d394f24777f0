"""Cardinality and pseudo-Boolean constraints as clauses.

All encoders append clauses to a caller-owned list and draw fresh variables
from a callable, so they work both for standalone CNFs and for a live
:class:`~hpcause.sat.Solver`.
"""
from __future__ import annotations

from typing import Callable, List, Sequence, Tuple


def seq_counter(lits: Sequence[int], width: int, new_var: Callable[[], int], clauses: list) -> list:
    """Sequential counter over ``lits`` counting up to ``width``.

    Returns output literals ``o[0..width-1]`` with ``o[j]`` forced true whenever
    at least ``j+1`` of ``lits`` are true.  Asserting ``-o[k]`` therefore
    enforces "at most ``k``".
    """
    n = len(lits)
    if width <= 0 or n == 0:
        return []
    prev = None
    for i, x in enumerate(lits):
        cur = [new_var() for _ in range(min(width, i + 1))]
        clauses.append((-x, cur[0]))
        if prev is not None:
            for j, s in enumerate(prev):
                clauses.append((-s, cur[j]))
                if j + 1 < len(cur):
                    clauses.append((-x, -s, cur[j + 1]))
        prev = cur
    return prev


def at_most(lits: Sequence[int], k: int, new_var: Callable[[], int], clauses: list) -> None:
    """Sinz sequential-counter encoding of ``sum(lits) <= k``."""
    if k < 0:
        clauses.append(())
        return
    if k >= len(lits):
        return
    if k == 0:
        clauses.extend((-x,) for x in lits)
        return
    outs = seq_counter(lits, k + 1, new_var, clauses)
    clauses.append((-outs[k],))


def normalize_geq(terms: Sequence[Tuple[int, int]], bound: int) -> Tuple[List[Tuple[int, int]], int]:
    """Rewrite ``sum c*lit >= bound`` so that all coefficients are positive.

    ``c*lit`` with ``c < 0`` becomes ``|c|*(-lit) + c``.  Literals occurring
    more than once are merged.
    """
    acc = {}
    for c, lit in terms:
        if c == 0:
            continue
        if c < 0:
            c, lit, bound = -c, -lit, bound - c
        if -lit in acc:
            # a*l + c*(-l) = c + (a - c)*l
            a = acc.pop(-lit)
            bound -= min(a, c)
            if a > c:
                acc[-lit] = a - c
            elif c > a:
                acc[lit] = c - a
            continue
        acc[lit] = acc.get(lit, 0) + c
    return [(c, l) for l, c in acc.items()], bound


def encode_geq(terms: Sequence[Tuple[int, int]], bound: int, new_var: Callable[[], int],
               clauses: list, guard: int = 0) -> None:
    """Clauses enforcing ``sum c*lit >= bound`` (optionally only when ``guard`` is true).

    Uses a reduced ordered decision diagram over the terms (largest
    coefficient first); nodes are memoised on the remaining requirement.
    """
    terms, bound = normalize_geq(terms, bound)
    g = (-guard,) if guard else ()
    if bound <= 0:
        return
    terms = [(min(c, bound), l) for c, l in terms]
    total = sum(c for c, _ in terms)
    if total < bound:
        clauses.append(g)
        return
    if all(c >= bound for c, _ in terms):
        clauses.append(g + tuple(l for _, l in terms))
        return
    terms.sort(key=lambda t: -t[0])
    suffix = [0] * (len(terms) + 1)
    for i in range(len(terms) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + terms[i][0]
    memo = {}
    TRUE, FALSE = "T", "F"

    def node(i: int, need: int):
        if need <= 0:
            return TRUE
        if suffix[i] < need:
            return FALSE
        if suffix[i] == need:
            # every remaining literal must hold
            key = (i, need)
            if key in memo:
                return memo[key]
            y = new_var()
            for _, l in terms[i:]:
                clauses.append((-y, l))
            memo[key] = y
            return y
        key = (i, need)
        if key in memo:
            return memo[key]
        c, l = terms[i]
        hi = node(i + 1, need - c)
        lo = node(i + 1, need)
        if hi == lo:
            memo[key] = hi
            return hi
        y = new_var()
        # y -> (l ? hi : lo); lo implies hi because coefficients are positive
        if hi is FALSE:
            clauses.append((-y, -l))
        elif hi is not TRUE:
            clauses.append((-y, -l, hi))
            clauses.append((-y, hi))
        if lo is FALSE:
            clauses.append((-y, l))
        elif lo is not TRUE:
            clauses.append((-y, l, lo))
        memo[key] = y
        return y

    root = node(0, bound)
    if root is FALSE:
        clauses.append(g)
    elif root is not TRUE:
        clauses.append(g + (root,))


def encode_leq(terms, bound, new_var, clauses, guard: int = 0) -> None:
    encode_geq([(-c, l) for c, l in terms], -bound, new_var, clauses, guard)
