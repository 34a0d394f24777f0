"""CDCL SAT engine with two watched literals, 1UIP learning and VSIDS.

Branching is deterministic: highest activity first, ties broken by the lowest
variable index, and every decision assigns false first.  Restarts follow the
Luby sequence, so two runs on the same input take identical paths.

Internally a literal is coded as ``2*var + sign`` (sign 1 = negated) so that
negation is ``code ^ 1`` and per-literal arrays can be plain lists.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .cnf import CnfFormula, check_model
from .errors import SolverTimeout

SAT = "SAT"
UNSAT = "UNSAT"


@dataclass
class SatResult:
    status: str
    model: Optional[dict] = None  # var index -> bool, total over 1..num_vars
    stats: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == SAT


def _luby(i: int) -> int:
    # i >= 1
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class Solver:
    """Incremental CDCL solver; clauses may be added between calls to :meth:`solve`."""

    restart_unit = 100
    var_decay = 0.95

    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (), deadline: Optional[float] = None):
        self.num_vars = 0
        self.val = [0, 0]      # per literal code: 1 true, -1 false, 0 unassigned
        self.level = [0]
        self.reason = [None]
        self.activity = [0.0]
        self.seen = [False]
        self.watches = [[], []]
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.clauses = []
        self.learnts = []
        self.heap = []
        self.var_inc = 1.0
        self.ok = True
        self.deadline = deadline
        self.stats = {"decisions": 0, "propagations": 0, "conflicts": 0}
        self._max_learnts = 2000
        self.ensure_vars(num_vars)
        for c in clauses:
            if not self.add_clause(c):
                break

    # -- setup -------------------------------------------------------------

    def ensure_vars(self, n: int) -> None:
        while self.num_vars < n:
            self.num_vars += 1
            self.val.extend((0, 0))
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.seen.append(False)
            self.watches.extend(([], []))
            heapq.heappush(self.heap, (0.0, self.num_vars))

    def new_var(self) -> int:
        self.ensure_vars(self.num_vars + 1)
        return self.num_vars

    def add_clause(self, lits: Sequence[int]) -> bool:
        """Add a DIMACS-style clause at decision level 0. Returns False once UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        codes = []
        seen = set()
        for l in lits:
            v = l if l > 0 else -l
            if v > self.num_vars:
                self.ensure_vars(v)
            c = 2 * v + (l < 0)
            if c ^ 1 in seen:
                return True
            if c in seen:
                continue
            seen.add(c)
            x = self.val[c]
            if x == 1:
                return True
            if x == 0:
                codes.append(c)
        if not codes:
            self.ok = False
            return False
        if len(codes) == 1:
            self._enqueue(codes[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(codes)
        self.watches[codes[0]].append(codes)
        self.watches[codes[1]].append(codes)
        return True

    # -- core --------------------------------------------------------------

    def _enqueue(self, code: int, reason) -> None:
        self.val[code] = 1
        self.val[code ^ 1] = -1
        v = code >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        props = 0
        conflict = None
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            props += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    # unit
                    val[first] = 1
                    val[first ^ 1] = -1
                    v = first >> 1
                    self.level[v] = len(self.trail_lim)
                    self.reason[v] = c
                    trail.append(first)
            del ws[j:]
            if conflict is not None:
                break
        self.stats["propagations"] += props
        return conflict

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self._rebuild_heap()
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act, v))

    def _rebuild_heap(self) -> None:
        act, val = self.activity, self.val
        self.heap = [(-act[v], v) for v in range(1, self.num_vars + 1) if val[2 * v] == 0]
        heapq.heapify(self.heap)

    def _analyze(self, confl):
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = None
        idx = len(trail) - 1
        while True:
            for q in (confl if p is None else confl[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            confl = reason[v]
            seen[v] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # local minimisation: drop literals implied by other learnt literals
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                keep.append(q)
                continue
            for x in r[1:]:
                xv = x >> 1
                if not seen[xv] and level[xv] > 0:
                    keep.append(q)
                    break
        for q in learnt[1:]:
            seen[q >> 1] = False
        learnt = keep
        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for i in range(2, len(learnt)):
                if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                    best = i
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        self.var_inc /= self.var_decay
        return learnt, back

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        val, act, heap = self.val, self.activity, self.heap
        start = self.trail_lim[lvl]
        for code in reversed(self.trail[start:]):
            val[code] = 0
            val[code ^ 1] = 0
            v = code >> 1
            self.reason[v] = None
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)
        if len(heap) > 4 * self.num_vars + 1000:
            self._rebuild_heap()

    def _pick_branch(self) -> int:
        heap, val, act = self.heap, self.val, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] != 0 or -a != act[v]:
                continue
            return v
        # stale entries may hide unassigned vars after rescaling
        for v in range(1, self.num_vars + 1):
            if val[2 * v] == 0:
                return v
        return 0

    def _reduce_db(self) -> None:
        # only called at level 0, so no learnt clause is a live reason
        self.learnts.sort(key=lambda c: (c.lbd, len(c)))
        half = len(self.learnts) // 2
        kept = [c for i, c in enumerate(self.learnts) if i < half or c.lbd <= 2]
        self.learnts = kept
        for w in self.watches:
            w.clear()
        for c in self.clauses:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        for c in kept:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        self._max_learnts = int(self._max_learnts * 1.1)

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        if not self.ok:
            return False
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        assume = [2 * abs(l) + (l < 0) for l in assumptions]
        for c in assume:
            self.ensure_vars(c >> 1)
        restarts = 0
        stats = self.stats
        while True:
            restarts += 1
            budget = _luby(restarts) * self.restart_unit
            status = self._search(budget, assume)
            if status is not None:
                return status
            stats["restarts"] = stats.get("restarts", 0) + 1
            self._cancel_until(0)
            if len(self.learnts) > self._max_learnts + len(self.trail):
                self._reduce_db()

    def _search(self, budget: int, assume):
        stats = self.stats
        conflicts = 0
        val = self.val
        while True:
            confl = self._propagate()
            if confl is not None:
                stats["conflicts"] += 1
                conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                if self.deadline is not None and (stats["conflicts"] & 63) == 0 and time.monotonic() > self.deadline:
                    raise SolverTimeout("SAT search exceeded its deadline")
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    c = _Learnt(learnt)
                    levels = {self.level[x >> 1] for x in learnt}
                    c.lbd = len(levels)
                    self.learnts.append(c)
                    self.watches[c[0]].append(c)
                    self.watches[c[1]].append(c)
                    self._enqueue(c[0], c)
                continue
            if conflicts >= budget:
                return None
            lvl = len(self.trail_lim)
            if lvl < len(assume):
                a = assume[lvl]
                if val[a] == -1:
                    return False
                self.trail_lim.append(len(self.trail))
                if val[a] == 0:
                    self._enqueue(a, None)
                continue
            v = self._pick_branch()
            if v == 0:
                return True
            stats["decisions"] += 1
            if self.deadline is not None and (stats["decisions"] & 1023) == 0 and time.monotonic() > self.deadline:
                raise SolverTimeout("SAT search exceeded its deadline")
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v + 1, None)

    def model(self) -> dict:
        return {v: self.val[2 * v] == 1 for v in range(1, self.num_vars + 1)}


class _Learnt(list):
    __slots__ = ("lbd",)


def solve(cnf: CnfFormula, deadline: Optional[float] = None) -> SatResult:
    """Decide ``cnf``; a returned model is re-checked against every clause."""
    s = Solver(cnf.num_vars, cnf.clauses, deadline=deadline)
    if s.solve():
        model = s.model()
        if not check_model(cnf.clauses, model):
            raise AssertionError("SAT engine produced a non-model")
        return SatResult(SAT, model, dict(s.stats))
    return SatResult(UNSAT, None, dict(s.stats))


def enumerate_models(cnf: CnfFormula, projection: Iterable[int], limit: Optional[int] = None,
                     deadline: Optional[float] = None) -> list:
    """All distinct projections of models of ``cnf`` onto ``projection`` (blocking clauses)."""
    proj = sorted(set(projection))
    for v in proj:
        if not 1 <= v <= cnf.num_vars:
            raise ValueError(f"projection variable {v} outside 1..{cnf.num_vars}")
    s = Solver(cnf.num_vars, cnf.clauses, deadline=deadline)
    out = []
    while limit is None or len(out) < limit:
        if not s.solve():
            break
        m = s.model()
        out.append({v: m[v] for v in proj})
        if not proj or not s.add_clause([-v if m[v] else v for v in proj]):
            break
    return out
