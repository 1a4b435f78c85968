"""A compact incremental CDCL solver.

Two watched literals, first-UIP learning, VSIDS-style activities with a
lazy heap, Luby restarts, and assumptions handled as forced first
decisions.  It is meant for small and medium instances and as an
independent cross-check of the MiniSat back end.
"""

from __future__ import annotations

import heapq
import random
import time
from typing import Sequence


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i + 1:
        k += 1
    while True:
        if i + 1 == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i + 1:
            k += 1


class CdclSolver:
    def __init__(self, seed: int = 0) -> None:
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [0]  # per var: 1 true, -1 false, 0 unassigned
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [-1]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.unsat = False
        self.rng = random.Random(seed)
        self._model: list[int] = [0]

    # -- variables ------------------------------------------------------------
    def _ensure(self, v: int) -> None:
        while self.nvars < v:
            self.nvars += 1
            self.assign.append(0)
            self.level.append(0)
            self.reason.append(-1)
            self.activity.append(self.rng.random() * 1e-5)
            self.phase.append(-1)
            self.watches[self.nvars] = []
            self.watches[-self.nvars] = []
            heapq.heappush(self.heap, (-self.activity[self.nvars], self.nvars))

    def _val(self, lit: int) -> int:
        a = self.assign[abs(lit)]
        return a if lit > 0 else -a

    # -- clauses ---------------------------------------------------------------
    def add_clause(self, lits: Sequence[int]) -> None:
        if self.unsat:
            return
        self._backtrack(0)
        seen: set[int] = set()
        c: list[int] = []
        for l in lits:
            self._ensure(abs(l))
            if -l in seen:
                return
            if l in seen:
                continue
            v = self._val(l)
            if v == 1 and self.level[abs(l)] == 0:
                return
            if v == -1 and self.level[abs(l)] == 0:
                continue
            seen.add(l)
            c.append(l)
        if not c:
            self.unsat = True
            return
        if len(c) == 1:
            self._enqueue(c[0], -1)
            if self._propagate() != -1:
                self.unsat = True
            return
        idx = len(self.clauses)
        self.clauses.append(c)
        self.watches[c[0]].append(idx)
        self.watches[c[1]].append(idx)

    def _enqueue(self, lit: int, reason: int) -> None:
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        clauses, watches, assign = self.clauses, self.watches, self.assign
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            wl = watches[false_lit]
            i = 0
            j = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                a = assign[abs(first)]
                if (a if first > 0 else -a) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    ak = assign[abs(lk)]
                    if (ak if lk > 0 else -ak) != -1:
                        c[1], c[k] = lk, c[1]
                        watches[lk].append(ci)
                        found = True
                        break
                if found:
                    continue
                wl[j] = ci
                j += 1
                if (a if first > 0 else -a) == -1:
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return ci
                self._enqueue(first, ci)
            del wl[j:]
        return -1

    # -- search ------------------------------------------------------------------
    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.assign[v] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, len(self.trail))

    def _bump(self, v: int) -> None:
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1) if self.assign[u] == 0]
            heapq.heapify(self.heap)
        if self.assign[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = [False] * (self.nvars + 1)
        learnt: list[int] = [0]
        counter = 0
        cur = len(self.trail_lim)
        idx = len(self.trail) - 1
        p = 0
        while True:
            for q in self.clauses[confl]:
                if p != 0 and q == p:
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _pick(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.assign[v] == 0:
                return v
        return 0

    def solve(self, assumptions: Sequence[int] = (), deadline: float | None = None) -> bool | None:
        if self.unsat:
            return False
        for a in assumptions:
            self._ensure(abs(a))
        self._backtrack(0)
        if self._propagate() != -1:
            self.unsat = True
            return False
        restart = 0
        conflicts_left = 100 * _luby(restart)
        steps = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                if len(self.trail_lim) == 0:
                    self.unsat = True
                    return False
                learnt, back = self._analyze(confl)
                # never backtrack into the middle of the assumption prefix harmfully:
                # assumptions are re-decided after backtracking
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(ci)
                    self.watches[learnt[1]].append(ci)
                    self._enqueue(learnt[0], ci)
                self.inc *= 1.05
                conflicts_left -= 1
                steps += 1
                if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
                    self._backtrack(0)
                    return None
                continue
            if conflicts_left <= 0:
                restart += 1
                conflicts_left = 100 * _luby(restart)
                self._backtrack(0)
                continue
            # assumptions first
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                a = assumptions[lvl]
                va = self._val(a)
                if va == -1:
                    self._backtrack(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if va == 0:
                    self._enqueue(a, -1)
                continue
            v = self._pick()
            if v == 0:
                self._model = list(self.assign)
                self._backtrack(0)
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] > 0 else -v, -1)

    def value(self, lit: int) -> bool:
        v = abs(lit)
        a = self._model[v] if v < len(self._model) else 0
        return (a if lit > 0 else -a) == 1
