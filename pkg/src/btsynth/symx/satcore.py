"""A small CDCL SAT solver: two-watched literals, first-UIP learning,
activity-driven decisions with phase saving, geometric restarts.

Vars are 1-based ints; literals are signed ints. The solver is built fresh
per query (no incremental interface) and is deterministic: ties in the
decision heuristic break on variable index.
"""

from __future__ import annotations

import time
from heapq import heappop, heappush


class SatTimeout(Exception):
    pass


class SatSolver:
    def __init__(self):
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.value: list[int] = [0]  # index by var: 0 unknown, 1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[int | None] = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [False]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.ok = True
        self.var_inc = 1.0
        self._heap: list[tuple[float, int]] = []

    # -- variables and clauses ------------------------------------------------

    def new_var(self) -> int:
        self.value.append(0)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        v = len(self.value) - 1
        heappush(self._heap, (0.0, v))
        return v

    def _lit_value(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, lits: list[int]) -> None:
        if not self.ok:
            return
        seen: set[int] = set()
        out: list[int] = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            val = self._lit_value(lit)
            if val == 1 and self.level[abs(lit)] == 0:
                return  # already satisfied at top level
            if val == -1 and self.level[abs(lit)] == 0:
                continue  # permanently false literal
            seen.add(lit)
            out.append(lit)
        if not out:
            self.ok = False
            return
        if len(out) == 1:
            if not self._enqueue(out[0], None):
                self.ok = False
            return
        self._attach(out)

    def _attach(self, lits: list[int]) -> int:
        idx = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(idx)
        self.watches.setdefault(lits[1], []).append(idx)
        return idx

    # -- trail ------------------------------------------------------------------

    def _enqueue(self, lit: int, reason: int | None) -> bool:
        val = self._lit_value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _propagate(self) -> int | None:
        """Returns a conflicting clause index, or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            watchers = self.watches.get(false_lit)
            if not watchers:
                continue
            kept: list[int] = []
            i = 0
            while i < len(watchers):
                ci = watchers[i]
                i += 1
                clause = self.clauses[ci]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._lit_value(first) == 1:
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self._lit_value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(clause[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if not self._enqueue(first, ci):
                    kept.extend(watchers[i:])
                    self.watches[false_lit] = kept
                    return ci
            self.watches[false_lit] = kept
        return None

    # -- learning ----------------------------------------------------------------

    def _bump(self, v: int):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, len(self.activity)):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heappush(self._heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        learnt: list[int] = [0]  # slot 0 for the asserting literal
        seen: set[int] = set()
        counter = 0
        p: int | None = None
        index = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            clause = self.clauses[confl] if confl is not None else []
            for q in clause:
                if p is not None and q == p:
                    continue  # reason clauses carry the resolved literal itself
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self._bump(v)
                if self.level[v] == cur_level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[index]) not in seen:
                index -= 1
            p = self.trail[index]
            confl = self.reason[abs(p)]
            seen.discard(abs(p))
            index -= 1
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[1:])
        # watched positions: asserting literal first, a max-level literal second
        for k in range(1, len(learnt)):
            if self.level[abs(learnt[k])] == back:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return learnt, back

    def _backtrack(self, target: int):
        while len(self.trail_lim) > target:
            limit = self.trail_lim.pop()
            while len(self.trail) > limit:
                lit = self.trail.pop()
                v = abs(lit)
                self.phase[v] = lit > 0
                self.value[v] = 0
                self.reason[v] = None
                heappush(self._heap, (-self.activity[v], v))
        self.qhead = min(self.qhead, len(self.trail))

    def _decide(self) -> int | None:
        while self._heap:
            _, v = heappop(self._heap)
            if self.value[v] == 0:
                return v
        for v in range(1, len(self.value)):
            if self.value[v] == 0:
                return v
        return None

    # -- main loop ------------------------------------------------------------------

    def solve(self, deadline: float | None = None) -> bool:
        if not self.ok:
            return False
        if self._propagate() is not None:
            self.ok = False
            return False
        conflicts_total = 0
        restart_limit = 100.0
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts_total += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], None):
                        self.ok = False
                        return False
                else:
                    ci = self._attach(learnt)
                    if not self._enqueue(learnt[0], ci):
                        self.ok = False
                        return False
                self.var_inc *= 1.05
                if deadline is not None and conflicts_total % 128 == 0:
                    if time.monotonic() > deadline:
                        raise SatTimeout()
                if since_restart >= restart_limit:
                    since_restart = 0
                    restart_limit *= 1.5
                    self._backtrack(0)
                continue
            v = self._decide()
            if v is None:
                return True
            if deadline is not None and time.monotonic() > deadline:
                raise SatTimeout()
            self.trail_lim.append(len(self.trail))
            lit = v if self.phase[v] else -v
            self._enqueue(lit, None)

    def model_value(self, v: int) -> bool:
        return self.value[v] == 1
