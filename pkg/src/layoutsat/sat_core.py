"""Incremental CDCL SAT solver.

Literals are DIMACS-style signed integers: ``v`` is the positive occurrence of
variable ``v >= 1`` and ``-v`` its negation.  Internally a literal is stored as
the code ``2*v + (lit < 0)`` so that negation is ``code ^ 1`` and per-literal
tables are plain lists.

The search loop is the usual one: two-watched-literal unit propagation,
EVSIDS branching with phase saving, first-UIP conflict analysis,
non-chronological backjumping, Luby restarts and LBD-based clause database
reduction.  Assumptions are handled as pseudo-decisions occupying the lowest
decision levels.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Clause",
    "SolverConfig",
    "SolveOutcome",
    "Solver",
    "Enumeration",
    "luby",
    "restart_interval",
    "enumerate_models",
    "splitmix64",
]

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"

_MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def luby(i: int) -> int:
    """The ``i``-th term (1-based) of the Luby sequence 1, 1, 2, 1, 1, 2, 4, 1, ..."""
    if i < 1:
        raise ValueError(f"luby index must be >= 1, got {i}")
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


def restart_interval(restart_count: int, luby_base: int) -> int:
    """Conflicts allowed in restart interval number ``restart_count`` (1-based)."""
    return luby(restart_count) * luby_base


def _code(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def _lit(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


class Clause:
    __slots__ = ("lits", "learned", "lbd", "activity", "deleted")

    def __init__(self, lits: list[int], learned: bool = False, lbd: int = 0):
        self.lits = lits
        self.learned = learned
        self.lbd = lbd
        self.activity = 0.0
        self.deleted = False

    @property
    def literals(self) -> list[int]:
        return [_lit(c) for c in self.lits]

    def __len__(self):
        return len(self.lits)

    def __repr__(self):
        tag = f", lbd={self.lbd}" if self.learned else ""
        return f"Clause({self.literals}{tag})"


@dataclass
class SolverConfig:
    decay_factor: float = 0.95
    luby_base: int = 64
    clause_db_reduce_interval: int = 2000
    glue_lbd_keep_threshold: int = 2
    default_polarity: bool = False
    seed: int = 0
    conflict_limit: int | None = None
    time_limit: float | None = None
    # debugging aid: assert the learning/watch invariants as the search runs
    check_invariants: bool = False

    def __post_init__(self):
        if not 0.0 < self.decay_factor < 1.0:
            raise ValueError("decay_factor must lie in (0, 1)")
        if self.luby_base < 1:
            raise ValueError("luby_base must be >= 1")
        if self.clause_db_reduce_interval < 1:
            raise ValueError("clause_db_reduce_interval must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class SolveOutcome:
    status: str
    model: dict[int, bool] | None = None
    stats: dict[str, int] = field(default_factory=dict)
    budget: str | None = None  # "time" or "conflicts" when status is UNKNOWN

    @property
    def sat(self) -> bool:
        return self.status == SAT


class Solver:
    """A single-threaded CDCL solver; not safe to share while solving."""

    RESCALE_LIMIT = 1e100
    # power of two close to 1e-100, so rescaling is exact in binary floating point
    RESCALE_FACTOR = 2.0 ** -332
    CLAUSE_RESCALE_LIMIT = 1e20
    CLAUSE_DECAY = 0.999

    def __init__(self, config: SolverConfig | None = None, n_vars: int = 0):
        self.config = config or SolverConfig()
        self.ok = True
        self.clauses: list[Clause] = []
        self.learnts: list[Clause] = []
        self._nvars = 0
        self._vals: list[int] = [0, 0]          # per literal code: 1 true, -1 false, 0 unset
        self._level: list[int] = [0]
        self._reason: list[Clause | None] = [None]
        self._phase: list[bool | None] = [None]
        self._seen: list[bool] = [False]
        self.activity: list[float] = [0.0]
        # per literal code: (blocker code, clause) for clauses watching it
        self._watches: list[list[tuple[int, Clause]]] = [[], []]
        self._heap: list[tuple[float, int]] = []
        self.trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self.var_inc = 1.0
        self._cla_inc = 1.0
        self._rng = self.config.seed
        self.restart_count = 1
        self._since_restart = 0
        self._next_reduce = self.config.clause_db_reduce_interval
        self.stats = dict(conflicts=0, decisions=0, propagations=0, restarts=0,
                          learned_count=0, deleted_count=0, max_lbd=0)
        self.decision_log: list[int] | None = None
        # flat copy of the original clauses for vectorised model checks
        self._flat_codes = np.zeros(0, dtype=np.int64)
        self._flat_starts = np.zeros(0, dtype=np.int64)
        self._flat_count = 0
        self.ensure_vars(n_vars)

    # -- variables ---------------------------------------------------------
    @property
    def n_vars(self) -> int:
        return self._nvars

    def new_var(self) -> int:
        self.ensure_vars(self._nvars + 1)
        return self._nvars

    def ensure_vars(self, n: int) -> None:
        while self._nvars < n:
            self._nvars += 1
            v = self._nvars
            self._vals += [0, 0]
            self._level.append(0)
            self._reason.append(None)
            self._phase.append(None)
            self._seen.append(False)
            self._watches += [[], []]
            act = 0.0
            if self.config.seed:
                # tiny deterministic jitter, always below one bump
                self._rng, r = splitmix64(self._rng)
                act = (r >> 11) * 2.0 ** -53 * 1e-6
            self.activity.append(act)
            heapq.heappush(self._heap, (-act, v))

    # -- clause ingestion --------------------------------------------------
    def add_clause(self, literals: Iterable[int]) -> bool:
        """Add an original clause at decision level 0.

        Returns False when the clause is immediately conflicting, after which
        the solver is permanently unsatisfiable.
        """
        if self._trail_lim:
            self._cancel_until(0)
        codes: list[int] = []
        seen = set()
        for lit in literals:
            lit = int(lit)
            if lit == 0:
                raise ValueError("0 is not a literal")
            self.ensure_vars(abs(lit))
            c = _code(lit)
            if c ^ 1 in seen:
                return self.ok  # tautology
            if c not in seen:
                seen.add(c)
                codes.append(c)
        if not self.ok:
            return False
        vals = self._vals
        # literals fixed at level 0 simplify the clause
        if any(vals[c] == 1 for c in codes):
            clause = Clause(codes)
            self.clauses.append(clause)
            if len(codes) >= 2:
                self._order_watches(clause)
                self._attach(clause)
            return True
        free = [c for c in codes if vals[c] == 0]
        if not free:
            self.ok = False
            return False
        clause = Clause(codes)
        self.clauses.append(clause)
        if len(codes) >= 2:
            self._order_watches(clause)
            self._attach(clause)
        if len(free) == 1:
            self._enqueue(free[0], None)
            if self.propagate() is not None:
                self.ok = False
                return False
        return True

    def add_clauses(self, clauses: Iterable[Iterable[int]]) -> bool:
        for c in clauses:
            self.add_clause(c)
        return self.ok

    def _order_watches(self, clause: Clause) -> None:
        # put non-false literals first so the watches are valid at level 0
        vals = self._vals
        clause.lits.sort(key=lambda c: vals[c] == -1)

    def _attach(self, clause: Clause) -> None:
        a, b = clause.lits[0], clause.lits[1]
        self._watches[a].append((b, clause))
        self._watches[b].append((a, clause))

    # -- assignment --------------------------------------------------------
    def decision_level(self) -> int:
        return len(self._trail_lim)

    def value(self, lit: int) -> bool | None:
        v = self._vals[_code(lit)]
        return None if v == 0 else v == 1

    def level_of(self, var: int) -> int:
        return self._level[var]

    def _enqueue(self, code: int, reason: Clause | None) -> None:
        vals = self._vals
        vals[code] = 1
        vals[code ^ 1] = -1
        v = code >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self.trail.append(code)

    def decide(self, lit: int) -> None:
        """Open a new decision level and assign ``lit``."""
        c = _code(lit)
        if self._vals[c] != 0:
            raise ValueError(f"literal {lit} already assigned")
        self._trail_lim.append(len(self.trail))
        self._enqueue(c, None)

    def _cancel_until(self, level: int, requeue: bool = True) -> None:
        if len(self._trail_lim) <= level:
            return
        vals, phase, reason, act, heap = self._vals, self._phase, self._reason, self.activity, self._heap
        trail = self.trail
        stop = self._trail_lim[level]
        for i in range(len(trail) - 1, stop - 1, -1):
            c = trail[i]
            v = c >> 1
            vals[c] = 0
            vals[c ^ 1] = 0
            reason[v] = None
            phase[v] = not (c & 1)
            if requeue:
                heapq.heappush(heap, (-act[v], v))
        del trail[stop:]
        del self._trail_lim[level:]
        self._qhead = min(self._qhead, len(trail))
        if len(heap) > 8 * self._nvars + 64:
            self._rebuild_heap()

    def backjump(self, level: int) -> None:
        self._cancel_until(level)

    # -- propagation -------------------------------------------------------
    def propagate(self) -> Clause | None:
        """Unit propagation to fixpoint; returns a falsified clause or None."""
        vals, watches, trail = self._vals, self._watches, self.trail
        level, reason = self._level, self._reason
        dl = len(self._trail_lim)
        n_props = 0
        conflict = None
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            n_props += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                w = ws[i]
                i += 1
                if vals[w[0]] == 1:
                    ws[j] = w
                    j += 1
                    continue
                c = w[1]
                lits = c.lits
                if lits[0] == false_lit:
                    lits[0] = lits[1]
                    lits[1] = false_lit
                first = lits[0]
                if vals[first] == 1:
                    ws[j] = (first, c)
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    q = lits[k]
                    if vals[q] != -1:
                        lits[1] = q
                        lits[k] = false_lit
                        watches[q].append((first, c))
                        break
                else:
                    ws[j] = (first, c)
                    j += 1
                    if vals[first] == -1:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                    else:
                        vals[first] = 1
                        vals[first ^ 1] = -1
                        v = first >> 1
                        level[v] = dl
                        reason[v] = c
                        trail.append(first)
            del ws[j:]
            if conflict is not None:
                self._qhead = len(trail)
                break
        self.stats["propagations"] += n_props
        if self.config.check_invariants and conflict is None:
            self._check_watch_invariant()
        return conflict

    # -- conflict analysis -------------------------------------------------
    def analyze_conflict(self, conflict: Clause) -> tuple[Clause, int]:
        """First-UIP analysis of ``conflict``.

        Returns the learned clause (UIP literal first, not yet attached) and
        the backjump level.  Every variable met during the analysis is
        bumped, and the increment is then grown once (EVSIDS decay).
        """
        dl = len(self._trail_lim)
        if dl == 0:
            raise ValueError("conflict at decision level 0: formula is UNSAT")
        seen, level, reason, trail = self._seen, self._level, self._reason, self.trail
        learnt = [0]
        bumped: list[int] = []
        path = 0
        p = -1
        idx = len(trail) - 1
        c = conflict
        while True:
            if c.learned:
                self._bump_clause(c)
            lits = c.lits
            for k in range(0 if p == -1 else 1, len(lits)):
                q = lits[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    bumped.append(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            c = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        for v in bumped:
            seen[v] = False
        self.bump_and_decay(bumped)

        bj = 0
        if len(learnt) > 1:
            best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bj = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        clause = Clause(learnt, learned=True, lbd=lbd)
        if self.config.check_invariants:
            self._check_learned(clause, dl)
        return clause, bj

    def _learn(self, clause: Clause, bj: int) -> None:
        self._cancel_until(bj)
        self.stats["learned_count"] += 1
        self.stats["max_lbd"] = max(self.stats["max_lbd"], clause.lbd)
        if len(clause.lits) == 1:
            self._enqueue(clause.lits[0], None)
            return
        self.learnts.append(clause)
        self._attach(clause)
        self._bump_clause(clause)
        self._enqueue(clause.lits[0], clause)
        if self.config.check_invariants:
            vals = self._vals
            assert all(vals[q] == -1 for q in clause.lits[1:]), "learned clause not unit after backjump"

    # -- VSIDS -------------------------------------------------------------
    def bump_and_decay(self, variables: Iterable[int]) -> None:
        act, heap, inc = self.activity, self._heap, self.var_inc
        rescale = False
        for v in variables:
            a = act[v] + inc
            act[v] = a
            heapq.heappush(heap, (-a, v))
            if a > self.RESCALE_LIMIT:
                rescale = True
        if rescale:
            self.rescale_activities(self.RESCALE_FACTOR)
        self.var_inc /= self.config.decay_factor

    def rescale_activities(self, factor: float) -> None:
        act = self.activity
        for v in range(1, self._nvars + 1):
            act[v] *= factor
        self.var_inc *= factor
        self._rebuild_heap()

    def _rebuild_heap(self) -> None:
        vals, act = self._vals, self.activity
        self._heap = [(-act[v], v) for v in range(1, self._nvars + 1) if vals[v << 1] == 0]
        heapq.heapify(self._heap)

    def _pick_code(self) -> int | None:
        heap, vals, act = self._heap, self._vals, self.activity
        while heap:
            na, v = heap[0]
            if vals[v << 1] != 0 or -na != act[v]:
                heapq.heappop(heap)
                continue
            ph = self._phase[v]
            if ph is None:
                ph = self.config.default_polarity
            return (v << 1) | (not ph)
        return None

    def pick_branch(self) -> int | None:
        """Unassigned variable of maximal activity (lowest index on ties),
        with its saved phase; None when everything is assigned."""
        code = self._pick_code()
        return None if code is None else _lit(code)

    def _bump_clause(self, c: Clause) -> None:
        c.activity += self._cla_inc
        if c.activity > self.CLAUSE_RESCALE_LIMIT:
            for d in self.learnts:
                d.activity *= 1e-20
            self._cla_inc *= 1e-20

    # -- clause database ---------------------------------------------------
    def _locked(self, c: Clause) -> bool:
        first = c.lits[0]
        return self._vals[first] == 1 and self._reason[first >> 1] is c

    def reduce_clause_db(self) -> int:
        """Delete the worse half of the non-glue, unlocked learned clauses."""
        glue = self.config.glue_lbd_keep_threshold
        candidates = [c for c in self.learnts if c.lbd > glue and not self._locked(c)]
        candidates.sort(key=lambda c: (-c.lbd, c.activity))
        doomed = candidates[: len(candidates) // 2]
        for c in doomed:
            c.deleted = True
        if doomed:
            self.learnts = [c for c in self.learnts if not c.deleted]
            for ws in self._watches:
                if ws:
                    ws[:] = [w for w in ws if not w[1].deleted]
        self.stats["deleted_count"] += len(doomed)
        return len(doomed)

    # -- search ------------------------------------------------------------
    def solve(self, assumptions: Sequence[int] = ()) -> SolveOutcome:
        if not self.ok:
            return SolveOutcome(UNSAT, stats=dict(self.stats))
        for a in assumptions:
            self.ensure_vars(abs(a))
        out = self._run([_code(a) for a in assumptions])
        self._cancel_until(0)
        return out

    def _run(self, assume: list[int]) -> SolveOutcome:
        limit = self.config.time_limit
        deadline = None if limit is None else time.perf_counter() + limit
        status, budget = self._search(assume, deadline)
        model = None
        if status == SAT:
            vals = self._vals
            model = {v: vals[v << 1] == 1 for v in range(1, self._nvars + 1)}
            if not self._all_satisfied():
                raise AssertionError(f"internal error: model falsifies {self.falsified_clause(model)!r}")
        return SolveOutcome(status, model, dict(self.stats), budget)

    def _add_blocking(self, literals: Iterable[int]) -> bool:
        """Add a clause falsified by the current total assignment, then
        backjump just far enough to make it unit (or unassigned) again."""
        codes = list(dict.fromkeys(_code(l) for l in literals))
        vals, level = self._vals, self._level
        if not codes or any(vals[c] != -1 for c in codes) or not self._trail_lim:
            return self.add_clause([_lit(c) for c in codes])
        codes.sort(key=lambda c: -level[c >> 1])
        clause = Clause(codes)
        self.clauses.append(clause)
        top = level[codes[0] >> 1]
        if top == 0:
            self.ok = False
            return False
        if len(codes) == 1:
            self._cancel_until(0)
            self._enqueue(codes[0], None)
            return True
        second = level[codes[1] >> 1]
        self._attach(clause)
        if second < top:
            self._cancel_until(second)
            self._enqueue(codes[0], clause)
        else:
            self._cancel_until(top - 1)
        return True

    def _all_satisfied(self) -> bool:
        """Every original clause has a true literal under the current trail."""
        if self._flat_count < len(self.clauses):
            new = self.clauses[self._flat_count:]
            sizes = np.fromiter((len(c.lits) for c in new), dtype=np.int64, count=len(new))
            codes = np.fromiter((q for c in new for q in c.lits), dtype=np.int64, count=int(sizes.sum()))
            offset = len(self._flat_codes)
            starts = offset + np.concatenate(([0], np.cumsum(sizes)[:-1]))
            self._flat_codes = np.concatenate((self._flat_codes, codes))
            self._flat_starts = np.concatenate((self._flat_starts, starts))
            self._flat_count = len(self.clauses)
        if not self._flat_count:
            return True
        true = np.asarray(self._vals, dtype=np.int8)[self._flat_codes] == 1
        return bool(np.logical_or.reduceat(true, self._flat_starts).all())

    def falsified_clause(self, model: dict[int, bool]) -> Clause | None:
        for c in self.clauses:
            for q in c.lits:
                if model[q >> 1] != bool(q & 1):
                    break
            else:
                return c
        return None

    def _search(self, assume: list[int], deadline: float | None) -> tuple[str, str | None]:
        cfg = self.config
        vals = self._vals
        stats = self.stats
        conflicts_here = 0
        restart_limit = restart_interval(self.restart_count, cfg.luby_base)
        log = self.decision_log
        while True:
            conflict = self.propagate()
            if conflict is not None:
                stats["conflicts"] += 1
                conflicts_here += 1
                self._since_restart += 1
                if not self._trail_lim:
                    self.ok = False
                    return UNSAT, None
                clause, bj = self.analyze_conflict(conflict)
                self._learn(clause, bj)
                self._cla_inc /= self.CLAUSE_DECAY
                if stats["conflicts"] >= self._next_reduce:
                    self._next_reduce += cfg.clause_db_reduce_interval
                    self.reduce_clause_db()
                if cfg.conflict_limit is not None and conflicts_here >= cfg.conflict_limit:
                    self._cancel_until(0)
                    return UNKNOWN, "conflicts"
                if deadline is not None and time.perf_counter() > deadline:
                    self._cancel_until(0)
                    return UNKNOWN, "time"
                continue

            if self._since_restart >= restart_limit:
                self._since_restart = 0
                self.restart_count += 1
                stats["restarts"] += 1
                restart_limit = restart_interval(self.restart_count, cfg.luby_base)
                self._cancel_until(0)
                continue

            nxt = -1
            while len(self._trail_lim) < len(assume):
                a = assume[len(self._trail_lim)]
                if vals[a] == 1:
                    self._trail_lim.append(len(self.trail))
                elif vals[a] == -1:
                    return UNSAT, None
                else:
                    nxt = a
                    break
            if nxt == -1:
                code = self._pick_code()
                if code is None:
                    return SAT, None
                nxt = code
                stats["decisions"] += 1
                if log is not None:
                    log.append(_lit(code))
                if deadline is not None and not stats["decisions"] & 255 \
                        and time.perf_counter() > deadline:
                    self._cancel_until(0)
                    return UNKNOWN, "time"
            self._trail_lim.append(len(self.trail))
            self._enqueue(nxt, None)

    # -- invariant checks (debug) -----------------------------------------
    def _check_learned(self, clause: Clause, dl: int) -> None:
        vals, level = self._vals, self._level
        assert all(vals[q] == -1 for q in clause.lits), "learned clause not falsified"
        at_dl = [q for q in clause.lits if level[q >> 1] == dl]
        assert len(at_dl) == 1 and at_dl[0] == clause.lits[0], "not a 1-UIP clause"
        assert clause.lbd >= 1

    def _check_watch_invariant(self) -> None:
        vals = self._vals
        for c in self.clauses + self.learnts:
            if len(c.lits) < 2 or c.deleted:
                continue
            if vals[c.lits[0]] == -1 and vals[c.lits[1]] == -1:
                assert any(vals[q] == 1 for q in c.lits), f"both watches false in {c!r}"

    def check_trail(self) -> None:
        """Assert that every implied trail entry is unit under its prefix."""
        vals = self._vals
        pos = {c >> 1: i for i, c in enumerate(self.trail)}
        for i, c in enumerate(self.trail):
            r = self._reason[c >> 1]
            if r is None:
                continue
            assert r.lits[0] == c
            for q in r.lits[1:]:
                assert vals[q] == -1 and pos[q >> 1] < i


@dataclass
class Enumeration:
    """Models found by ``enumerate_models``.

    Each model is the sorted tuple of projection variables it makes true;
    the projection variables missing from the tuple are false.
    """
    models: list[tuple[int, ...]]
    complete: bool
    budget: str | None = None
    projection: tuple[int, ...] = ()

    def as_dict(self, k: int) -> dict[int, bool]:
        on = set(self.models[k])
        return {v: v in on for v in self.projection}


def enumerate_models(
    solver: Solver,
    max_models: int,
    projection: Iterable[int],
    *,
    positive_only: bool = False,
    strategy: str = "blocking",
    time_limit: float | None = None,
) -> Enumeration:
    """Enumerate models that are pairwise distinct on ``projection``.

    ``strategy="blocking"`` (default) runs the CDCL search repeatedly and adds, after
    each model, the clause of negated projection literals the model makes
    true (with ``positive_only``, just the negated true ones: exact whenever
    the projection is governed by exactly-one constraints).  Those clauses
    stay in the solver, so every later descent pays for all earlier models.

    ``strategy="dfs"`` walks the same space chronologically:
    projection variables are decided lowest index first, true before false,
    and after each model or conflict the deepest decision not yet flipped is
    flipped.  This is blocking on the decision literals, with each blocking
    clause forgotten once its prefix is exhausted, so memory stays bounded
    by the search depth and the cost per model does not grow.  Variables
    outside the projection are completed by the same search but never
    enumerated.  Nothing is learned, which makes it the better choice for
    exhausting small, loosely constrained spaces and the worse one on
    tightly constrained instances; no clauses are added to the solver.
    """
    proj = sorted(set(int(v) for v in projection))
    if not proj:
        raise ValueError("projection must be nonempty")
    if max_models < 1:
        raise ValueError("max_models must be >= 1")
    if strategy == "dfs":
        return _enumerate_dfs(solver, max_models, proj, time_limit)
    if strategy != "blocking":
        raise ValueError(f"unknown enumeration strategy {strategy!r}")
    start = time.perf_counter()
    saved_limit = solver.config.time_limit
    models: list[tuple[int, ...]] = []
    solver._cancel_until(0)
    try:
        while len(models) < max_models and solver.ok:
            if time_limit is not None:
                left = time_limit - (time.perf_counter() - start)
                if left <= 0:
                    return Enumeration(models, False, "time", tuple(proj))
                solver.config.time_limit = left if saved_limit is None else min(left, saved_limit)
            out = solver._run([])
            if out.status == UNSAT:
                return Enumeration(models, True, None, tuple(proj))
            if out.status == UNKNOWN:
                return Enumeration(models, False, out.budget, tuple(proj))
            on = tuple(v for v in proj if out.model[v])
            models.append(on)
            if positive_only:
                block = [-v for v in on]
            else:
                block = [-v if out.model[v] else v for v in proj]
            solver._add_blocking(block)
        return Enumeration(models, not solver.ok, None, tuple(proj))
    finally:
        solver.config.time_limit = saved_limit
        solver._cancel_until(0)


def _enumerate_dfs(solver: Solver, max_models: int, proj: list[int],
                   time_limit: float | None) -> Enumeration:
    solver.ensure_vars(proj[-1])
    proj_t = tuple(proj)
    deadline = None if time_limit is None else time.perf_counter() + time_limit
    models: list[tuple[int, ...]] = []
    if not solver.ok:
        return Enumeration(models, True, None, proj_t)
    solver._cancel_until(0)
    vals = solver._vals
    in_proj = bytearray(solver.n_vars + 1)
    for v in proj:
        in_proj[v] = 1
    others = [v for v in range(1, solver.n_vars + 1) if not in_proj[v]]
    # one entry per open level: (decision code, flipped?, projection?, scan position)
    levels: list[tuple[int, bool, bool, int]] = []
    stats = solver.stats
    nodes = 0

    def open_level(code, flipped, is_proj, pos):
        levels.append((code, flipped, is_proj, pos))
        solver._trail_lim.append(len(solver.trail))
        solver._enqueue(code, None)

    def flip(projection_only: bool) -> bool:
        # close levels until the deepest unflipped one (of the right kind), flip it
        while levels:
            code, flipped, is_proj, pos = levels.pop()
            solver._cancel_until(len(levels), requeue=False)  # the heap is rebuilt at the end
            if not flipped and (is_proj or not projection_only):
                open_level(code ^ 1, True, is_proj, pos)
                return True
        return False

    try:
        if solver.propagate() is not None:
            solver.ok = False
            return Enumeration(models, True, None, proj_t)
        while True:
            nodes += 1
            if deadline is not None and not nodes & 1023 and time.perf_counter() > deadline:
                return Enumeration(models, False, "time", proj_t)
            if solver.propagate() is not None:
                stats["conflicts"] += 1
                if not flip(False):
                    return Enumeration(models, True, None, proj_t)
                continue
            # next unassigned projection variable, scanning on from the last level's position
            pos = 0
            for lev in reversed(levels):
                if lev[2]:
                    pos = lev[3] + 1
                    break
            while pos < len(proj) and vals[proj[pos] << 1] != 0:
                pos += 1
            if pos < len(proj):
                stats["decisions"] += 1
                open_level(proj[pos] << 1, False, True, pos)  # true first
                continue
            free = next((v for v in others if vals[v << 1] == 0), None)
            if free is not None:
                stats["decisions"] += 1
                ph = solver._phase[free]
                ph = solver.config.default_polarity if ph is None else ph
                open_level((free << 1) | (not ph), False, False, -1)
                continue
            if not solver._all_satisfied():
                raise AssertionError("internal error: enumerated assignment falsifies a clause")
            models.append(tuple(v for v in proj if vals[v << 1] == 1))
            if len(models) >= max_models:
                return Enumeration(models, False, None, proj_t)
            if not flip(True):
                return Enumeration(models, True, None, proj_t)
    finally:
        del levels[:]
        solver._cancel_until(0, requeue=False)
        solver._rebuild_heap()
