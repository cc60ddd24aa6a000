"""Exact and hybrid minimisation of the weighted Manhattan-distance objective.

``branch_and_bound`` is a depth-first search that places one machine per
level.  With ``branching="index"`` machines go in index order into free slots
in row-major order; the default ``"guided"`` order places tightly linked
machines first and tries the cheapest slots first.  A node is fathomed when
its lower bound reaches the incumbent (``lb >= ub``); complete placements that
beat the incumbent replace it.  Both orders, and the bound, depend on the
partial placement alone, so seeding the search with a feasible hint can only
remove nodes, never add them.

The two hybrids put the CDCL solver in front of the search: the warm start
uses one SAT model as the initial incumbent, deep enumeration samples many
models and keeps the cheapest.
"""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Mapping

import numpy as np

from .cnf_encoder import EncodingConfig, SymmetryMode, decode_model, encode_feasibility, symmetry_slots
from .layout_model import Instance, InstanceError, Layout, evaluate_objective, manhattan_distance, validate_layout
from .sat_core import Solver, SolverConfig, enumerate_models

__all__ = [
    "Status",
    "Bound",
    "Branching",
    "branching_order",
    "OptimizeResult",
    "lower_bound",
    "completion_bound",
    "branch_and_bound",
    "warm_start_optimize",
    "deep_enumeration_optimize",
    "brute_force_oracle",
    "ORACLE_MAX_SLOTS",
]

log = logging.getLogger(__name__)

ORACLE_MAX_SLOTS = 9


class Status(str, enum.Enum):
    OPT = "OPT"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    UNKNOWN = "UNKNOWN"


class Branching(str, enum.Enum):
    INDEX = "index"    # machines by index, slots row-major
    GUIDED = "guided"  # most-connected machines first, cheapest slots first


class Bound(str, enum.Enum):
    PLACED = "placed"          # cost of fully placed soft pairs only
    COMPLETION = "completion"  # plus a distance floor for every unfinished pair


@dataclass
class OptimizeResult:
    status: Status
    best_layout: Layout | None = None
    best_objective: int | None = None
    nodes_explored: int = 0
    nodes_pruned: int = 0
    runtime: float = 0.0
    hint_cost: int | None = None
    models_enumerated: int = 0
    feasible_count: int | None = None
    budget: str | None = None
    timings: dict[str, float] = field(default_factory=dict)
    sat_stats: dict[str, int] = field(default_factory=dict)


# -- bounds -----------------------------------------------------------------------

def lower_bound(instance: Instance, partial: Mapping[int, int]) -> int:
    """Cost of the soft pairs whose endpoints are both placed."""
    g = instance.grid
    return sum(w * manhattan_distance(g, partial[i], partial[k])
               for i, k, w in instance.soft_pairs if i in partial and k in partial)


def completion_bound(instance: Instance, partial: Mapping[int, int]) -> int:
    """``lower_bound`` plus what every unfinished soft pair must still cost.

    Two machines never share a slot, so an unfinished pair ends at distance
    at least 1.  A placed machine whose slot has ``f`` free neighbours can
    have at most ``f`` of its unplaced partners next to it; the others are at
    distance at least 2, and the cheapest of them are charged the extra unit.
    """
    g = instance.grid
    used = set(partial.values())
    lb = 0
    waiting: dict[int, list[int]] = {}
    for i, k, w in instance.soft_pairs:
        pi, pk = i in partial, k in partial
        if pi and pk:
            lb += w * manhattan_distance(g, partial[i], partial[k])
        else:
            lb += w
            if pi or pk:
                waiting.setdefault(partial[i] if pi else partial[k], []).append(w)
    for s, ws in waiting.items():
        over = len(ws) - sum(1 for t in g.neighbors(s) if t not in used)
        if over > 0:
            lb += sum(sorted(ws)[:over])
    return lb


# -- branch and bound -----------------------------------------------------------

def branching_order(instance: Instance) -> list[int]:
    """Static machine order for guided branching.

    Greedy: next is the machine most tightly linked to those already
    ordered (adjacency links count 10, soft links their weight, separation
    links 1), ties broken by total link strength and then by index.
    Unconstrained machines therefore come last.
    """
    n = instance.n_machines
    link = [dict() for _ in range(n)]

    def add(i, k, w):
        link[i][k] = link[i].get(k, 0) + w
        link[k][i] = link[k].get(i, 0) + w

    for i, k in instance.hard_adjacency:
        add(i, k, 10)
    for i, k, w in instance.soft_pairs:
        add(i, k, w)
    for i, k in instance.hard_separation:
        add(i, k, 1)
    total = [sum(d.values()) for d in link]
    tie = [len(instance.grid.floors[instance.floor_rules[m]]) if m in instance.floor_rules else n
           for m in range(n)]
    pull = [0] * n
    done = [False] * n
    order = []
    for _ in range(n):
        m = max((m for m in range(n) if not done[m]),
                key=lambda m: (pull[m], total[m], -tie[m], -m))
        done[m] = True
        order.append(m)
        for o, w in link[m].items():
            pull[o] += w
    return order


class _OutOfBudget(Exception):
    pass


def branch_and_bound(
    instance: Instance,
    hint: Layout | None = None,
    *,
    time_limit: float | None = None,
    node_limit: int | None = None,
    bound: Bound | str = Bound.COMPLETION,
    branching: Branching | str = Branching.GUIDED,
    symmetry: SymmetryMode | str = SymmetryMode.NONE,
) -> OptimizeResult:
    """Depth-first branch and bound over feasible placements.

    ``hint`` must be a valid layout to be used as the initial incumbent;
    an invalid hint is ignored and the search starts cold.  The machine
    order, and the slot order at each node, depend only on the instance and
    the partial placement, so warm and cold runs walk the same tree.
    """
    start = time.perf_counter()
    bound = Bound(bound)
    guided = Branching(branching) is Branching.GUIDED
    grid = instance.grid
    n = instance.n_machines
    n_slots = grid.n_slots
    md = [[0] * n_slots for _ in range(n_slots)]
    for j in grid.unblocked:
        for l in grid.unblocked:
            md[j][l] = manhattan_distance(grid, j, l)
    nbrs = [grid.neighbors(j) if j not in grid.blocked else [] for j in range(n_slots)]

    soft = [[] for _ in range(n)]
    for i, k, w in instance.soft_pairs:
        soft[i].append((k, w))
        soft[k].append((i, w))
    adj = [[] for _ in range(n)]
    for i, k in instance.hard_adjacency:
        adj[i].append(k)
        adj[k].append(i)
    sep = [[] for _ in range(n)]
    for i, k in instance.hard_separation:
        sep[i].append(k)
        sep[k].append(i)
    allowed = [list(grid.unblocked) for _ in range(n)]
    for m, f in instance.floor_rules.items():
        allowed[m] = [j for j in allowed[m] if j in grid.floors[f]]
    if n:
        keep = set(symmetry_slots(instance, symmetry))
        allowed[0] = [j for j in allowed[0] if j in keep]
    pairs = instance.soft_pairs
    total_w = sum(w for _, _, w in pairs)
    completion = bound is Bound.COMPLETION

    slot_of = [-1] * n
    occupied = [j in grid.blocked for j in range(n_slots)]
    free_nb = [len(nbrs[j]) for j in range(n_slots)]
    open_adj = [len(adj[m]) for m in range(n)]
    occupant = [-1] * n_slots

    result = OptimizeResult(Status.UNKNOWN)
    ub = math.inf
    best: tuple[int, ...] | None = None
    if hint is not None:
        if len(hint) == n and not validate_layout(instance, hint):
            ub = evaluate_objective(instance, hint)
            best = hint.slot_of
            result.hint_cost = ub
        else:
            log.info("hint rejected: not a valid layout, starting cold")

    deadline = None if time_limit is None else start + time_limit
    explored = pruned = 0

    def feasible(m: int, s: int) -> bool:
        row = md[s]
        for o in adj[m]:
            t = slot_of[o]
            if t >= 0 and row[t] != 1:
                return False
        for o in sep[m]:
            t = slot_of[o]
            if t >= 0 and row[t] == 1:
                return False
        # after placing m at s, every placed machine still needs room for
        # its unplaced adjacency partners around its slot
        if open_adj[m] > free_nb[s]:
            return False
        for t in nbrs[s]:
            u = occupant[t]
            if u >= 0:
                need = open_adj[u] - (1 if m in adj[u] else 0)
                if need > free_nb[t] - 1:
                    return False
        return True

    def node_bound(placed_cost: int, placed_w: int) -> int:
        if not completion:
            return placed_cost
        lb = placed_cost + total_w - placed_w
        waiting: dict[int, list[int]] = {}
        for i, k, w in pairs:
            si, sk = slot_of[i], slot_of[k]
            if (si >= 0) != (sk >= 0):
                t = si if si >= 0 else sk
                if t in waiting:
                    waiting[t].append(w)
                else:
                    waiting[t] = [w]
        for t, ws in waiting.items():
            over = len(ws) - free_nb[t]
            if over > 0:
                ws.sort()
                lb += sum(ws[:over])
        return lb

    order = branching_order(instance) if guided else list(range(n))

    def visit(depth: int, placed_cost: int, placed_w: int) -> None:
        nonlocal ub, best, explored, pruned
        explored += 1
        if not explored & 1023:
            if deadline is not None and time.perf_counter() > deadline:
                raise _OutOfBudget("time")
        if node_limit is not None and explored > node_limit:
            raise _OutOfBudget("nodes")
        if node_bound(placed_cost, placed_w) >= ub:
            pruned += 1
            return
        if depth == n:
            ub = placed_cost
            best = tuple(slot_of)
            return
        m = order[depth]
        children = []
        for s in allowed[m]:
            if occupied[s] or not feasible(m, s):
                continue
            delta = wsum = 0
            row = md[s]
            for o, w in soft[m]:
                t = slot_of[o]
                if t >= 0:
                    delta += w * row[t]
                    wsum += w
            children.append((delta, s, wsum))
        if guided:
            children.sort()
        else:
            children.sort(key=lambda ch: ch[1])
        for delta, s, wsum in children:
            slot_of[m] = s
            occupied[s] = True
            occupant[s] = m
            for t in nbrs[s]:
                free_nb[t] -= 1
            for o in adj[m]:
                open_adj[o] -= 1
            visit(depth + 1, placed_cost + delta, placed_w + wsum)
            for o in adj[m]:
                open_adj[o] += 1
            for t in nbrs[s]:
                free_nb[t] += 1
            occupant[s] = -1
            occupied[s] = False
            slot_of[m] = -1

    try:
        visit(0, 0, 0)
        result.status = Status.OPT if best is not None else Status.INFEASIBLE
    except _OutOfBudget as exc:
        result.budget = str(exc)
        result.status = Status.FEASIBLE if best is not None else Status.UNKNOWN
    if best is not None:
        result.best_layout = Layout(best)
        result.best_objective = int(ub)
    result.nodes_explored = explored
    result.nodes_pruned = pruned
    result.runtime = time.perf_counter() - start
    result.timings["search"] = result.runtime
    return result


# -- hybrids --------------------------------------------------------------------------

def _load_solver(instance: Instance, encoding: EncodingConfig | None,
                 solver_config: SolverConfig | None):
    formula, vm = encode_feasibility(instance, encoding)
    solver = Solver(solver_config or SolverConfig(), formula.n_vars)
    solver.add_clauses(formula.clauses)
    return solver, vm


def warm_start_optimize(
    instance: Instance,
    *,
    time_limit: float | None = 60.0,
    feas_time_limit: float | None = 10.0,
    node_limit: int | None = None,
    bound: Bound | str = Bound.COMPLETION,
    branching: Branching | str = Branching.GUIDED,
    encoding: EncodingConfig | None = None,
    solver_config: SolverConfig | None = None,
) -> OptimizeResult:
    """One CDCL solve for a feasible hint, then branch and bound seeded with it."""
    start = time.perf_counter()
    cfg = solver_config or SolverConfig()
    cfg = SolverConfig(**{**cfg.__dict__, "time_limit": feas_time_limit})
    solver, vm = _load_solver(instance, encoding, cfg)
    out = solver.solve()
    hint_time = time.perf_counter() - start
    if out.status == "UNSAT":
        return OptimizeResult(Status.INFEASIBLE, runtime=hint_time,
                              timings={"hint": hint_time, "search": 0.0}, sat_stats=out.stats)
    hint = decode_model(out.model, vm, instance) if out.status == "SAT" else None
    left = None if time_limit is None else max(0.0, time_limit - hint_time)
    res = branch_and_bound(instance, hint, time_limit=left, node_limit=node_limit, bound=bound,
                           branching=branching,
                           symmetry=(encoding or EncodingConfig()).symmetry_mode)
    res.timings["hint"] = hint_time
    res.sat_stats = out.stats
    res.runtime = time.perf_counter() - start
    return res


def deep_enumeration_optimize(
    instance: Instance,
    max_samples: int = 75_000,
    *,
    time_limit: float | None = 60.0,
    strategy: str = "blocking",
    encoding: EncodingConfig | None = None,
    solver_config: SolverConfig | None = None,
) -> OptimizeResult:
    """Enumerate up to ``max_samples`` feasible layouts and keep the cheapest.

    The result is OPT only when the enumeration exhausted the model space.
    Ties go to the earliest sample.
    """
    if max_samples < 1:
        raise ValueError("max_samples must be >= 1")
    start = time.perf_counter()
    solver, vm = _load_solver(instance, encoding, solver_config)
    projection = range(1, vm.n_primary + 1)
    left = None if time_limit is None else max(0.0, time_limit - (time.perf_counter() - start))
    enum = enumerate_models(solver, max_samples, projection, positive_only=True,
                            strategy=strategy, time_limit=left)
    enum_time = time.perf_counter() - start

    t1 = time.perf_counter()
    best = best_cost = None
    for on in enum.models:
        layout = decode_model(on, vm, instance)
        cost = evaluate_objective(instance, layout)
        if best_cost is None or cost < best_cost:
            best, best_cost = layout, cost
    select_time = time.perf_counter() - t1

    if best is None:
        status = Status.INFEASIBLE if enum.complete else Status.UNKNOWN
    else:
        status = Status.OPT if enum.complete else Status.FEASIBLE
    return OptimizeResult(
        status, best, best_cost,
        runtime=time.perf_counter() - start,
        models_enumerated=len(enum.models),
        budget=enum.budget,
        timings={"enumeration": enum_time, "selection": select_time},
        sat_stats=dict(solver.stats),
    )


# -- oracle ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _all_permutations(n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    return np.array(list(permutations(range(n))), dtype=np.int8)


def brute_force_oracle(instance: Instance) -> OptimizeResult:
    """Exhaustive minimum over every permutation (at most 9 free slots)."""
    start = time.perf_counter()
    grid = instance.grid
    free = np.array(grid.unblocked, dtype=np.int64)
    if len(free) > ORACLE_MAX_SLOTS:
        raise InstanceError(f"oracle limited to {ORACLE_MAX_SLOTS} free slots, got {len(free)}")
    perms = free[_all_permutations(len(free))]  # row p: slot of each machine
    rows, cols = perms // grid.cols, perms % grid.cols

    def dist(i, k):
        return np.abs(rows[:, i] - rows[:, k]) + np.abs(cols[:, i] - cols[:, k])

    ok = np.ones(len(perms), dtype=bool)
    for i, k in instance.hard_adjacency:
        ok &= dist(i, k) == 1
    for i, k in instance.hard_separation:
        ok &= dist(i, k) != 1
    for m, f in instance.floor_rules.items():
        ok &= np.isin(perms[:, m], sorted(grid.floors[f]))
    cost = np.zeros(len(perms), dtype=np.int64)
    for i, k, w in instance.soft_pairs:
        cost += w * dist(i, k)

    count = int(ok.sum())
    res = OptimizeResult(Status.INFEASIBLE, feasible_count=count, nodes_explored=len(perms))
    if count:
        idx = np.flatnonzero(ok)
        best = idx[np.argmin(cost[idx])]
        res.status = Status.OPT
        res.best_layout = Layout(tuple(int(s) for s in perms[best]))
        res.best_objective = int(cost[best])
    res.runtime = time.perf_counter() - start
    return res
