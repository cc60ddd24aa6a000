"""Reference implementations the tests compare against.

Nothing here imports the solver or the optimizer: the truth table, the
DPLL search and the permutation enumerator are written from scratch so a
shared bug cannot hide on both sides of a comparison.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

MASK64 = (1 << 64) - 1


# -- CNF ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _var_columns(n_vars: int) -> np.ndarray:
    """Row v-1: packed bits of variable v over all 2**n assignments."""
    idx = np.arange(1 << n_vars, dtype=np.uint32)
    cols = [np.packbits(((idx >> b) & 1).astype(bool), bitorder="little") for b in range(n_vars)]
    return np.stack(cols)


def truth_table_count(n_vars: int, clauses) -> int:
    """Number of satisfying assignments, by exhaustive bit-parallel evaluation."""
    if n_vars > 22:
        raise ValueError("truth table limited to 22 variables")
    if n_vars == 0:
        return 0 if any(len(c) == 0 for c in clauses) else 1
    cols = _var_columns(n_vars)
    acc = np.full(cols.shape[1], 0xFF, dtype=np.uint8)
    for clause in clauses:
        c = np.zeros_like(acc)
        for lit in clause:
            col = cols[abs(lit) - 1]
            c |= col if lit > 0 else ~col
        acc &= c
    if n_vars < 3:  # padding bits of the last byte
        acc &= (1 << (1 << n_vars)) - 1
    return int(np.unpackbits(acc).sum())


def dpll_sat(n_vars: int, clauses) -> bool:
    """Plain recursive DPLL with unit propagation; fine up to a few dozen vars."""

    def simplify(cls, lit):
        out = []
        for c in cls:
            if lit in c:
                continue
            if -lit in c:
                c = [x for x in c if x != -lit]
                if not c:
                    return None
            out.append(c)
        return out

    def rec(cls):
        while True:
            unit = next((c[0] for c in cls if len(c) == 1), None)
            if unit is None:
                break
            cls = simplify(cls, unit)
            if cls is None:
                return False
        if not cls:
            return True
        v = abs(cls[0][0])
        for lit in (v, -v):
            nxt = simplify(cls, lit)
            if nxt is not None and rec(nxt):
                return True
        return False

    cls = [list(dict.fromkeys(c)) for c in clauses]
    if any(not c for c in cls):
        return False
    cls = [c for c in cls if not any(-x in c for x in c)]
    return rec(cls)


def satisfies(clauses, model) -> bool:
    return all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)


def random_3cnf(rng: np.random.Generator, n_vars: int, n_clauses: int) -> list[list[int]]:
    out = []
    for _ in range(n_clauses):
        vs = rng.choice(n_vars, size=3, replace=False) + 1
        signs = rng.integers(0, 2, size=3) * 2 - 1
        out.append([int(v * s) for v, s in zip(vs, signs)])
    return out


def pigeonhole(pigeons: int, holes: int) -> tuple[int, list[list[int]]]:
    def p(i, h):
        return 1 + i * holes + h

    cls = [[p(i, h) for h in range(holes)] for i in range(pigeons)]
    for h in range(holes):
        cls += [[-p(i, h), -p(k, h)] for i, k in combinations(range(pigeons), 2)]
    return pigeons * holes, cls


# -- layouts ------------------------------------------------------------------

def feasible_layouts(instance) -> set[tuple[int, ...]]:
    """Every layout satisfying the hard constraints, by permutation enumeration."""
    g = instance.grid
    free = [j for j in range(g.rows * g.cols) if j not in g.blocked]
    perms = np.array(list(permutations(free)), dtype=np.int64).reshape(-1, len(free))
    r, c = perms // g.cols, perms % g.cols
    ok = np.ones(len(perms), dtype=bool)

    def dist(i, k):
        return np.abs(r[:, i] - r[:, k]) + np.abs(c[:, i] - c[:, k])

    for i, k in instance.hard_adjacency:
        ok &= dist(i, k) == 1
    for i, k in instance.hard_separation:
        ok &= dist(i, k) != 1
    for m, f in instance.floor_rules.items():
        ok &= np.isin(perms[:, m], list(g.floors[f]))
    return {tuple(int(s) for s in row) for row in perms[ok]}


def layout_cost(instance, slots) -> int:
    cols = instance.grid.cols
    return sum(w * (abs(slots[i] // cols - slots[k] // cols) + abs(slots[i] % cols - slots[k] % cols))
               for i, k, w in instance.soft_pairs)


def optimum(instance) -> int | None:
    feas = feasible_layouts(instance)
    return min((layout_cost(instance, s) for s in feas), default=None)


# -- PRNG and generator ----------------------------------------------------------

def splitmix64_stream(seed: int, n: int) -> list[int]:
    out = []
    x = seed
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def reference_pairs(n: int, n_hard: int, n_soft: int, seed: int, lo: int = 1, hi: int = 9):
    """The generator's sampling procedure, restated: (hard pairs, soft triples).

    One shuffle step per drawn pair (hard first, then soft), then one
    weight per soft pair.
    """
    pairs = [(i, k) for i in range(n) for k in range(i + 1, n)]
    stream = iter(splitmix64_stream(seed, n_hard + 2 * n_soft))
    for t in range(n_hard + n_soft):
        u = t + next(stream) % (len(pairs) - t)
        pairs[t], pairs[u] = pairs[u], pairs[t]
    soft = [(*pairs[t], lo + next(stream) % (hi - lo + 1)) for t in range(n_hard, n_hard + n_soft)]
    return pairs[:n_hard], soft
