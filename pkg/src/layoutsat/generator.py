"""Seeded layout-instance generation and the experiment matrices.

Pair sampling is defined so that it is easy to reproduce anywhere: all
unordered machine pairs are listed lexicographically, and pairs are drawn by
a partial Fisher-Yates shuffle driven by splitmix64: step ``t`` swaps
position ``t`` with ``t + output % (pairs - t)``.  Hard pairs are drawn
first and soft pairs continue the same shuffle, so the two never collide.
The weights are drawn last, one output per soft pair in draw order.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .layout_model import Grid, Instance
from .sat_core import splitmix64

__all__ = [
    "Structure",
    "ExperimentKind",
    "GeneratorSpec",
    "pair_count",
    "generate",
    "experiment_matrix",
]


class Structure(str, enum.Enum):
    ASSIGNMENT_ONLY = "assignment"
    ADJACENCY = "adjacency"
    SEPARATION = "separation"
    MIXED = "mixed"


class ExperimentKind(str, enum.Enum):
    SCALING = "scaling"
    DENSITY = "density"
    SYMMETRY = "symmetry"
    OPTIMIZATION = "optimization"


@dataclass(frozen=True)
class GeneratorSpec:
    rows: int
    cols: int
    structure: Structure = Structure.MIXED
    rho_hard: float = 0.0
    rho_soft: float = 0.0
    seed: int = 0
    weight_range: tuple[int, int] = (1, 9)

    def __post_init__(self):
        object.__setattr__(self, "structure", Structure(self.structure))
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        for name in ("rho_hard", "rho_soft"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        lo, hi = self.weight_range
        if not 1 <= lo <= hi:
            raise ValueError("weight_range must satisfy 1 <= lo <= hi")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def pair_count(rho: float, n_pairs: int) -> int:
    """``ceil(rho * n_pairs)`` computed on the decimal value of ``rho``.

    Going through the shortest repr avoids binary artefacts such as
    ``0.07 * 100 == 7.000000000000001``.
    """
    return math.ceil(Fraction(repr(float(rho))) * n_pairs)


def generate(spec: GeneratorSpec) -> Instance:
    n = spec.rows * spec.cols
    pairs = list(combinations(range(n), 2))
    n_hard = 0 if spec.structure is Structure.ASSIGNMENT_ONLY else pair_count(spec.rho_hard, len(pairs))
    n_soft = pair_count(spec.rho_soft, len(pairs))
    if n_hard + n_soft > len(pairs):
        raise ValueError(
            f"densities ask for {n_hard} hard + {n_soft} soft pairs but only {len(pairs)} exist"
        )
    state = spec.seed

    def draw(k, start):
        nonlocal state
        for t in range(start, start + k):
            state, r = splitmix64(state)
            u = t + r % (len(pairs) - t)
            pairs[t], pairs[u] = pairs[u], pairs[t]
        return pairs[start:start + k]

    hard = draw(n_hard, 0)
    if spec.structure is Structure.ADJACENCY:
        adj, sep = hard, []
    elif spec.structure is Structure.SEPARATION:
        adj, sep = [], hard
    else:
        adj, sep = hard[0::2], hard[1::2]
    lo, hi = spec.weight_range
    soft = []
    for i, k in draw(n_soft, n_hard):
        state, r = splitmix64(state)
        soft.append((i, k, lo + r % (hi - lo + 1)))
    return Instance(
        grid=Grid(spec.rows, spec.cols),
        n_machines=n,
        hard_adjacency=frozenset(adj),
        hard_separation=frozenset(sep),
        soft_pairs=tuple(soft),
        meta={"structure": spec.structure.value, "rho_hard": spec.rho_hard,
              "rho_soft": spec.rho_soft, "seed": spec.seed},
    )


def experiment_matrix(kind: ExperimentKind | str, seeds=(0,)) -> list[GeneratorSpec]:
    kind = ExperimentKind(kind)
    mixed = Structure.MIXED
    if kind is ExperimentKind.SCALING:
        cells = [(s, s, 0.15, 0.0) for s in (2, 3, 4, 5)]
    elif kind is ExperimentKind.DENSITY:
        cells = [(3, 3, rho, 0.0) for rho in (0.05, 0.10, 0.15, 0.25, 0.35)]
    elif kind is ExperimentKind.SYMMETRY:
        cells = [(s, s, 0.20, 0.0) for s in (3, 4)]
    else:
        cells = [(s, s, 0.05, 0.05) for s in (5, 6)]
    return [GeneratorSpec(r, c, mixed, rh, rs, seed)
            for r, c, rh, rs in cells for seed in seeds]
