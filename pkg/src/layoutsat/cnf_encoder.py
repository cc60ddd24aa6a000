"""CNF encodings of layout feasibility and decoding of models.

Placement variable ``x(i, j)`` (machine ``i`` sits in slot ``j``) is numbered
``1 + i * n_slots + j`` over *all* grid slots, blocked ones included; blocked
slots are then excluded by unit clauses.  Auxiliary variables are allocated
after the placement block and carry a tag naming the constraint that made
them.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .dimacs import write_dimacs
from .layout_model import Grid, Instance, Layout, adjacency_set, manhattan_distance

__all__ = [
    "AmoMode",
    "AdjacencyMode",
    "SymmetryMode",
    "EncodingConfig",
    "VarPool",
    "VarMap",
    "CnfFormula",
    "IntegrityError",
    "exactly_one",
    "at_most_one",
    "encode_adjacency",
    "encode_separation",
    "encode_blocked_and_floors",
    "encode_symmetry_breaking",
    "encode_feasibility",
    "decode_model",
    "layout_units",
    "grid_symmetries",
    "slot_orbits",
    "symmetry_slots",
]

log = logging.getLogger(__name__)


class AmoMode(str, enum.Enum):
    PAIRWISE = "pairwise"
    SEQUENTIAL = "sequential"


class AdjacencyMode(str, enum.Enum):
    FORBIDDEN_PAIRS = "forbidden_pairs"
    TSEITIN = "tseitin"


class SymmetryMode(str, enum.Enum):
    NONE = "none"
    FIX_FIRST = "fix_first"
    ORBIT = "orbit"


@dataclass(frozen=True)
class EncodingConfig:
    amo_mode: AmoMode = AmoMode.PAIRWISE
    adjacency_mode: AdjacencyMode = AdjacencyMode.FORBIDDEN_PAIRS
    symmetry_mode: SymmetryMode = SymmetryMode.NONE

    def __post_init__(self):
        object.__setattr__(self, "amo_mode", AmoMode(self.amo_mode))
        object.__setattr__(self, "adjacency_mode", AdjacencyMode(self.adjacency_mode))
        object.__setattr__(self, "symmetry_mode", SymmetryMode(self.symmetry_mode))


class IntegrityError(RuntimeError):
    """A model does not decode to a bijective layout."""


class VarPool:
    """Allocator for auxiliary variables above a fixed block of ``top`` vars."""

    def __init__(self, top: int = 0):
        self.top = top
        self.aux: dict[int, str] = {}

    def new_aux(self, tag: str) -> int:
        self.top += 1
        self.aux[self.top] = tag
        return self.top

    @property
    def n_vars(self) -> int:
        return self.top


class VarMap(VarPool):
    def __init__(self, n_machines: int, n_slots: int):
        super().__init__(n_machines * n_slots)
        self.n_machines = n_machines
        self.n_slots = n_slots

    @property
    def n_primary(self) -> int:
        return self.n_machines * self.n_slots

    def x(self, i: int, j: int) -> int:
        if not (0 <= i < self.n_machines and 0 <= j < self.n_slots):
            raise IndexError(f"no placement variable for machine {i}, slot {j}")
        return 1 + i * self.n_slots + j

    def placement(self, var: int) -> tuple[int, int]:
        if not 1 <= var <= self.n_primary:
            raise IndexError(f"{var} is not a placement variable")
        return divmod(var - 1, self.n_slots)


@dataclass
class CnfFormula:
    n_vars: int
    clauses: list[list[int]]
    varmap: VarMap
    # constraint family -> number of clauses it contributed
    counts: dict[str, int] = field(default_factory=dict)

    def to_dimacs(self) -> str:
        vm = self.varmap
        comments = [f"x {i} {j} {vm.x(i, j)}"
                    for i in range(vm.n_machines) for j in range(vm.n_slots)]
        comments += [f"aux {v} {tag}" for v, tag in sorted(vm.aux.items())]
        return write_dimacs(self.n_vars, self.clauses, comments)


# -- cardinality ---------------------------------------------------------------

def at_most_one(literals: Sequence[int], mode: AmoMode | str = AmoMode.PAIRWISE,
                pool: VarPool | None = None, tag: str = "amo") -> list[list[int]]:
    mode = AmoMode(mode)
    lits = list(literals)
    m = len(lits)
    if mode is AmoMode.PAIRWISE or m <= 1:
        return [[-a, -b] for a, b in combinations(lits, 2)]
    if pool is None:
        raise ValueError("sequential counter needs a variable pool")
    # Sinz sequential counter: s[t] <=> "some of lits[0..t] is true" (upward closed)
    s = [pool.new_aux(f"{tag}:s{t}") for t in range(m - 1)]
    out = [[-lits[0], s[0]]]
    for t in range(1, m - 1):
        out += [[-lits[t], s[t]], [-s[t - 1], s[t]], [-lits[t], -s[t - 1]]]
    out.append([-lits[m - 1], -s[m - 2]])
    return out


def exactly_one(literals: Sequence[int], mode: AmoMode | str = AmoMode.PAIRWISE,
                pool: VarPool | None = None, tag: str = "eo") -> list[list[int]]:
    lits = list(literals)
    if not lits:
        raise ValueError("exactly_one needs at least one literal")
    return [lits] + at_most_one(lits, mode, pool, tag)


# -- relational constraints ------------------------------------------------------

def _ordered_adjacent(grid: Grid) -> list[tuple[int, int]]:
    out = []
    for j, l in sorted(adjacency_set(grid)):
        out += [(j, l), (l, j)]
    return out


def encode_adjacency(instance: Instance, pair: tuple[int, int],
                     mode: AdjacencyMode | str, varmap: VarMap) -> list[list[int]]:
    mode = AdjacencyMode(mode)
    i, k = pair
    grid = instance.grid
    x = varmap.x
    if mode is AdjacencyMode.FORBIDDEN_PAIRS:
        free = grid.unblocked
        return [[-x(i, j), -x(k, l)] for j in free for l in free
                if manhattan_distance(grid, j, l) != 1]
    out: list[list[int]] = []
    ys = []
    for j, l in _ordered_adjacent(grid):
        y = varmap.new_aux(f"adj({i},{k}):y{j},{l}")
        ys.append(y)
        out += [[-y, x(i, j)], [-y, x(k, l)], [y, -x(i, j), -x(k, l)]]
    out.append(ys)
    return out


def encode_separation(instance: Instance, pair: tuple[int, int], varmap: VarMap) -> list[list[int]]:
    i, k = pair
    x = varmap.x
    return [[-x(i, j), -x(k, l)] for j, l in _ordered_adjacent(instance.grid)]


def encode_blocked_and_floors(instance: Instance, varmap: VarMap) -> list[list[int]]:
    grid = instance.grid
    x = varmap.x
    out = [[-x(i, j)] for j in sorted(grid.blocked) for i in instance.machines]
    for m, f in sorted(instance.floor_rules.items()):
        slots = sorted(grid.floors[f])
        if not slots:
            log.warning("machine %d pinned to empty floor %r: emitting empty clause", m, f)
        out.append([x(m, j) for j in slots])
    return out


# -- symmetry ------------------------------------------------------------------

def grid_symmetries(grid: Grid) -> list[tuple[int, ...]]:
    """Rotations/reflections of the grid as slot permutations.

    Only those mapping the blocked set, and every floor, onto itself are kept.
    """
    R, C = grid.rows, grid.cols
    maps = [
        lambda r, c: (r, c),
        lambda r, c: (R - 1 - r, C - 1 - c),
        lambda r, c: (R - 1 - r, c),
        lambda r, c: (r, C - 1 - c),
    ]
    if R == C:
        maps += [
            lambda r, c: (c, R - 1 - r),
            lambda r, c: (C - 1 - c, r),
            lambda r, c: (c, r),
            lambda r, c: (C - 1 - c, R - 1 - r),
        ]
    perms = []
    for g in maps:
        perm = tuple(grid.slot(*g(*divmod(j, C))) for j in range(grid.n_slots))
        if {perm[j] for j in grid.blocked} != set(grid.blocked):
            continue
        if grid.floors and any({perm[j] for j in s} != set(s) for s in grid.floors.values()):
            continue
        if perm not in perms:
            perms.append(perm)
    return perms


def slot_orbits(grid: Grid) -> list[list[int]]:
    """Orbits of the unblocked slots, each sorted, ordered by representative."""
    perms = grid_symmetries(grid)
    seen: set[int] = set()
    orbits = []
    for j in grid.unblocked:
        if j in seen:
            continue
        orb = sorted({p[j] for p in perms})
        seen.update(orb)
        orbits.append(orb)
    return orbits


def encode_symmetry_breaking(instance: Instance, mode: SymmetryMode | str,
                             varmap: VarMap) -> list[list[int]]:
    mode = SymmetryMode(mode)
    if mode is SymmetryMode.NONE or instance.n_machines == 0:
        return []
    x = varmap.x
    if mode is SymmetryMode.FIX_FIRST:
        return [[x(0, instance.grid.unblocked[0])]]
    return [[x(0, orb[0]) for orb in slot_orbits(instance.grid)]]


def symmetry_slots(instance: Instance, mode: SymmetryMode | str) -> list[int]:
    """Slots machine 0 may take under a symmetry mode."""
    mode = SymmetryMode(mode)
    grid = instance.grid
    if mode is SymmetryMode.NONE:
        return list(grid.unblocked)
    if mode is SymmetryMode.FIX_FIRST:
        return [grid.unblocked[0]]
    return [orb[0] for orb in slot_orbits(grid)]


# -- whole formula -------------------------------------------------------------------

def encode_feasibility(instance: Instance, config: EncodingConfig | None = None
                       ) -> tuple[CnfFormula, VarMap]:
    cfg = config or EncodingConfig()
    grid = instance.grid
    vm = VarMap(instance.n_machines, grid.n_slots)
    x = vm.x
    free = grid.unblocked
    counts = dict.fromkeys(("machine_eo", "slot_eo", "blocked_floor", "adjacency",
                            "separation", "symmetry"), 0)
    clauses: list[list[int]] = []

    def emit(family, cls):
        clauses.extend(cls)
        counts[family] += len(cls)

    for i in instance.machines:
        emit("machine_eo", exactly_one([x(i, j) for j in free], cfg.amo_mode, vm, f"machine{i}"))
    for j in free:
        emit("slot_eo", exactly_one([x(i, j) for i in instance.machines], cfg.amo_mode, vm, f"slot{j}"))
    emit("blocked_floor", encode_blocked_and_floors(instance, vm))
    for pair in sorted(instance.hard_adjacency):
        emit("adjacency", encode_adjacency(instance, pair, cfg.adjacency_mode, vm))
    for pair in sorted(instance.hard_separation):
        emit("separation", encode_separation(instance, pair, vm))
    emit("symmetry", encode_symmetry_breaking(instance, cfg.symmetry_mode, vm))
    return CnfFormula(vm.n_vars, clauses, vm, counts), vm


def decode_model(model: Mapping[int, bool] | Iterable[int], varmap: VarMap,
                 instance: Instance) -> Layout:
    """Layout of a model, given as a var -> bool map or as its true variables."""
    if not isinstance(model, Mapping):
        model = dict.fromkeys(model, True)
    slots = []
    for i in range(varmap.n_machines):
        on = [j for j in range(varmap.n_slots) if model.get(varmap.x(i, j), False)]
        if len(on) != 1:
            raise IntegrityError(f"machine {i} is placed in {len(on)} slots: {on}")
        slots.append(on[0])
    if len(set(slots)) != len(slots):
        raise IntegrityError("two machines share a slot")
    blocked = [j for j in slots if j in instance.grid.blocked]
    if blocked:
        raise IntegrityError(f"machines placed on blocked slots {blocked}")
    return Layout(tuple(slots))


def layout_units(layout: Layout, varmap: VarMap) -> list[list[int]]:
    """Unit clauses pinning every machine to its slot in ``layout``."""
    return [[varmap.x(i, j)] for i, j in enumerate(layout.slot_of)]
