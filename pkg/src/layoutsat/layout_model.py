"""Discrete slot-based layout instances.

Slots on an ``rows x cols`` grid are numbered row-major from 0, so slot ``j``
sits at ``(j // cols, j % cols)``.  Blocked slots hold no machine; every
unblocked slot holds exactly one machine, hence ``n_machines`` always equals
the number of unblocked slots.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "Grid",
    "Instance",
    "Layout",
    "Violation",
    "InstanceError",
    "manhattan_distance",
    "adjacency_set",
    "evaluate_objective",
    "validate_layout",
    "load_instance",
    "dump_instance",
    "instance_from_dict",
    "instance_to_dict",
]


class InstanceError(ValueError):
    """Raised for malformed instances, slots or layouts."""


def _pair(i: int, k: int) -> tuple[int, int]:
    return (i, k) if i < k else (k, i)


@dataclass(frozen=True)
class Grid:
    rows: int
    cols: int
    blocked: frozenset[int] = frozenset()
    floors: Mapping[str, frozenset[int]] | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InstanceError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        object.__setattr__(self, "blocked", frozenset(self.blocked))
        bad = [j for j in self.blocked if not 0 <= j < self.n_slots]
        if bad:
            raise InstanceError(f"blocked slots out of range: {sorted(bad)}")
        if self.floors is not None:
            floors = {str(k): frozenset(v) for k, v in self.floors.items()}
            seen: set[int] = set()
            for label, slots in floors.items():
                if slots & seen:
                    raise InstanceError(f"floor {label!r} overlaps another floor")
                seen |= slots
            if seen != set(self.unblocked):
                raise InstanceError("floors must partition the unblocked slots")
            object.__setattr__(self, "floors", floors)

    @property
    def n_slots(self) -> int:
        return self.rows * self.cols

    @property
    def unblocked(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n_slots) if j not in self.blocked)

    def coords(self, j: int) -> tuple[int, int]:
        self.check_slot(j)
        return divmod(j, self.cols)

    def slot(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise InstanceError(f"cell ({r}, {c}) outside {self.rows}x{self.cols} grid")
        return r * self.cols + c

    def check_slot(self, j: int) -> None:
        if not isinstance(j, int) or not 0 <= j < self.n_slots:
            raise InstanceError(f"invalid slot id {j!r} for {self.rows}x{self.cols} grid")

    def neighbors(self, j: int) -> list[int]:
        """Unblocked four-connected neighbours of ``j``."""
        r, c = self.coords(j)
        out = []
        for dr, dc in ((-1, 0), (0, -1), (0, 1), (1, 0)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.rows and 0 <= cc < self.cols:
                l = rr * self.cols + cc
                if l not in self.blocked:
                    out.append(l)
        return out

    def floor_of(self, j: int) -> str | None:
        if self.floors is None:
            return None
        for label, slots in self.floors.items():
            if j in slots:
                return label
        return None


def manhattan_distance(grid: Grid, j: int, l: int) -> int:
    rj, cj = grid.coords(j)
    rl, cl = grid.coords(l)
    return abs(rj - rl) + abs(cj - cl)


def adjacency_set(grid: Grid) -> set[tuple[int, int]]:
    """Unordered four-connected pairs ``(j, l)`` with ``j < l``, blocked slots excluded."""
    pairs = set()
    for j in grid.unblocked:
        for l in grid.neighbors(j):
            if j < l:
                pairs.add((j, l))
    return pairs


@dataclass(frozen=True)
class Instance:
    grid: Grid
    n_machines: int
    hard_adjacency: frozenset[tuple[int, int]] = frozenset()
    hard_separation: frozenset[tuple[int, int]] = frozenset()
    soft_pairs: tuple[tuple[int, int, int], ...] = ()
    # machine -> floor label it must occupy
    floor_rules: Mapping[int, str] = field(default_factory=dict)
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        n = self.n_machines
        if n != len(self.grid.unblocked):
            raise InstanceError(
                f"n_machines={n} but grid has {len(self.grid.unblocked)} unblocked slots"
            )

        def norm(pairs, what):
            out = set()
            for i, k in pairs:
                if i == k:
                    raise InstanceError(f"self-pair ({i}, {k}) in {what}")
                for m in (i, k):
                    if not 0 <= m < n:
                        raise InstanceError(f"machine {m} out of range in {what}")
                out.add(_pair(i, k))
            return frozenset(out)

        adj = norm(self.hard_adjacency, "adjacency")
        sep = norm(self.hard_separation, "separation")
        if adj & sep:
            raise InstanceError(f"pairs both adjacent and separated: {sorted(adj & sep)}")
        soft = []
        for i, k, w in self.soft_pairs:
            norm([(i, k)], "soft pairs")
            if int(w) != w or w < 1:
                raise InstanceError(f"soft weight must be a positive integer, got {w!r}")
            soft.append((int(i), int(k), int(w)))
        rules = {int(m): str(f) for m, f in dict(self.floor_rules).items()}
        if rules:
            if self.grid.floors is None:
                raise InstanceError("floor rules given but grid has no floors")
            for m, f in rules.items():
                if not 0 <= m < n:
                    raise InstanceError(f"machine {m} out of range in floor rules")
                if f not in self.grid.floors:
                    raise InstanceError(f"unknown floor {f!r}")
        object.__setattr__(self, "hard_adjacency", adj)
        object.__setattr__(self, "hard_separation", sep)
        object.__setattr__(self, "soft_pairs", tuple(soft))
        object.__setattr__(self, "floor_rules", rules)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def machines(self) -> range:
        return range(self.n_machines)


@dataclass(frozen=True)
class Layout:
    slot_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "slot_of", tuple(int(s) for s in self.slot_of))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "Layout":
        n = len(mapping)
        if sorted(mapping) != list(range(n)):
            raise InstanceError("layout mapping must cover machines 0..n-1")
        return cls(tuple(mapping[i] for i in range(n)))

    def __getitem__(self, machine: int) -> int:
        return self.slot_of[machine]

    def __len__(self) -> int:
        return len(self.slot_of)


@dataclass(frozen=True)
class Violation:
    kind: str  # "bijection" | "adjacency" | "separation" | "floor"
    machines: tuple[int, ...]
    detail: str = ""


def validate_layout(instance: Instance, layout: Layout) -> list[Violation]:
    grid = instance.grid
    out: list[Violation] = []
    slots = layout.slot_of
    if len(slots) != instance.n_machines:
        return [Violation("bijection", (), f"{len(slots)} machines placed, expected {instance.n_machines}")]
    unblocked = set(grid.unblocked)
    owner: dict[int, int] = {}
    for i, j in enumerate(slots):
        if j not in unblocked:
            out.append(Violation("bijection", (i,), f"slot {j} is blocked or invalid"))
        elif j in owner:
            out.append(Violation("bijection", (owner[j], i), f"slot {j} used twice"))
        else:
            owner[j] = i
    if out:
        return out

    def md(i, k):
        return manhattan_distance(grid, slots[i], slots[k])

    for i, k in sorted(instance.hard_adjacency):
        if md(i, k) != 1:
            out.append(Violation("adjacency", (i, k), f"distance {md(i, k)}"))
    for i, k in sorted(instance.hard_separation):
        if md(i, k) == 1:
            out.append(Violation("separation", (i, k), "machines are adjacent"))
    for m, f in sorted(instance.floor_rules.items()):
        if slots[m] not in grid.floors[f]:
            out.append(Violation("floor", (m,), f"slot {slots[m]} not on floor {f!r}"))
    return out


def evaluate_objective(instance: Instance, layout: Layout) -> int:
    bad = [v for v in validate_layout(instance, layout) if v.kind == "bijection"]
    if bad:
        raise InstanceError(f"invalid layout: {bad[0].detail}")
    grid, s = instance.grid, layout.slot_of
    return sum(w * manhattan_distance(grid, s[i], s[k]) for i, k, w in instance.soft_pairs)


# -- JSON instance files ------------------------------------------------------

_KEYS = {"rows", "cols", "blocked", "floors", "floor_rules", "machines",
         "adjacency", "separation", "soft", "meta"}
_META_KEYS = {"structure", "rho_hard", "rho_soft", "seed"}


def instance_to_dict(instance: Instance) -> dict:
    g = instance.grid
    d: dict = {
        "rows": g.rows,
        "cols": g.cols,
        "blocked": sorted(g.blocked),
        "machines": instance.n_machines,
        "adjacency": [list(p) for p in sorted(instance.hard_adjacency)],
        "separation": [list(p) for p in sorted(instance.hard_separation)],
        "soft": [list(t) for t in instance.soft_pairs],
        "meta": {k: instance.meta[k] for k in sorted(instance.meta)},
    }
    if g.floors is not None:
        d["floors"] = {k: sorted(v) for k, v in sorted(g.floors.items())}
    if instance.floor_rules:
        d["floor_rules"] = [[m, f] for m, f in sorted(instance.floor_rules.items())]
    return d


def instance_from_dict(d: Mapping) -> Instance:
    unknown = set(d) - _KEYS
    if unknown:
        raise InstanceError(f"unknown instance fields: {sorted(unknown)}")
    missing = {"rows", "cols", "machines"} - set(d)
    if missing:
        raise InstanceError(f"missing instance fields: {sorted(missing)}")
    meta = dict(d.get("meta", {}))
    if set(meta) - _META_KEYS:
        raise InstanceError(f"unknown meta fields: {sorted(set(meta) - _META_KEYS)}")
    floors = d.get("floors")
    grid = Grid(int(d["rows"]), int(d["cols"]), frozenset(d.get("blocked", ())),
                None if floors is None else {k: frozenset(v) for k, v in floors.items()})
    return Instance(
        grid=grid,
        n_machines=int(d["machines"]),
        hard_adjacency=frozenset(tuple(p) for p in d.get("adjacency", ())),
        hard_separation=frozenset(tuple(p) for p in d.get("separation", ())),
        soft_pairs=tuple(tuple(t) for t in d.get("soft", ())),
        floor_rules={int(m): f for m, f in d.get("floor_rules", ())},
        meta=meta,
    )


def dump_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), sort_keys=True)


def load_instance(source: str | bytes | Iterable[str]) -> Instance:
    """Parse an instance from JSON text, bytes, or an open file."""
    if hasattr(source, "read"):
        source = source.read()
    return instance_from_dict(json.loads(source))
