"""DIMACS CNF reading and writing."""
from __future__ import annotations

from typing import Iterable, Sequence

__all__ = ["DimacsError", "parse_dimacs", "write_dimacs"]


class DimacsError(ValueError):
    pass


def parse_dimacs(text: str) -> tuple[int, list[list[int]], list[str]]:
    """Parse DIMACS CNF text into ``(n_vars, clauses, comments)``.

    Clauses may span lines; each is terminated by ``0``.  Comment lines
    (starting with ``c``) are returned without the leading ``c `` marker.
    """
    n_vars = n_clauses = None
    clauses: list[list[int]] = []
    comments: list[str] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            comments.append(line[2:] if line.startswith("c ") else line[1:])
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            if n_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if line.startswith("%"):  # SATLIB end marker
            break
        if n_vars is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                if abs(lit) > n_vars:
                    raise DimacsError(f"line {lineno}: literal {lit} exceeds {n_vars} vars")
                current.append(lit)
    if current:
        raise DimacsError("last clause is not 0-terminated")
    if n_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if len(clauses) != n_clauses:
        raise DimacsError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return n_vars, clauses, comments


def write_dimacs(n_vars: int, clauses: Iterable[Sequence[int]], comments: Iterable[str] = ()) -> str:
    clauses = list(clauses)
    out = [f"c {c}" for c in comments]
    out.append(f"p cnf {n_vars} {len(clauses)}")
    out.extend(" ".join(map(str, c)) + " 0" if c else "0" for c in clauses)
    return "\n".join(out) + "\n"
