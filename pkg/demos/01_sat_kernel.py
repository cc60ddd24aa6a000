"""
The SAT kernel on its own
=========================

A walk through the CDCL solver: plain clauses, a pigeonhole formula that
forces real conflict analysis, and projected model enumeration.
"""
import numpy as np

from layoutsat import Solver, SolverConfig, enumerate_models

# a tiny satisfiable formula: (x1 or x2) and (not x1 or x3) and (not x2 or not x3)
s = Solver(n_vars=3)
s.add_clauses([[1, 2], [-1, 3], [-2, -3]])
out = s.solve()
print("status", out.status, "model", out.model)

# five pigeons, four holes: unsatisfiable, and every proof needs many conflicts
pigeons, holes = 5, 4
var = np.arange(1, pigeons * holes + 1).reshape(pigeons, holes)
clauses = [list(map(int, row)) for row in var]
for h in range(holes):
    col = var[:, h]
    clauses += [[-int(a), -int(b)] for i, a in enumerate(col) for b in col[i + 1:]]
s = Solver(SolverConfig(seed=1), n_vars=var.size)
s.add_clauses(clauses)
out = s.solve()
print("pigeonhole", out.status, {k: out.stats[k] for k in ("conflicts", "decisions", "learned_count")})

# a random 3-CNF under the threshold ratio has plenty of models
rng = np.random.default_rng(7)
n = 12
cnf = [[int(v) * int(sign) for v, sign in zip(rng.choice(n, 3, replace=False) + 1, rng.choice([-1, 1], 3))]
       for _ in range(30)]
s = Solver(n_vars=n)
s.add_clauses(cnf)
enum = enumerate_models(s, 10_000, range(1, 5))
# distinct on x1..x4 only; the other variables are existentially hidden
print(len(enum.models), "projected models, complete:", enum.complete)
for k in range(min(3, len(enum.models))):
    print("  ", enum.as_dict(k))
