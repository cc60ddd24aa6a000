"""
Optimizing a layout, three ways
===============================

Branch and bound from scratch, branch and bound seeded with a SAT hint,
and enumerate-then-select. Finishes with a small benchmark table.
"""
from layoutsat import (GeneratorSpec, branch_and_bound, brute_force_oracle,
                       deep_enumeration_optimize, emit_report, generate, run_suite,
                       warm_start_optimize)
from layoutsat.bench_harness import Budgets, pivot_table

inst = generate(GeneratorSpec(3, 3, "mixed", rho_hard=0.10, rho_soft=0.20, seed=11))
print(len(inst.soft_pairs), "weighted pairs", sorted(inst.soft_pairs))

cold = branch_and_bound(inst, time_limit=30)
warm = warm_start_optimize(inst, time_limit=30)
pool = deep_enumeration_optimize(inst, max_samples=2_000, time_limit=30)
oracle = brute_force_oracle(inst)
for name, r in (("cold", cold), ("warm", warm), ("enumeration", pool), ("oracle", oracle)):
    print(f"{name:>12} {r.status.value:<9} objective {r.best_objective} nodes {r.nodes_explored} "
          f"hint {r.hint_cost} {r.runtime:.3f}s")
# the enumeration pool stops at 2000 layouts, so it only claims FEASIBLE
# unless the space was exhausted

# a larger grid: the hint makes the incumbent finite from the first node
big = generate(GeneratorSpec(5, 5, "mixed", 0.05, 0.05, seed=3))
w = warm_start_optimize(big, time_limit=20)
c = branch_and_bound(big, time_limit=20)
print("5x5 warm", w.status.value, w.best_objective, w.nodes_explored, "hint", w.hint_cost)
print("5x5 cold", c.status.value, c.best_objective, c.nodes_explored)

# feasibility benchmark over three seeds; CSV first, then the pivot
records = run_suite("symmetry", range(3), Budgets(feas_timeout=10))
print(emit_report(records, "csv"))
print(pivot_table(records))
