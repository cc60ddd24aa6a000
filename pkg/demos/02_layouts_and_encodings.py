"""
Layouts, constraints and their CNF
==================================

Build a small layout instance, encode it under each encoding option and
check that every choice describes exactly the same set of layouts.
"""
from collections import Counter

from layoutsat import (EncodingConfig, GeneratorSpec, Solver, decode_model, dump_instance,
                       encode_feasibility, enumerate_models, evaluate_objective, generate,
                       validate_layout)

inst = generate(GeneratorSpec(2, 3, "mixed", rho_hard=0.25, rho_soft=0.2, seed=4))
print(dump_instance(inst))

# one SAT call gives one feasible layout
formula, vm = encode_feasibility(inst)
print("clauses per family", formula.counts)
s = Solver(n_vars=formula.n_vars)
s.add_clauses(formula.clauses)
layout = decode_model(s.solve().model, vm, inst)
print("layout", layout.slot_of, "violations", validate_layout(inst, layout),
      "cost", evaluate_objective(inst, layout))

# the four encodings differ in size but not in meaning
sets = {}
for amo in ("pairwise", "sequential"):
    for adj in ("forbidden_pairs", "tseitin"):
        f, vm = encode_feasibility(inst, EncodingConfig(amo, adj))
        s = Solver(n_vars=f.n_vars)
        s.add_clauses(f.clauses)
        enum = enumerate_models(s, 10_000, range(1, vm.n_primary + 1), positive_only=True)
        sets[amo, adj] = {decode_model(m, vm, inst).slot_of for m in enum.models}
        print(f"{amo:>10} {adj:>15}: {f.n_vars:4d} vars {len(f.clauses):5d} clauses "
              f"{len(sets[amo, adj])} layouts")
print("all encodings agree:", len({frozenset(v) for v in sets.values()}) == 1)

# symmetry breaking on an empty 2x2 grid: 24 layouts collapse to 6
empty = generate(GeneratorSpec(2, 2, "assignment", seed=0))
for mode in ("none", "fix_first", "orbit"):
    f, vm = encode_feasibility(empty, EncodingConfig(symmetry_mode=mode))
    s = Solver(n_vars=f.n_vars)
    s.add_clauses(f.clauses)
    print(mode, len(enumerate_models(s, 100, range(1, vm.n_primary + 1)).models))

