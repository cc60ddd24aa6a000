"""Facility layout on grids: a CDCL SAT kernel, CNF encodings of placement
constraints, branch-and-bound minimisation of weighted Manhattan distance,
and a benchmark harness tying them together.
"""
from .layout_model import (Grid, Instance, InstanceError, Layout, Violation, evaluate_objective,
                           load_instance, dump_instance, manhattan_distance, validate_layout)
from .sat_core import Solver, SolverConfig, SolveOutcome, enumerate_models
from .cnf_encoder import (AdjacencyMode, AmoMode, EncodingConfig, SymmetryMode, decode_model,
                          encode_feasibility)
from .generator import ExperimentKind, GeneratorSpec, Structure, experiment_matrix, generate
from .optimizer import (OptimizeResult, Status, branch_and_bound, brute_force_oracle,
                        deep_enumeration_optimize, warm_start_optimize)
from .bench_harness import BenchRecord, Budgets, Method, emit_report, run_suite, validate_pipeline

__version__ = "0.1.0"
