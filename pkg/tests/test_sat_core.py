import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from layoutsat.cnf_encoder import EncodingConfig, encode_feasibility
from layoutsat.layout_model import Grid, Instance
from layoutsat.sat_core import (Clause, Solver, SolverConfig, enumerate_models, luby,
                                restart_interval, splitmix64)

from oracles import pigeonhole, random_3cnf, satisfies, splitmix64_stream, truth_table_count


def solver_for(clauses, n_vars=0, **cfg):
    s = Solver(SolverConfig(**cfg), n_vars)
    s.add_clauses(clauses)
    return s


# -- helpers ------------------------------------------------------------------

def test_splitmix64_reference_values():
    state, outs = 0, []
    for _ in range(4):
        state, x = splitmix64(state)
        outs.append(x)
    assert outs[:3] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert outs == splitmix64_stream(0, 4)


def test_luby_prefix_and_powers():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]
    assert luby(15) == 8
    assert luby(31) == 16
    with pytest.raises(ValueError):
        luby(0)


def test_restart_interval_scales_by_base():
    assert restart_interval(3, 64) == 128
    assert restart_interval(1, 64) == 64


def test_config_rejects_bad_decay():
    with pytest.raises(ValueError):
        SolverConfig(decay_factor=1.0)
    with pytest.raises(ValueError):
        SolverConfig(luby_base=0)


# -- clause ingestion -----------------------------------------------------------

def test_contradicting_units_conflict_on_second_add():
    s = Solver()
    assert s.add_clause([1])
    assert s.add_clause([-1]) is False
    assert s.solve().status == "UNSAT"
    assert s.add_clause([2]) is False  # stays unsatisfiable


def test_tautology_is_a_no_op():
    s = Solver()
    s.add_clause([1, -1, 2])
    assert s.clauses == []


def test_duplicate_literals_removed():
    s = Solver()
    s.add_clause([1, 1, 2])
    assert sorted(s.clauses[0].literals) == [1, 2]


def test_empty_clause_makes_solver_unsat():
    s = Solver()
    assert s.add_clause([]) is False
    assert s.solve().status == "UNSAT"


def test_zero_literal_rejected():
    with pytest.raises(ValueError):
        Solver().add_clause([1, 0])


# -- propagation and analysis ----------------------------------------------------------

def test_unit_chain_propagates():
    s = solver_for([[1], [-1, 2]])
    assert s.propagate() is None
    assert s.value(1) is True and s.value(2) is True
    s.check_trail()


def test_opposite_units_detected_at_level_zero():
    s = Solver()
    s.add_clause([1])
    assert not s.add_clause([-1])


def test_contradictory_layout_pair_conflicts_after_first_decision():
    inst = Instance(Grid(3, 3), 9, hard_adjacency={(0, 1)})
    f, vm = encode_feasibility(inst)
    s = solver_for(f.clauses, f.n_vars)
    # separating the same pair on top of the adjacency makes it contradictory
    for j, l in [(a, b) for a in range(9) for b in range(9) if abs(a // 3 - b // 3) + abs(a % 3 - b % 3) == 1]:
        s.add_clause([-vm.x(0, j), -vm.x(1, l)])
    s.decide(vm.x(0, 4))
    conflict = s.propagate()
    assert conflict is not None
    assert s.solve().status == "UNSAT"


def test_single_decision_learns_its_negation():
    s = solver_for([[-1, 2], [-1, -2]])
    s.decide(1)
    conflict = s.propagate()
    assert conflict is not None
    learned, bj = s.analyze_conflict(conflict)
    assert learned.literals == [-1]
    assert bj == 0
    assert learned.lbd == 1


def test_backjump_is_second_highest_level():
    # levels: x1@1, x2@2, x3@3; the conflict involves x1 and x3 only
    s = solver_for([[-1, -3, 4], [-1, -3, -4], [5, 6]])
    s.decide(1)
    assert s.propagate() is None
    s.decide(2)
    assert s.propagate() is None
    s.decide(3)
    conflict = s.propagate()
    learned, bj = s.analyze_conflict(conflict)
    assert sorted(learned.literals) == [-3, -1]
    assert learned.literals[0] == -3  # the UIP comes first
    assert bj == 1
    assert all(s.value(l) is False for l in learned.literals)


def test_analysis_at_level_zero_refused():
    s = Solver(n_vars=1)
    with pytest.raises(ValueError):
        s.analyze_conflict(Clause([2]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_learned_clauses_are_uip_and_falsified(seed):
    rng = np.random.default_rng(seed)
    clauses = random_3cnf(rng, 12, 55)
    s = solver_for(clauses, 12, check_invariants=True)
    out = s.solve()
    assert (out.status == "SAT") == (truth_table_count(12, clauses) > 0)
    if out.sat:
        assert satisfies(clauses, out.model)


# -- VSIDS -------------------------------------------------------------------------

def test_pick_branch_ties_by_index_with_default_polarity():
    s = Solver(n_vars=3)
    s.activity[2] = s.activity[3] = 5.0
    s._rebuild_heap()
    assert s.pick_branch() == -2


def test_saved_phase_reused_after_backjump():
    s = Solver(n_vars=2)
    s.bump_and_decay([2])
    s.decide(2)
    s.backjump(0)
    assert s.pick_branch() == 2


def test_bump_moves_argmax():
    s = Solver(n_vars=3)
    s.activity[2] = 0.5
    s._rebuild_heap()
    assert abs(s.pick_branch()) == 2
    s.bump_and_decay([3])
    assert abs(s.pick_branch()) == 3


def test_bump_arithmetic():
    s = Solver(n_vars=2)
    s.bump_and_decay([1])
    assert s.activity[1] == 1.0
    assert s.var_inc == pytest.approx(1 / 0.95)
    assert s.var_inc == pytest.approx(1.0526, abs=1e-4)
    s.bump_and_decay([2])
    assert s.activity[2] > s.activity[1]


def test_rescale_preserves_order_and_fires_on_overflow():
    s = Solver(n_vars=4)
    s.var_inc = 1e99
    s.bump_and_decay([3])
    s.bump_and_decay([3, 4])  # pushes var 3 past the threshold
    assert max(s.activity) < 1e100
    assert abs(s.pick_branch()) == 3
    assert s.activity[3] > s.activity[4] > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rescaling_never_changes_decisions(seed):
    clauses = random_3cnf(np.random.default_rng(seed), 30, 120)
    a = solver_for(clauses, 30)
    b = solver_for(clauses, 30)
    b.rescale_activities(2.0 ** -40)
    a.decision_log, b.decision_log = [], []
    ra, rb = a.solve(), b.solve()
    assert a.decision_log == b.decision_log
    assert ra.status == rb.status and ra.model == rb.model


# -- clause database ------------------------------------------------------------------

def _learned(s, lbd, activity=0.0):
    c = Clause([2, 4], learned=True, lbd=lbd)
    c.activity = activity
    s.learnts.append(c)
    return c


def test_reduce_keeps_glue_and_halves_the_rest():
    s = Solver(n_vars=3)
    for _ in range(10):
        _learned(s, 2)
    others = [_learned(s, 3 + k % 5, activity=k) for k in range(90)]
    deleted = s.reduce_clause_db()
    assert deleted == 45
    assert sum(c.lbd <= 2 for c in s.learnts) == 10
    # the survivors never have a worse lbd than the deleted ones
    gone = [c for c in others if c.deleted]
    kept = [c for c in others if not c.deleted]
    assert min(c.lbd for c in gone) >= max(c.lbd for c in kept)


def test_reduce_with_only_glue_deletes_nothing():
    s = Solver(n_vars=3)
    for _ in range(20):
        _learned(s, 1)
    assert s.reduce_clause_db() == 0


def test_frequent_reduction_keeps_answers_right():
    rng = np.random.default_rng(5)
    for _ in range(30):
        clauses = random_3cnf(rng, 16, 68)
        out = solver_for(clauses, 16, clause_db_reduce_interval=5, luby_base=2).solve()
        assert (out.status == "SAT") == (truth_table_count(16, clauses) > 0)


# -- solving ------------------------------------------------------------------------

def test_empty_formula_sat_with_full_model():
    out = Solver(n_vars=3).solve()
    assert out.status == "SAT"
    assert set(out.model) == {1, 2, 3}


@pytest.mark.parametrize("p,h", [(4, 3), (5, 4), (6, 5)])
def test_pigeonhole_unsat(p, h):
    n, cls = pigeonhole(p, h)
    assert solver_for(cls, n).solve().status == "UNSAT"


def test_pigeonhole_square_sat():
    n, cls = pigeonhole(5, 5)
    out = solver_for(cls, n).solve()
    assert out.sat and satisfies(cls, out.model)


def test_assumptions_and_reuse():
    s = solver_for([[1, 2], [-1, 3]])
    assert s.solve([-2]).model[1] is True
    assert s.solve([-3, -2]).status == "UNSAT"
    assert s.solve().status == "SAT"  # still usable after a failed assumption


def test_conflict_budget_reports_unknown():
    n, cls = pigeonhole(7, 6)
    out = solver_for(cls, n, conflict_limit=10).solve()
    assert out.status == "UNKNOWN" and out.budget == "conflicts"


def test_time_budget_reports_unknown():
    n, cls = pigeonhole(9, 8)
    out = solver_for(cls, n, time_limit=0.05).solve()
    assert out.status == "UNKNOWN" and out.budget == "time"


def test_stats_fields():
    n, cls = pigeonhole(5, 4)
    out = solver_for(cls, n).solve()
    assert set(out.stats) == {"conflicts", "decisions", "propagations", "restarts",
                              "learned_count", "deleted_count", "max_lbd"}
    assert out.stats["conflicts"] > 0 and out.stats["learned_count"] > 0


def test_identical_runs_identical_results():
    clauses = random_3cnf(np.random.default_rng(11), 40, 170)
    a, b = solver_for(clauses, 40).solve(), solver_for(clauses, 40).solve()
    assert a.status == b.status and a.model == b.model and a.stats == b.stats


def test_seeded_runs_are_reproducible_and_correct():
    clauses = random_3cnf(np.random.default_rng(12), 18, 76)
    a = solver_for(clauses, 18, seed=99).solve()
    b = solver_for(clauses, 18, seed=99).solve()
    assert a.model == b.model and a.stats == b.stats
    assert (a.status == "SAT") == (truth_table_count(18, clauses) > 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(5, 14), st.floats(2.0, 6.0))
def test_status_matches_truth_table(seed, n, ratio):
    clauses = random_3cnf(np.random.default_rng(seed), n, int(round(ratio * n)))
    out = solver_for(clauses, n).solve()
    assert (out.status == "SAT") == (truth_table_count(n, clauses) > 0)
    if out.sat:
        assert satisfies(clauses, out.model)


# -- enumeration ----------------------------------------------------------------------

def _layout_solver(rows, cols, **enc):
    inst = Instance(Grid(rows, cols), rows * cols)
    f, vm = encode_feasibility(inst, EncodingConfig(**enc))
    return solver_for(f.clauses, f.n_vars), vm


@pytest.mark.parametrize("strategy", ["blocking", "dfs"])
def test_enumerate_all_2x2_layouts(strategy):
    s, vm = _layout_solver(2, 2)
    e = enumerate_models(s, 1000, range(1, vm.n_primary + 1), strategy=strategy)
    assert len(e.models) == 24 and e.complete
    assert len(set(e.models)) == 24


@pytest.mark.parametrize("strategy", ["blocking", "dfs"])
def test_enumerate_with_machine_fixed(strategy):
    s, vm = _layout_solver(2, 2, symmetry_mode="fix_first")
    e = enumerate_models(s, 1000, range(1, vm.n_primary + 1), strategy=strategy)
    assert len(e.models) == 6


@pytest.mark.parametrize("strategy", ["blocking", "dfs"])
def test_enumeration_cap_flags_incomplete(strategy):
    s, vm = _layout_solver(2, 2)
    e = enumerate_models(s, 5, range(1, vm.n_primary + 1), strategy=strategy)
    assert len(e.models) == 5 and len(set(e.models)) == 5
    assert e.complete is False


def test_positive_only_blocking_matches_full_blocking():
    s1, vm = _layout_solver(2, 3)
    s2, _ = _layout_solver(2, 3)
    proj = range(1, vm.n_primary + 1)
    a = enumerate_models(s1, 10_000, proj, positive_only=True)
    b = enumerate_models(s2, 10_000, proj)
    assert len(a.models) == 720 and set(a.models) == set(b.models)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 9), st.sampled_from(["blocking", "dfs"]))
def test_enumeration_count_matches_truth_table(seed, n, strategy):
    clauses = random_3cnf(np.random.default_rng(seed), n, 2 * n)
    s = solver_for(clauses, n)
    e = enumerate_models(s, 10_000, range(1, n + 1), strategy=strategy)
    assert e.complete
    assert len(e.models) == len(set(e.models)) == truth_table_count(n, clauses)
    for k in range(len(e.models)):
        assert satisfies(clauses, e.as_dict(k))


def test_projected_enumeration_skips_duplicates():
    # x3 is free, so projecting onto {1, 2} must not report models twice
    clauses = [[1, 2]]
    for strategy in ("blocking", "dfs"):
        e = enumerate_models(solver_for(clauses, 3), 100, [1, 2], strategy=strategy)
        assert sorted(e.models) == [(1,), (1, 2), (2,)]


def test_enumeration_rejects_bad_arguments():
    s = Solver(n_vars=2)
    with pytest.raises(ValueError):
        enumerate_models(s, 0, [1])
    with pytest.raises(ValueError):
        enumerate_models(s, 5, [])
    with pytest.raises(ValueError):
        enumerate_models(s, 5, [1], strategy="nope")
