import random

import pytest

from satentropy.cnf import CnfFormula, evaluate
from satentropy.counter import count_models_bruteforce
from satentropy.solver import (
    GlucoseRestarts,
    KeepLbdCutAtMost,
    KeepSizeAtMost,
    LearnedClauseMeta,
    LubyRestarts,
    SolverConfig,
    compute_lbd,
    glucose_restart_due,
    luby,
    reduce_database,
    solve,
)
from conftest import random_3sat, random_formula


ALL_CONFIGS = [
    SolverConfig(restart=r, deletion=d, decay=dc, reduce_interval=30, seed=9)
    for r in (LubyRestarts(100), GlucoseRestarts(50, 0.8))
    for d in (KeepLbdCutAtMost(5), KeepSizeAtMost(12))
    for dc in (0.95, 0.6)
]


def luby_reference(i):
    """Direct recursive evaluation of the defining cases."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    if (1 << k) - 1 == i:
        return 1 << (k - 1)
    return luby_reference(i - (1 << (k - 1)) + 1)


class TestLuby:
    def test_first_nine(self):
        assert [luby(i) for i in range(1, 10)] == [1, 1, 2, 1, 1, 2, 4, 1, 1]

    def test_index_fifteen(self):
        assert luby(15) == 8

    def test_matches_recursive_definition(self):
        for i in range(1, 200):
            assert luby(i) == luby_reference(i)

    def test_powers_double(self):
        vals = [luby((1 << k) - 1) for k in range(1, 8)]
        assert vals == [1, 2, 4, 8, 16, 32, 64]

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            luby(0)


class TestLbd:
    def test_distinct_levels(self):
        levels = {1: 2, 2: 2, 3: 5, 4: 7}
        assert compute_lbd([1, -2, 3, 4], lambda v: levels[v]) == 3

    def test_single_level(self):
        assert compute_lbd([1, 2, 3], lambda v: 4) == 1

    def test_all_distinct(self):
        assert compute_lbd([1, 2, 3, 4], lambda v: v) == 4

    def test_unassigned_rejected(self):
        with pytest.raises(ValueError, match="unassigned"):
            compute_lbd([1], lambda v: None)


class TestGlucoseTrigger:
    def test_fires_when_window_exceeds_global(self):
        assert glucose_restart_due([5, 5, 5], 3, 3.0, 0.8)

    def test_quiet_when_equal(self):
        assert not glucose_restart_due([3, 3, 3], 3, 3.0, 0.8)

    def test_window_not_full(self):
        assert not glucose_restart_due([9, 9], 3, 1.0, 0.8)


class TestReduceDatabase:
    def make(self, lbd_cut, size, activity=0.0):
        return LearnedClauseMeta(
            lits=list(range(1, size + 1)),
            lbd_current=lbd_cut,
            lbd_cut=lbd_cut,
            activity=activity,
        )

    def test_lbd_cut_keeps_unconditionally(self):
        c = self.make(lbd_cut=3, size=20)
        kept, deleted = reduce_database([c], KeepLbdCutAtMost(5))
        assert kept == [c] and deleted == []

    def test_size_boundary(self):
        keep12 = self.make(lbd_cut=9, size=12)
        drop13 = [self.make(lbd_cut=9, size=13, activity=i) for i in range(4)]
        kept, deleted = reduce_database([keep12] + drop13, KeepSizeAtMost(12))
        assert keep12 in kept
        # lowest-activity half of the eligible clauses goes
        assert deleted == drop13[:2]

    def test_empty(self):
        assert reduce_database([], KeepLbdCutAtMost(5)) == ([], [])

    def test_protected_never_deleted(self):
        cs = [self.make(lbd_cut=9, size=20, activity=i) for i in range(4)]
        kept, deleted = reduce_database(
            cs, KeepLbdCutAtMost(5), protected=frozenset([id(cs[0])])
        )
        assert cs[0] in kept

    def test_lbd_cut_monotone(self):
        c = self.make(lbd_cut=6, size=10)
        c.update_lbd(4)
        assert c.lbd_cut == 4
        c.update_lbd(9)
        assert c.lbd_cut == 4


class TestSolve:
    def test_trivial_unsat(self):
        f = CnfFormula.from_clause_lists(1, [[1], [-1]])
        for cfg in ALL_CONFIGS:
            st = solve(f, cfg)
            assert st.result == "UNSAT"
            assert st.conflicts >= 0

    def test_empty_formula(self):
        st = solve(CnfFormula(3, ()))
        assert st.result == "SAT"
        assert st.conflicts == 0

    def test_tautologies_ignored(self):
        f = CnfFormula.from_clause_lists(2, [[1, -1], [2]])
        st = solve(f)
        assert st.result == "SAT"
        assert st.model[2] is True

    @pytest.mark.parametrize("cfg", ALL_CONFIGS, ids=lambda c: c.label())
    def test_soundness_all_configs(self, cfg):
        for seed in range(40):
            n = random.Random(seed).randint(6, 20)
            f = random_3sat(seed, n, 4.26)
            sat = count_models_bruteforce(f) > 0
            st = solve(f, cfg)
            assert (st.result == "SAT") == sat
            if st.result == "SAT":
                assert evaluate(f, st.model)

    def test_mixed_clause_lengths(self):
        for seed in range(60):
            f = random_formula(seed, max_vars=14)
            sat = count_models_bruteforce(f) > 0
            st = solve(f, SolverConfig(seed=seed))
            assert (st.result == "SAT") == sat

    def test_deterministic(self):
        f = random_3sat(5, 18, 4.26)
        cfg = SolverConfig(seed=77, reduce_interval=20)
        assert solve(f, cfg) == solve(f, cfg)

    def test_verdict_agrees_across_configs(self):
        for seed in range(15):
            f = random_3sat(100 + seed, 16, 4.26)
            verdicts = {solve(f, cfg).result for cfg in ALL_CONFIGS}
            assert len(verdicts) == 1

    def test_conflict_budget(self):
        # a formula hard enough to hit a tiny budget
        for seed in range(50):
            f = random_3sat(seed, 20, 4.26)
            st = solve(f, SolverConfig(conflict_budget=1, seed=seed))
            if st.result == "BUDGET":
                assert st.conflicts == 1
                return
        pytest.fail("no instance produced a conflict")

    def test_reduction_actually_deletes(self):
        deleted = 0
        for seed in range(80):
            f = random_3sat(seed, 20, 4.26)
            st = solve(
                f,
                SolverConfig(
                    deletion=KeepSizeAtMost(1), reduce_interval=10, seed=seed
                ),
            )
            deleted += st.learned_deleted
        assert deleted > 0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(decay=1.0)
        with pytest.raises(ValueError):
            LubyRestarts(0)
        with pytest.raises(ValueError):
            KeepLbdCutAtMost(0)


class TestVsidsInvariance:
    def test_decay_preserves_relative_order(self):
        # exponential VSIDS: decaying by growing the increment rescales all
        # activities uniformly, so untouched variables keep their order
        from satentropy.solver import _Solver

        f = random_3sat(2, 20, 4.26)
        s = _Solver(f, SolverConfig(seed=1))
        s.activity[3] = 5.0
        s.activity[7] = 2.0
        before = s.activity[3] > s.activity[7]
        s.decay_activities()
        s.bump_var(11)
        after = s.activity[3] > s.activity[7]
        assert before == after
