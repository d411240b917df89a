import random

import pytest

from satentropy.cnf import CnfFormula
from satentropy.counter import (
    BudgetExceeded,
    CountBudget,
    count_conditioned,
    count_models,
    count_models_bruteforce,
    find_model,
)
from conftest import random_formula, random_3sat


def test_single_clause():
    f = CnfFormula.from_clause_lists(2, [[1, 2]])
    assert count_models(f) == 3
    assert count_models_bruteforce(f) == 3


def test_empty_conjunction_counts_everything():
    assert count_models(CnfFormula(5, ())) == 32
    assert count_models_bruteforce(CnfFormula(0, ())) == 1


def test_contradiction():
    f = CnfFormula.from_clause_lists(1, [[1], [-1]])
    assert count_models(f) == 0
    assert count_models_bruteforce(f) == 0


def test_free_variables_double_count():
    # variable 3 occurs in no clause
    f = CnfFormula.from_clause_lists(3, [[1, 2]])
    assert count_models(f) == 6


def test_three_literal_clause():
    f = CnfFormula.from_clause_lists(3, [[1, 2, 3]])
    assert count_models_bruteforce(f) == 7
    assert count_models(f) == 7


def test_tautological_clause_always_satisfied():
    f = CnfFormula.from_clause_lists(2, [[1, -1], [2]])
    assert count_models(f) == 2
    assert count_models_bruteforce(f) == 2


@pytest.mark.parametrize("ratio", [1, 2, 3, 4.26, 6])
def test_agrees_with_bruteforce(ratio):
    for seed in range(40):
        n = random.Random(seed).randint(5, 16)
        f = random_3sat(seed * 31 + int(ratio * 7), n, ratio)
        assert count_models(f) == count_models_bruteforce(f)


def test_agrees_on_mixed_clause_lengths():
    for seed in range(100):
        f = random_formula(seed)
        assert count_models(f) == count_models_bruteforce(f)


def test_partition_identity():
    for seed in range(30):
        f = random_formula(seed, max_vars=10)
        total = count_models(f)
        for v in range(1, f.num_vars + 1):
            assert count_conditioned(f, v) + count_conditioned(f, -v) == total


def test_conditioning_does_not_mutate():
    f = CnfFormula.from_clause_lists(2, [[1, 2]])
    count_conditioned(f, 1)
    assert f.num_clauses == 1


def test_conditioned_examples():
    f = CnfFormula.from_clause_lists(2, [[1, 2]])
    assert count_conditioned(f, 1) == 2
    g = CnfFormula.from_clause_lists(1, [[1], [-1]])
    assert count_conditioned(g, 1) == 0


def test_count_invariant_under_reordering():
    rng = random.Random(0)
    for seed in range(20):
        f = random_formula(seed, max_vars=10)
        base = count_models(f)
        clauses = [list(c.lits) for c in f.clauses]
        rng.shuffle(clauses)
        for c in clauses:
            rng.shuffle(c)
        g = CnfFormula.from_clause_lists(f.num_vars, clauses)
        assert count_models(g) == base


def test_bruteforce_var_limit():
    with pytest.raises(ValueError, match="30 vars"):
        count_models_bruteforce(CnfFormula(31, ()))


def test_bruteforce_above_mask_width():
    # exercises the high-variable enumeration path
    f = CnfFormula.from_clause_lists(24, [[1, 24], [-24, 2]])
    assert count_models_bruteforce(f) == count_models(f)


def test_node_budget_raises_not_wrong():
    f = random_3sat(3, 16, 4.26)
    with pytest.raises(BudgetExceeded):
        count_models(f, CountBudget(max_nodes=2))


def test_find_model_returns_verified_model():
    from satentropy.cnf import evaluate

    for seed in range(50):
        f = random_formula(seed, max_vars=12)
        model = find_model(f)
        if count_models_bruteforce(f) > 0:
            assert model is not None
            assert evaluate(f, model)
        else:
            assert model is None
