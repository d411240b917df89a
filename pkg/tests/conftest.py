import random

import pytest

from satentropy.cnf import CnfFormula


def random_formula(seed, max_vars=12, max_clause_len=3):
    """A random CNF formula (not necessarily 3-SAT) for property tests."""
    rng = random.Random(seed)
    n = rng.randint(1, max_vars)
    m = rng.randint(0, 5 * n)
    clauses = []
    for _ in range(m):
        k = rng.randint(1, min(max_clause_len, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return CnfFormula.from_clause_lists(n, clauses)


def random_3sat(seed, n, ratio):
    from satentropy.benchgen import gen_random_3sat

    return gen_random_3sat(n, max(1, round(n * ratio)), seed)


@pytest.fixture
def rng():
    return random.Random(12345)
