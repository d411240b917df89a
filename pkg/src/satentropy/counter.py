"""Exact model counting.

count_models is a DPLL-style counter with unit propagation, connected
component decomposition and component caching; count_models_bruteforce is
an independent truth-table oracle used by the test suite. Both count total
assignments over all declared variables, so a variable that occurs in no
clause doubles the count.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field

from .cnf import CnfFormula, Clause


class BudgetExceeded(RuntimeError):
    """The counting run hit its configured resource budget."""


@dataclass
class CountBudget:
    """Resource limits for one counting run; None means unlimited."""

    max_nodes: int | None = None
    max_seconds: float | None = None
    max_cache_entries: int = 1_000_000


@dataclass
class _Run:
    budget: CountBudget = field(default_factory=CountBudget)
    nodes: int = 0
    deadline: float | None = None
    cache: "OrderedDict[tuple, int]" = field(default_factory=OrderedDict)

    def __post_init__(self):
        if self.budget.max_seconds is not None:
            self.deadline = time.monotonic() + self.budget.max_seconds

    def tick(self):
        self.nodes += 1
        if self.budget.max_nodes is not None and self.nodes > self.budget.max_nodes:
            raise BudgetExceeded(f"node budget {self.budget.max_nodes} exceeded")
        if self.deadline is not None and self.nodes % 256 == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceeded(
                    f"time budget {self.budget.max_seconds}s exceeded"
                )

    def cache_put(self, key: tuple, value: int):
        self.cache[key] = value
        if len(self.cache) > self.budget.max_cache_entries:
            self.cache.popitem(last=False)


def _condition(clauses: tuple, true_lits) -> tuple | None:
    """Residual formula after asserting the given literals; None on conflict."""
    false_lits = {-l for l in true_lits}
    out = []
    for cl in clauses:
        for l in cl:
            if l in true_lits:
                break
        else:
            nl = tuple(l for l in cl if l not in false_lits)
            if not nl:
                return None
            out.append(nl)
    return tuple(out)


def _vars_of(clauses: tuple) -> set[int]:
    return {abs(l) for cl in clauses for l in cl}


def _components(clauses: tuple) -> list[tuple]:
    """Split clauses into variable-connected components."""
    parent: dict[int, int] = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for cl in clauses:
        vs = [abs(l) for l in cl]
        for v in vs:
            parent.setdefault(v, v)
        r = find(vs[0])
        for v in vs[1:]:
            parent[find(v)] = r

    groups: dict[int, list] = {}
    for cl in clauses:
        groups.setdefault(find(abs(cl[0])), []).append(cl)
    return [tuple(g) for g in groups.values()]


def _count_over(clauses: tuple, run: _Run) -> int:
    """Number of models over exactly the variables occurring in `clauses`."""
    run.tick()
    if not clauses:
        return 1

    # unit propagation
    units = {cl[0] for cl in clauses if len(cl) == 1}
    if units:
        if any(-l in units for l in units):
            return 0
        reduced = _condition(clauses, units)
        if reduced is None:
            return 0
        free = len(_vars_of(clauses)) - len(_vars_of(reduced)) - len(units)
        return _count_over(reduced, run) << free

    comps = _components(clauses)
    if len(comps) > 1:
        total = 1
        for comp in comps:
            total *= _count_over(comp, run)
            if total == 0:
                return 0
        return total

    key = tuple(sorted(clauses))
    cached = run.cache.get(key)
    if cached is not None:
        run.cache.move_to_end(key)
        return cached

    # branch on the most frequent variable
    counts: dict[int, int] = {}
    for cl in clauses:
        for l in cl:
            v = abs(l)
            counts[v] = counts.get(v, 0) + 1
    branch_var = max(counts, key=lambda v: (counts[v], -v))

    nvars = len(_vars_of(clauses))
    total = 0
    for lit in (branch_var, -branch_var):
        reduced = _condition(clauses, {lit})
        if reduced is None:
            continue
        free = nvars - len(_vars_of(reduced)) - 1
        total += _count_over(reduced, run) << free

    run.cache_put(key, total)
    return total


def _prepared_clauses(formula: CnfFormula) -> tuple:
    """Sorted literal tuples with tautological clauses dropped."""
    return tuple(tuple(sorted(cl)) for cl in formula.clause_lists())


def count_models(formula: CnfFormula, budget: CountBudget | None = None) -> int:
    """Exact number of total satisfying assignments of the formula."""
    clauses = _prepared_clauses(formula)
    run = _Run(budget or CountBudget())
    core = _count_over(clauses, run)
    free = formula.num_vars - len(_vars_of(clauses))
    return core << free


def conditioned_formula(formula: CnfFormula, lit: int) -> CnfFormula:
    """The formula with a unit clause asserting `lit` appended."""
    if not 1 <= abs(lit) <= formula.num_vars:
        raise ValueError(f"literal {lit} out of range for {formula.num_vars} vars")
    return CnfFormula(formula.num_vars, formula.clauses + (Clause((lit,)),))


def count_conditioned(
    formula: CnfFormula, lit: int, budget: CountBudget | None = None
) -> int:
    """#SAT(formula AND lit), without mutating the input formula."""
    return count_models(conditioned_formula(formula, lit), budget)


_BRUTEFORCE_MAX_VARS = 30
_BITMASK_MAX_VARS = 22  # truth-table masks stay under ~1 MB per variable


def _bitmask_count(clauses, nvars: int) -> int:
    """Truth-table count over nvars variables via bit-parallel masks."""
    n_assign = 1 << nvars
    all_ones = (1 << n_assign) - 1
    # var_mask[v] has bit a set iff assignment a sets variable v true
    var_mask = [0] * (nvars + 1)
    for v in range(1, nvars + 1):
        half = 1 << (v - 1)
        m = ((1 << half) - 1) << half
        span = half << 1
        while span < n_assign:
            m |= m << span
            span <<= 1
        var_mask[v] = m

    sat = all_ones
    for cl in clauses:
        cm = 0
        for l in cl:
            if l > 0:
                cm |= var_mask[l]
            else:
                cm |= var_mask[-l] ^ all_ones
        sat &= cm
        if sat == 0:
            return 0
    return sat.bit_count()


def count_models_bruteforce(formula: CnfFormula) -> int:
    """Count by exhaustive enumeration of all 2^n assignments.

    Independent of count_models: a straight truth-table sweep (bit-parallel
    for speed, with the high variables enumerated explicitly when n exceeds
    the mask width). Rejects formulas with more than 30 variables.
    """
    n = formula.num_vars
    if n > _BRUTEFORCE_MAX_VARS:
        raise ValueError(f"brute force limited to {_BRUTEFORCE_MAX_VARS} vars, got {n}")
    clauses = formula.clause_lists()
    if any(len(cl) == 0 for cl in clauses):
        return 0
    nlow = min(n, _BITMASK_MAX_VARS)
    if n == nlow:
        return _bitmask_count(clauses, n)

    # enumerate assignments to the high variables, bitmask over the low ones
    total = 0
    nhigh = n - nlow
    for bits in range(1 << nhigh):
        true_lits = set()
        for i in range(nhigh):
            v = nlow + 1 + i
            true_lits.add(v if (bits >> i) & 1 else -v)
        reduced = _condition(tuple(clauses), true_lits)
        if reduced is None:
            continue
        total += _bitmask_count(reduced, nlow)
    return total


def find_model(formula: CnfFormula) -> dict[int, bool] | None:
    """A single satisfying total assignment, or None if unsatisfiable.

    DPLL with unit propagation and early exit on the first model; cheap
    satisfiability probe used by backbone extraction and the generator.
    """
    clauses = _prepared_clauses(formula)
    if any(len(cl) == 0 for cl in clauses):
        return None
    fixed: dict[int, bool] = {}

    def search(cls, assigned: dict[int, bool]):
        while True:
            units = {cl[0] for cl in cls if len(cl) == 1}
            if not units:
                break
            if any(-l in units for l in units):
                return None
            cls = _condition(cls, units)
            if cls is None:
                return None
            for l in units:
                assigned[abs(l)] = l > 0
        if not cls:
            return assigned
        counts: dict[int, int] = {}
        for cl in cls:
            for l in cl:
                counts[l] = counts.get(l, 0) + 1
        lit = max(counts, key=lambda l: (counts[l], -abs(l), l))
        for choice in (lit, -lit):
            reduced = _condition(cls, {choice})
            if reduced is None:
                continue
            trial = dict(assigned)
            trial[abs(choice)] = choice > 0
            result = search(reduced, trial)
            if result is not None:
                return result
        return None

    result = search(clauses, fixed)
    if result is None:
        return None
    # variables never constrained get an arbitrary (fixed) value
    return {v: result.get(v, False) for v in range(1, formula.num_vars + 1)}


def is_satisfiable(formula: CnfFormula) -> bool:
    return find_model(formula) is not None
